"""Order-statistic container tuned for keys that arrive in increasing order."""

from __future__ import annotations

from bisect import bisect_left, insort
from typing import Iterable, Iterator

LOAD = 256


class OrderIndex:
    """Sorted multiset-free container with O(log n) rank and select.

    Keys live in fixed blocks of at most ``LOAD`` entries; a Fenwick tree over
    block sizes answers prefix counts.  Appending a key larger than every
    stored key costs O(1) amortized, which is the common case because
    occurrence ticks are issued in increasing order.  Blocks are never split
    or merged in place; the whole layout is rebuilt when a block overflows or
    when more than half of the blocks are empty.
    """

    __slots__ = ("_blocks", "_maxes", "_tree", "_len", "_empty", "_pending")

    def __init__(self, keys: Iterable = ()):
        self._rebuild(sorted(keys))

    def _rebuild(self, keys: list) -> None:
        self._blocks = [keys[i : i + LOAD] for i in range(0, len(keys), LOAD)]
        self._maxes = [b[-1] for b in self._blocks]
        self._len = len(keys)
        self._empty = 0
        # appends to the last block not yet pushed into the tree
        self._pending = 0
        size = 1
        while size < 2 * max(len(self._blocks), 1):
            size *= 2
        self._tree = [0] * (size + 1)
        for i, b in enumerate(self._blocks):
            self._fen_add(i, len(b))

    def _fen_add(self, i: int, delta: int) -> None:
        tree = self._tree
        i += 1
        n = len(tree)
        while i < n:
            tree[i] += delta
            i += i & -i

    def _flush(self) -> None:
        if self._pending:
            self._fen_add(len(self._blocks) - 1, self._pending)
            self._pending = 0

    def _prefix(self, i: int) -> int:
        """Number of keys in blocks ``0..i-1``."""
        self._flush()
        tree = self._tree
        s = 0
        while i > 0:
            s += tree[i]
            i -= i & -i
        return s

    def __len__(self) -> int:
        return self._len

    def __iter__(self) -> Iterator:
        for b in self._blocks:
            yield from b

    def __contains__(self, key) -> bool:
        i = bisect_left(self._maxes, key)
        if i == len(self._maxes):
            return False
        b = self._blocks[i]
        j = bisect_left(b, key)
        return j < len(b) and b[j] == key

    def add(self, key) -> None:
        blocks = self._blocks
        if blocks and key > self._maxes[-1]:
            last = blocks[-1]
            if 0 < len(last) < LOAD:
                last.append(key)
                self._maxes[-1] = key
                self._pending += 1
                self._len += 1
                return
        self._flush()
        if not blocks or key > self._maxes[-1]:
            if not blocks or len(blocks[-1]) >= LOAD:
                if len(blocks) + 1 >= len(self._tree):
                    self._rebuild(list(self) + [key])
                    return
                blocks.append([key])
                self._maxes.append(key)
            else:
                self._empty -= 1
                blocks[-1].append(key)
                self._maxes[-1] = key
            self._fen_add(len(blocks) - 1, 1)
            self._len += 1
            return
        i = bisect_left(self._maxes, key)
        b = blocks[i]
        if not b:
            self._empty -= 1
        insort(b, key)
        self._len += 1
        if len(b) > 2 * LOAD:
            self._rebuild(list(self))
        else:
            self._fen_add(i, 1)

    def remove(self, key) -> None:
        i = bisect_left(self._maxes, key)
        if i == len(self._maxes):
            raise KeyError(key)
        b = self._blocks[i]
        j = bisect_left(b, key)
        if j == len(b) or b[j] != key:
            raise KeyError(key)
        self._flush()
        del b[j]
        self._len -= 1
        self._fen_add(i, -1)
        # an emptied block keeps its stale max, which still orders correctly
        if not b:
            self._empty += 1
            if self._empty * 2 > len(self._blocks) and len(self._blocks) > 4:
                self._rebuild(list(self))

    def bisect_left(self, key) -> int:
        """Number of stored keys strictly less than ``key``."""
        i = bisect_left(self._maxes, key)
        if i == len(self._maxes):
            return self._len
        return self._prefix(i) + bisect_left(self._blocks[i], key)

    def __getitem__(self, r: int):
        """Key of rank ``r`` (0-based; negative ranks count from the end)."""
        if r < 0:
            r += self._len
        if not 0 <= r < self._len:
            raise IndexError(r)
        self._flush()
        tree = self._tree
        pos = 0
        step = len(tree) - 1
        while step:
            nxt = pos + step
            if nxt < len(tree) and tree[nxt] <= r:
                pos = nxt
                r -= tree[nxt]
            step //= 2
        return self._blocks[pos][r]

    def __repr__(self) -> str:
        return f"OrderIndex({list(self)!r})"
