"""Dynamic unweighted multigraph with stable edge ids and O(1) incident-edge sampling."""

from __future__ import annotations

import random
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .errors import IsolatedVertex, ParseError, SelfLoopRejected, UnknownEdge, UnknownVertex

RandomStream = random.Random


class DynamicMultigraph:
    """Undirected multigraph on a fixed vertex set ``0..n-1``.

    Each vertex keeps an incidence list of ``(edge_id, neighbor)`` pairs.
    Deletion swaps the removed entry with the last one, so every edge records
    where it sits in both endpoint lists.  The order of incidence entries is
    not meaningful.
    """

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        self.n = n
        self._inc: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        self._ends: dict[int, tuple[int, int]] = {}
        # slot of the edge inside inc[u] and inc[v]
        self._slot: dict[int, list[int]] = {}
        self._next_id = 0
        for u, v in edges:
            self.insert_edge(u, v)

    @property
    def m(self) -> int:
        return len(self._ends)

    def _check_vertex(self, u: int) -> None:
        if not 0 <= u < self.n:
            raise UnknownVertex(f"vertex {u} not in [0, {self.n})")

    def insert_edge(self, u: int, v: int) -> int:
        self._check_vertex(u)
        self._check_vertex(v)
        if u == v:
            raise SelfLoopRejected(f"self-loop at {u}")
        eid = self._next_id
        self._next_id += 1
        self._ends[eid] = (u, v)
        iu, iv = self._inc[u], self._inc[v]
        self._slot[eid] = [len(iu), len(iv)]
        iu.append((eid, v))
        iv.append((eid, u))
        return eid

    def delete_edge(self, eid: int) -> tuple[int, int]:
        try:
            u, v = self._ends.pop(eid)
        except KeyError:
            raise UnknownEdge(eid) from None
        su, sv = self._slot.pop(eid)
        self._swap_remove(u, su)
        self._swap_remove(v, sv)
        return u, v

    def _swap_remove(self, x: int, slot: int) -> None:
        inc = self._inc[x]
        last = inc.pop()
        if slot < len(inc):
            inc[slot] = last
            moved, _ = last
            a, _b = self._ends[moved]
            self._slot[moved][0 if a == x else 1] = slot

    def sample_incident(self, u: int, rng: RandomStream) -> tuple[int, int]:
        inc = self._inc[u]
        if not inc:
            raise IsolatedVertex(u)
        return inc[int(rng.random() * len(inc))]

    def degree(self, u: int) -> int:
        return len(self._inc[u])

    def degrees(self) -> np.ndarray:
        return np.fromiter((len(i) for i in self._inc), dtype=np.int64, count=self.n)

    def incident(self, u: int) -> list[tuple[int, int]]:
        """The live incidence list of ``u``; callers must not mutate it."""
        return self._inc[u]

    def endpoints(self, eid: int) -> tuple[int, int]:
        try:
            return self._ends[eid]
        except KeyError:
            raise UnknownEdge(eid) from None

    def has_edge(self, eid: int) -> bool:
        return eid in self._ends

    def edges(self) -> Iterator[tuple[int, int, int]]:
        """Yield ``(edge_id, u, v)`` for live edges in id order."""
        for eid in sorted(self._ends):
            u, v = self._ends[eid]
            yield eid, u, v

    def edge_array(self) -> np.ndarray:
        """Live edges as an ``(m, 2)`` int array, ordered by edge id."""
        if not self._ends:
            return np.zeros((0, 2), dtype=np.int64)
        return np.array([self._ends[e] for e in sorted(self._ends)], dtype=np.int64)

    def copy(self) -> "DynamicMultigraph":
        g = DynamicMultigraph(self.n)
        g._inc = [list(i) for i in self._inc]
        g._ends = dict(self._ends)
        g._slot = {e: list(s) for e, s in self._slot.items()}
        g._next_id = self._next_id
        return g

    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """``(indptr, neighbors)`` arrays with one entry per incidence (multi-edges repeated)."""
        deg = self.degrees()
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(deg, out=indptr[1:])
        nbrs = np.fromiter(
            (w for inc in self._inc for _, w in inc), dtype=np.int64, count=int(indptr[-1])
        )
        return indptr, nbrs

    def components(self) -> np.ndarray:
        """Component label for every vertex."""
        from scipy.sparse import coo_matrix
        from scipy.sparse.csgraph import connected_components

        e = self.edge_array()
        adj = coo_matrix((np.ones(len(e)), (e[:, 0], e[:, 1])), shape=(self.n, self.n))
        _, labels = connected_components(adj, directed=False)
        return labels

    def check_invariants(self) -> None:
        """Full rescan of the incidence structure; raises AssertionError on mismatch."""
        total = 0
        for x, inc in enumerate(self._inc):
            total += len(inc)
            for slot, (eid, w) in enumerate(inc):
                a, b = self._ends[eid]
                assert x in (a, b) and w == (b if x == a else a)
                assert self._slot[eid][0 if x == a else 1] == slot
        assert total == 2 * self.m
        for eid, (a, b) in self._ends.items():
            assert sum(1 for e, _ in self._inc[a] if e == eid) == 1
            assert sum(1 for e, _ in self._inc[b] if e == eid) == 1

    def __repr__(self) -> str:
        return f"DynamicMultigraph(n={self.n}, m={self.m})"


def read_graph(path: str | Path) -> DynamicMultigraph:
    """Parse the ``n m`` header plus ``u v`` lines format."""
    lines = Path(path).read_text().splitlines()
    rows = [(i + 1, ln.split()) for i, ln in enumerate(lines)]
    rows = [(i, parts) for i, parts in rows if parts and not parts[0].startswith("#")]
    if not rows:
        raise ParseError("missing 'n m' header", 1)
    lineno, head = rows[0]
    try:
        n, m = (int(x) for x in head)
    except ValueError:
        raise ParseError("header must be 'n m'", lineno) from None
    body = rows[1:]
    if len(body) != m:
        raise ParseError(f"header declares {m} edges, found {len(body)}", lineno)
    g = DynamicMultigraph(n)
    for lineno, parts in body:
        try:
            u, v = (int(x) for x in parts)
        except ValueError:
            raise ParseError("edge line must be 'u v'", lineno) from None
        try:
            g.insert_edge(u, v)
        except (SelfLoopRejected, UnknownVertex) as exc:
            raise ParseError(str(exc), lineno) from None
    return g


def write_graph(g: DynamicMultigraph, path: str | Path) -> None:
    out = [f"{g.n} {g.m}"]
    out += [f"{u} {v}" for _, u, v in g.edges()]
    Path(path).write_text("\n".join(out) + "\n")
