"""Update/query streams: parsing, validation against a graph, and synthetic generation."""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .errors import InfeasibleParams, ParseError, StreamInvalid
from .graph import DynamicMultigraph

KINDS = ("erdos-renyi", "ring", "barbell", "multi-parallel")


@dataclass(frozen=True)
class Event:
    op: str  # "I", "D" or "Q"
    a: int
    b: int
    line: int = 0

    def render(self) -> str:
        return f"{self.op} {self.a} {self.b}"


def parse_stream(text: str) -> list[Event]:
    """Parse ``I u v`` / ``D u v`` / ``Q s t`` lines; ``#`` starts a comment."""
    out = []
    for i, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].split()
        if not body:
            continue
        if len(body) != 3 or body[0] not in ("I", "D", "Q"):
            raise ParseError(f"expected 'I|D|Q a b', got {raw.strip()!r}", i)
        try:
            a, b = int(body[1]), int(body[2])
        except ValueError:
            raise ParseError(f"non-integer vertex in {raw.strip()!r}", i) from None
        out.append(Event(body[0], a, b, i))
    return out


def read_stream(path: str | Path) -> list[Event]:
    return parse_stream(Path(path).read_text())


def write_stream(events: Iterable[Event], path: str | Path) -> None:
    Path(path).write_text("".join(ev.render() + "\n" for ev in events))


def _pair(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


def validate_stream(events: list[Event], n: int, initial: Iterable[tuple[int, int]]) -> None:
    """Raise StreamInvalid at the first event that could not be applied.

    Only multiplicities per vertex pair are simulated, so the caller's graph
    is never touched.
    """
    live: dict[tuple[int, int], int] = {}
    for u, v in initial:
        live[_pair(u, v)] = live.get(_pair(u, v), 0) + 1
    for ev in events:
        for x in (ev.a, ev.b):
            if not 0 <= x < n:
                raise StreamInvalid(f"vertex {x} outside 0..{n - 1}", ev.line)
        key = _pair(ev.a, ev.b)
        if ev.op == "I":
            if ev.a == ev.b:
                raise StreamInvalid(f"self-loop insert at vertex {ev.a}", ev.line)
            live[key] = live.get(key, 0) + 1
        elif ev.op == "D":
            if not live.get(key):
                raise StreamInvalid(f"delete of ({ev.a}, {ev.b}) matches no live edge", ev.line)
            live[key] -= 1


class EdgeResolver:
    """Maps endpoint pairs to live edge ids, newest first (LIFO over parallel edges)."""

    def __init__(self, g: DynamicMultigraph):
        self._stacks: dict[tuple[int, int], list[int]] = {}
        for eid, u, v in g.edges():
            self.push(u, v, eid)

    def push(self, u: int, v: int, eid: int) -> None:
        self._stacks.setdefault(_pair(u, v), []).append(eid)

    def pop(self, u: int, v: int) -> int:
        stack = self._stacks.get(_pair(u, v))
        if not stack:
            raise StreamInvalid(f"no live edge between {u} and {v}")
        return stack.pop()


# -- generation ---------------------------------------------------------------


def _ring(n: int) -> list[tuple[int, int]]:
    if n < 3:
        raise InfeasibleParams("a ring needs n >= 3")
    return [(i, (i + 1) % n) for i in range(n)]


def _barbell(n: int) -> list[tuple[int, int]]:
    """Two cliques of size n // 2 joined through a bridge (plus a middle vertex when n is odd)."""
    k = n // 2
    if k < 3:
        raise InfeasibleParams("a barbell needs n >= 6")
    edges = [(i, j) for i in range(k) for j in range(i + 1, k)]
    edges += [(k + i, k + j) for i in range(k) for j in range(i + 1, k)]
    if n % 2:
        edges += [(k - 1, n - 1), (n - 1, k)]
    else:
        edges.append((k - 1, k))
    return edges


def _multi_parallel(n: int, parallel: int) -> list[tuple[int, int]]:
    """A path whose middle edge is replaced by ``parallel`` parallel copies."""
    if n < 2 or parallel < 1:
        raise InfeasibleParams("multi-parallel needs n >= 2 and parallel >= 1")
    mid = (n - 1) // 2
    edges = []
    for i in range(n - 1):
        edges += [(i, i + 1)] * (parallel if i == mid else 1)
    return edges


def _erdos_renyi(n: int, m: int, rng: random.Random) -> list[tuple[int, int]]:
    """``m`` distinct pairs; a random spanning tree comes first whenever ``m >= n - 1``."""
    if n < 2 and m > 0:
        raise InfeasibleParams("edges need at least two vertices")
    if m < 0 or m > n * (n - 1) // 2:
        raise InfeasibleParams(f"m={m} outside 0..{n * (n - 1) // 2}")
    chosen: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    if m >= n - 1:
        order = list(range(n))
        rng.shuffle(order)
        for i in range(1, n):
            e = _pair(order[i], order[rng.randrange(i)])
            seen.add(e)
            chosen.append(e)
    while len(chosen) < m:
        a, b = rng.sample(range(n), 2)
        e = _pair(a, b)
        if e not in seen:
            seen.add(e)
            chosen.append(e)
    return chosen


def generate_graph(
    kind: str, n: int, m: int | None = None, parallel: int = 2, seed: int = 0
) -> DynamicMultigraph:
    rng = random.Random(seed)
    if kind == "erdos-renyi":
        edges = _erdos_renyi(n, 2 * n if m is None else m, rng)
    elif kind == "ring":
        edges = _ring(n)
    elif kind == "barbell":
        edges = _barbell(n)
    elif kind == "multi-parallel":
        edges = _multi_parallel(n, parallel)
    else:
        raise InfeasibleParams(f"unknown graph kind {kind!r}; expected one of {KINDS}")
    return DynamicMultigraph(n, edges)


def generate_stream(
    g: DynamicMultigraph,
    ops: int,
    seed: int = 0,
    ratios: tuple[float, float, float] = (0.4, 0.4, 0.2),
) -> list[Event]:
    """Random mix of inserts, deletes and queries; deletes always name a live pair."""
    if ops < 0 or any(r < 0 for r in ratios) or sum(ratios) <= 0:
        raise InfeasibleParams("ops and ratios must be non-negative with a positive ratio sum")
    if ops and g.n < 2:
        raise InfeasibleParams("streams need at least two vertices")
    rng = random.Random(seed)
    live = [(u, v) for _, u, v in g.edges()]
    out = []
    for i in range(ops):
        op = rng.choices("IDQ", weights=ratios)[0]
        if op == "D" and not live:
            op = "I"
        if op == "D":
            j = rng.randrange(len(live))
            live[j], live[-1] = live[-1], live[j]
            u, v = live.pop()
        else:
            u, v = rng.sample(range(g.n), 2)
            if op == "I":
                live.append((u, v))
        out.append(Event(op, u, v, i + 1))
    return out
