"""Collection of terminal-shorted random walks with per-vertex and per-edge occurrence indexes.

A combined walk for an origin edge ``e = (u, v)`` is stored as two halves:
half 0 starts at ``u``, half 1 starts at ``v``, and each runs until it meets a
terminal or exhausts ``step_cap`` steps.  Read as one walk it is
``reversed(half0) + e + half1`` and its length counts ``e``.

Every vertex position gets a globally increasing tick when it is generated.
Indexes store ticks only, so they sort by generation time and, inside one
generated segment, by position; a side table maps each tick back to
``(walk_id, side, pos)``.  Edge occurrences reuse the tick of the step's
destination position; the origin edge gets its own tick under side ``2``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Sequence

import numpy as np
from .errors import InvalidPosition, RankOutOfRange, UnknownEdge, VertexNotOnWalk
from .graph import DynamicMultigraph, RandomStream
from .orderindex import OrderIndex

ORIGIN = 2


class Occurrence(NamedTuple):
    tick: int
    wid: int
    side: int
    pos: int


def extend_walk(
    g: DynamicMultigraph,
    verts: list[int],
    edges: list[int],
    member: Sequence[int],
    cap: int,
    rng: RandomStream,
) -> bool:
    """Continue a walk in place until it reaches a terminal or has ``cap`` steps.

    Returns True when the final vertex is a terminal.
    """
    inc = g._inc
    rnd = rng.random
    x = verts[-1]
    steps = len(edges)
    while not member[x]:
        if steps >= cap:
            return False
        nb = inc[x]
        if not nb:
            return False
        e, x = nb[int(rnd() * len(nb))]
        edges.append(e)
        verts.append(x)
        steps += 1
    return True


@dataclass(eq=False)
class Half:
    verts: list[int]
    edges: list[int]
    reached: bool
    ticks: list[int] = field(default_factory=list)

    @property
    def end(self) -> int:
        return self.verts[-1]

    @property
    def steps(self) -> int:
        return len(self.edges)


@dataclass(eq=False)
class Walk:
    origin: int
    replica: int
    halves: tuple[Half, Half]
    wid: int = -1
    origin_tick: int = -1
    # (t1, t2, length) of the H-edge this walk currently induces, if any
    hedge: tuple[int, int, int] | None = None

    @property
    def length(self) -> int:
        return self.halves[0].steps + self.halves[1].steps + 1

    @property
    def reached(self) -> bool:
        return self.halves[0].reached and self.halves[1].reached

    def terminal_edge(self) -> tuple[int, int, int] | None:
        if not self.reached:
            return None
        return self.halves[0].end, self.halves[1].end, self.length

    def sequence(self) -> tuple[list[int], list[int]]:
        """Combined ``(vertices, edges)`` from the half-0 end to the half-1 end."""
        h0, h1 = self.halves
        verts = h0.verts[::-1] + h1.verts
        edges = h0.edges[::-1] + [self.origin] + h1.edges
        return verts, edges


class WalkStore:
    """Walks plus the reverse indexes used to find them by vertex or edge."""

    def __init__(self, n: int):
        self.n = n
        self.walks: dict[int, Walk] = {}
        self._vidx = [OrderIndex() for _ in range(n)]
        self._eidx: dict[int, OrderIndex] = {}
        self._where: dict[int, tuple[int, int, int]] = {}
        self._tick = 0
        self._next_wid = 0
        self.generated_steps = 0
        self.truncated_steps = 0
        self.discarded_steps = 0

    # -- construction -------------------------------------------------------

    def new_walk(
        self,
        g: DynamicMultigraph,
        member: Sequence[int],
        origin: int,
        replica: int,
        step_cap: int,
        rng: RandomStream,
    ) -> Walk:
        u, v = g.endpoints(origin)
        halves = []
        for x in (u, v):
            verts, edges = [x], []
            reached = extend_walk(g, verts, edges, member, step_cap, rng)
            halves.append(Half(verts, edges, reached))
        walk = Walk(origin, replica, (halves[0], halves[1]))
        self.record_walk(walk)
        return walk

    def record_walk(self, walk: Walk) -> int:
        walk.wid = self._next_wid
        self._next_wid += 1
        walk.origin_tick = self._tick
        self._tick += 1
        self.walks[walk.wid] = walk
        self._edge_list(walk.origin).add(walk.origin_tick)
        self._where[walk.origin_tick] = (walk.wid, ORIGIN, 0)
        for side in (0, 1):
            h = walk.halves[side]
            h.ticks = []
            self._index_from(walk, side, 0)
            self.generated_steps += h.steps
        return walk.wid

    def remove_walk(self, wid: int) -> Walk:
        walk = self.walks.pop(wid)
        self._eidx[walk.origin].remove(walk.origin_tick)
        del self._where[walk.origin_tick]
        for side in (0, 1):
            self._unindex_from(walk, side, 0)
            self.discarded_steps += walk.halves[side].steps
        return walk

    # -- index plumbing -----------------------------------------------------

    def _edge_list(self, e: int) -> OrderIndex:
        sl = self._eidx.get(e)
        if sl is None:
            sl = self._eidx[e] = OrderIndex()
        return sl

    def _index_from(self, walk: Walk, side: int, lo: int) -> None:
        """Assign ticks to positions ``lo..`` and index them."""
        h = walk.halves[side]
        wid = walk.wid
        vidx = self._vidx
        where = self._where
        ticks = h.ticks
        verts, edges = h.verts, h.edges
        del ticks[lo:]
        tick = self._tick
        for p in range(lo, len(verts)):
            ticks.append(tick)
            where[tick] = (wid, side, p)
            vidx[verts[p]].add(tick)
            if p:
                self._edge_list(edges[p - 1]).add(tick)
            tick += 1
        self._tick = tick

    def _unindex_from(self, walk: Walk, side: int, lo: int) -> None:
        h = walk.halves[side]
        where = self._where
        for p in range(lo, len(h.verts)):
            t = h.ticks[p]
            del where[t]
            self._vidx[h.verts[p]].remove(t)
            if p:
                self._eidx[h.edges[p - 1]].remove(t)

    def _cut(self, walk: Walk, side: int, pos: int) -> int:
        """Drop positions after ``pos``; returns the number of steps removed."""
        h = walk.halves[side]
        if not 0 <= pos < len(h.verts):
            raise InvalidPosition(f"position {pos} outside half of length {h.steps}")
        self._unindex_from(walk, side, pos + 1)
        removed = h.steps - pos
        del h.verts[pos + 1 :]
        del h.edges[pos:]
        del h.ticks[pos + 1 :]
        return removed

    # -- mutation -----------------------------------------------------------

    def truncate_half(self, wid: int, side: int, pos: int) -> int:
        walk = self.walks[wid]
        removed = self._cut(walk, side, pos)
        walk.halves[side].reached = True
        self.truncated_steps += removed
        return removed

    def truncate_at_first(self, wid: int, u: int) -> int:
        """Cut every half of the walk at its first visit to ``u``, which becomes a terminal end."""
        walk = self.walks[wid]
        removed = 0
        found = False
        for side in (0, 1):
            verts = walk.halves[side].verts
            try:
                pos = verts.index(u)
            except ValueError:
                continue
            found = True
            removed += self.truncate_half(wid, side, pos)
        if not found:
            raise VertexNotOnWalk(f"vertex {u} not on walk {wid}")
        return removed

    def regenerate_suffix(
        self,
        wid: int,
        side: int,
        pos: int,
        forced_edge: int | None,
        g: DynamicMultigraph,
        member: Sequence[int],
        step_cap: int,
        rng: RandomStream,
    ) -> int:
        """Resample one half from ``pos`` onward in the current graph.

        With ``forced_edge`` the first new step crosses that edge.  Returns the
        number of fresh steps generated.
        """
        walk = self.walks[wid]
        h = walk.halves[side]
        if not 0 <= pos < len(h.verts):
            raise InvalidPosition(f"position {pos} outside half of length {h.steps}")
        x = h.verts[pos]
        if forced_edge is not None:
            a, b = g.endpoints(forced_edge)
            if x not in (a, b):
                raise InvalidPosition(f"edge {forced_edge} is not incident to {x}")
            if pos >= step_cap:
                raise InvalidPosition("no step budget left at this position")
        self.discarded_steps += self._cut(walk, side, pos)
        if forced_edge is not None:
            h.edges.append(forced_edge)
            h.verts.append(b if x == a else a)
        h.reached = extend_walk(g, h.verts, h.edges, member, step_cap, rng)
        fresh = h.steps - pos
        self.generated_steps += fresh
        self._index_from(walk, side, pos + 1)
        return fresh

    # -- queries ------------------------------------------------------------

    def vertex_index(self, u: int) -> OrderIndex:
        """The sorted occurrence ticks at ``u``; read-only for callers."""
        return self._vidx[u]

    def edge_index(self, e: int) -> OrderIndex:
        return self._eidx.get(e, _EMPTY)

    def locate(self, tick: int) -> tuple[int, int, int]:
        """``(walk_id, side, pos)`` of the vertex position (or origin) holding ``tick``."""
        return self._where[tick]

    def _vertex_occ(self, tick: int) -> Occurrence:
        return Occurrence(tick, *self._where[tick])

    def _edge_occ(self, tick: int) -> Occurrence:
        wid, side, p = self._where[tick]
        return Occurrence(tick, wid, side, 0 if side == ORIGIN else p - 1)

    def walks_through_vertex(self, u: int) -> Iterator[Occurrence]:
        return (self._vertex_occ(t) for t in list(self._vidx[u]))

    def walks_through_edge(self, e: int) -> Iterator[Occurrence]:
        """Edge occurrences; ``pos`` is the step index, or 0 with side 2 for the origin edge."""
        return (self._edge_occ(t) for t in list(self._eidx.get(e, ())))

    def select_occurrence(self, u: int, i: int) -> Occurrence:
        """The ``i``-th occurrence at vertex ``u`` in generation order, 1-based."""
        sl = self._vidx[u]
        if not 1 <= i <= len(sl):
            raise RankOutOfRange(f"rank {i} outside 1..{len(sl)}")
        return self._vertex_occ(sl[i - 1])

    def select_edge_occurrence(self, e: int, i: int) -> Occurrence:
        sl = self._eidx.get(e, _EMPTY)
        if not 1 <= i <= len(sl):
            raise RankOutOfRange(f"rank {i} outside 1..{len(sl)}")
        return self._edge_occ(sl[i - 1])

    def vertex_load(self, u: int) -> int:
        return len(self._vidx[u])

    def edge_load(self, e: int) -> int:
        return len(self._eidx.get(e, ()))

    def vertex_loads(self) -> np.ndarray:
        return np.array([len(s) for s in self._vidx], dtype=np.int64)

    def drop_edge_index(self, e: int) -> None:
        sl = self._eidx.get(e)
        if sl:
            raise UnknownEdge(f"edge {e} still carries {len(sl)} occurrences")
        self._eidx.pop(e, None)

    def __len__(self) -> int:
        return len(self.walks)

    # -- audits -------------------------------------------------------------

    def rescan(self) -> tuple[dict[int, set], dict[int, set]]:
        """Recompute all occurrences, as ``Occurrence`` sets, directly from the stored walks."""
        vert: dict[int, set] = {}
        edge: dict[int, set] = {}
        for wid, walk in self.walks.items():
            edge.setdefault(walk.origin, set()).add(Occurrence(walk.origin_tick, wid, ORIGIN, 0))
            for side, h in enumerate(walk.halves):
                assert len(h.ticks) == len(h.verts)
                for p, x in enumerate(h.verts):
                    vert.setdefault(x, set()).add(Occurrence(h.ticks[p], wid, side, p))
                    if p:
                        edge.setdefault(h.edges[p - 1], set()).add(
                            Occurrence(h.ticks[p], wid, side, p - 1)
                        )
        return vert, edge

    def audit(self) -> None:
        """Raise AssertionError unless the indexes equal a full rescan."""
        vert, edge = self.rescan()
        for u in range(self.n):
            got = list(self.walks_through_vertex(u))
            assert set(got) == vert.get(u, set()), f"vertex {u} index mismatch"
            assert len(set(got)) == len(got)
        live = {e for e, sl in self._eidx.items() if sl}
        assert live == set(edge), "edge index key mismatch"
        for e in live:
            got = list(self.walks_through_edge(e))
            assert set(got) == edge[e], f"edge {e} index mismatch"
            assert len(set(got)) == len(got)
        n_pos = sum(len(h.verts) for w in self.walks.values() for h in w.halves)
        assert len(self._where) == n_pos + len(self.walks)
        assert self.truncated_steps + self.discarded_steps <= self.generated_steps

    def check_walks(self, g: DynamicMultigraph, member: Sequence[int], step_cap: int) -> None:
        """Structural checks of every walk against the current graph and terminals."""
        for walk in self.walks.values():
            assert g.has_edge(walk.origin)
            u, v = g.endpoints(walk.origin)
            assert walk.halves[0].verts[0] == u and walk.halves[1].verts[0] == v
            assert 1 <= walk.length <= 2 * step_cap + 1
            for h in walk.halves:
                for p, e in enumerate(h.edges):
                    a, b = g.endpoints(e)
                    assert {a, b} == {h.verts[p], h.verts[p + 1]}
                assert not any(member[x] for x in h.verts[:-1])
                assert h.reached == bool(member[h.end])

    def dump(self) -> str:
        """One line per walk: ``wid origin replica status0 status1 : v0 e0 v1 ... vk``."""
        lines = []
        for wid in sorted(self.walks):
            walk = self.walks[wid]
            stat = [("T=" if h.reached else "C=") + str(h.end) for h in walk.halves]
            verts, edges = walk.sequence()
            seq = [str(verts[0])]
            for e, x in zip(edges, verts[1:]):
                seq += [str(e), str(x)]
            lines.append(f"{wid} {walk.origin} {walk.replica} {stat[0]} {stat[1]} : {' '.join(seq)}")
        return "\n".join(lines) + ("\n" if lines else "")


_EMPTY = OrderIndex()


def parse_dump(text: str) -> list[dict]:
    out = []
    for line in text.splitlines():
        if not line.strip():
            continue
        head, seq = line.split(":")
        wid, origin, replica, s0, s1 = head.split()
        toks = [int(x) for x in seq.split()]
        out.append(
            {
                "wid": int(wid),
                "origin": int(origin),
                "replica": int(replica),
                "status": (s0, s1),
                "verts": toks[0::2],
                "edges": toks[1::2],
            }
        )
    return out


def occurrence_counts(walks: Sequence[dict]) -> tuple[Counter, Counter]:
    """Vertex and edge occurrence counts recomputed from parsed dump records."""
    vc: Counter = Counter()
    ec: Counter = Counter()
    for w in walks:
        vc.update(w["verts"])
        ec.update(w["edges"])
    return vc, ec


def load_conservation(
    g: DynamicMultigraph, horizon: int, walks_per_vertex: int, rng: RandomStream
) -> np.ndarray:
    """Monte Carlo estimate of ``sum_u deg(u) P[walk from u sits at x after t steps]``.

    Returns an array of shape ``(horizon + 1, n)``; row ``t`` should equal the
    degree vector for every ``t``.
    """
    indptr, nbrs = g.csr()
    deg = np.diff(indptr)
    gen = np.random.default_rng(rng.getrandbits(64))
    out = np.zeros((horizon + 1, g.n))
    for u in np.flatnonzero(deg):
        x = np.full(walks_per_vertex, u, dtype=np.int64)
        scale = deg[u] / walks_per_vertex
        out[0] += scale * np.bincount(x, minlength=g.n)
        for t in range(1, horizon + 1):
            d = deg[x]
            x = nbrs[indptr[x] + (gen.random(walks_per_vertex) * d).astype(np.int64)]
            out[t] += scale * np.bincount(x, minlength=g.n)
    return out
