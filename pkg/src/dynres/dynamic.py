"""Dynamic maintenance of the random-walk Schur complement sketch under graph updates."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Union

from .errors import SmallInstanceWarning
from .graph import DynamicMultigraph, RandomStream
from .numerics import WeightedGraphView
from .schur import SchurSketch, TerminalSet, default_rho, default_step_cap
from .walks import ORIGIN, Walk, WalkStore


@dataclass(frozen=True)
class AddEdge:
    handle: int
    t1: int
    t2: int
    weight: float


@dataclass(frozen=True)
class RemoveEdge:
    handle: int


@dataclass(frozen=True)
class Reweight:
    handle: int
    weight: float


Change = Union[AddEdge, RemoveEdge, Reweight]


def geometric_skip(d: int, rng: RandomStream) -> int:
    """Number of failures before the first success of a Bernoulli(1/d) sequence."""
    if d <= 1:
        return 0
    x = rng.random()
    return int(math.log1p(-x) / math.log1p(-1.0 / d))


def geometric_sites(count: int, d: int, rng: RandomStream) -> list[int]:
    """Indexes in ``range(count)`` selected by independent Bernoulli(1/d) coins.

    Only the successes are visited: each draw jumps over a geometric number
    of failures.
    """
    out = []
    r = geometric_skip(d, rng)
    while r < count:
        out.append(r)
        r += 1 + geometric_skip(d, rng)
    return out


def replay_changes(changes, n: int, rho: int) -> SchurSketch:
    """Rebuild a sketch from nothing by applying a change log."""
    sk = SchurSketch(n, rho)
    pending: dict[int, tuple[int, int]] = {}
    for ev in changes:
        if isinstance(ev, AddEdge):
            ell = round(1.0 / (rho * ev.weight))
            sk.set(ev.handle, ev.t1, ev.t2, ell)
            pending[ev.handle] = (ev.t1, ev.t2)
        elif isinstance(ev, Reweight):
            t1, t2 = pending[ev.handle]
            sk.set(ev.handle, t1, t2, round(1.0 / (rho * ev.weight)))
        else:
            sk.remove(ev.handle)
            pending.pop(ev.handle)
    return sk


class DynamicSC:
    """Sketch ``H`` of the Schur complement of ``G`` onto ``T``, kept current under updates.

    Every live edge owns ``rho`` combined walks; a walk whose two halves
    both end in T induces exactly one H-edge, keyed by the walk id.

    ``delete_policy`` picks where a walk that crossed a deleted edge is
    resampled from: ``"first_use"`` (default) restarts at the position just
    before the walk's first crossing of that edge; ``"first_visit"`` restarts at
    the walk's first visit to either endpoint.
    """

    def __init__(
        self,
        graph: DynamicMultigraph,
        terminals: TerminalSet,
        rho: int,
        step_cap: int,
        rng: RandomStream,
        beta: float = 1.0,
        terminal_coins: bool = True,
        delete_policy: str = "first_use",
        sink: Callable[[Change], None] | None = None,
    ):
        if delete_policy not in ("first_use", "first_visit"):
            raise ValueError(f"unknown delete policy {delete_policy!r}")
        self.graph = graph
        self.terminals = terminals
        self.rho = rho
        self.step_cap = step_cap
        self.beta = beta
        self.rng = rng
        self.terminal_coins = terminal_coins
        self.delete_policy = delete_policy
        self.store = WalkStore(graph.n)
        self.sketch = SchurSketch(graph.n, rho)
        self._log: list[Change] = []
        self._sink = sink if sink is not None else self._log.append
        self.rerouted = 0

    @classmethod
    def initialize(
        cls,
        graph: DynamicMultigraph,
        terminals: TerminalSet,
        beta: float,
        eps: float,
        rng: RandomStream,
        c_rho: float = 1.0,
        c_len: float = 1.0,
        rho: int | None = None,
        step_cap: int | None = None,
        **kwargs,
    ) -> "DynamicSC":
        if not 0 < beta <= 1:
            raise ValueError("beta must lie in (0, 1]")
        n = graph.n
        if graph.m and beta * graph.m < math.log2(max(n, 2)):
            warnings.warn(
                f"beta*m = {beta * graph.m:.2f} is below log2 n; hitting bounds do not apply",
                SmallInstanceWarning,
                stacklevel=2,
            )
        rho = rho if rho is not None else default_rho(n, eps, c_rho)
        step_cap = step_cap if step_cap is not None else default_step_cap(n, beta, c_len)
        sc = cls(graph, terminals, rho, step_cap, rng, beta=beta, **kwargs)
        for eid, _, _ in graph.edges():
            sc._spawn(eid)
        return sc

    # -- sketch bookkeeping -------------------------------------------------

    def _spawn(self, eid: int) -> None:
        member = self.terminals.member
        for i in range(1, self.rho + 1):
            walk = self.store.new_walk(self.graph, member, eid, i, self.step_cap, self.rng)
            self._sync(walk)

    def _sync(self, walk: Walk) -> None:
        """Bring the walk's H-edge in line with its current shape and log the change."""
        old = walk.hedge
        new = walk.terminal_edge()
        walk.hedge = new
        h = walk.wid
        if new is None:
            if old is not None:
                self.sketch.remove(h)
                self._sink(RemoveEdge(h))
            return
        t1, t2, ell = new
        self.sketch.set(h, t1, t2, ell)
        w = self.sketch.weight_of(ell)
        if old is not None and old[:2] == new[:2]:
            self._sink(Reweight(h, w))
        else:
            self._sink(AddEdge(h, t1, t2, w))

    def _drop(self, wid: int) -> None:
        walk = self.store.remove_walk(wid)
        if walk.hedge is not None:
            self.sketch.remove(wid)
            self._sink(RemoveEdge(wid))

    # -- operations ---------------------------------------------------------

    def add_terminal(self, u: int) -> bool:
        """Make ``u`` a terminal and cut every walk at its first visit to ``u``."""
        if not self.terminals.add(u):
            return False
        first: dict[tuple[int, int], int] = {}
        for occ in self.store.walks_through_vertex(u):
            key = (occ.wid, occ.side)
            if key not in first or occ.pos < first[key]:
                first[key] = occ.pos
        touched = set()
        for (wid, side), pos in first.items():
            self.store.truncate_half(wid, side, pos)
            touched.add(wid)
        for wid in sorted(touched):
            self._sync(self.store.walks[wid])
        return True

    def insert(self, u: int, v: int) -> int:
        if self.terminal_coins and self.rng.random() < self.beta:
            self.add_terminal(u)
            self.add_terminal(v)
        g = self.graph
        eid = g.insert_edge(u, v)
        # occurrences generated from here on already see the new edge
        frontier = self.store._tick
        self._spawn(eid)
        for x in (u, v):
            self._reroute_through(x, eid, frontier)
        return eid

    def _reroute_through(self, x: int, eid: int, frontier: int) -> None:
        """Send each pre-insert step out of ``x`` across ``eid`` with probability 1/deg(x)."""
        d = self.graph.degree(x)
        sl = self.store.vertex_index(x)
        member = self.terminals.member
        r = 0
        while True:
            r += geometric_skip(d, self.rng)
            if r >= sl.bisect_left(frontier):
                return
            wid, side, pos = self.store.locate(sl[r])
            walk = self.store.walks[wid]
            # the last position of a half takes no step, so its coin is moot
            if pos < walk.halves[side].steps:
                self.store.regenerate_suffix(
                    wid, side, pos, eid, self.graph, member, self.step_cap, self.rng
                )
                self.rerouted += 1
                self._sync(walk)
            r += 1

    def delete(self, eid: int) -> None:
        g = self.graph
        u, v = g.endpoints(eid)
        occs = list(self.store.walks_through_edge(eid))
        g.delete_edge(eid)
        restart: dict[tuple[int, int], int] = {}
        origin_walks = []
        for occ in occs:
            if occ.side == ORIGIN:
                origin_walks.append(occ.wid)
                continue
            key = (occ.wid, occ.side)
            if key not in restart or occ.pos < restart[key]:
                restart[key] = occ.pos
        for wid in origin_walks:
            self._drop(wid)
        member = self.terminals.member
        touched = set()
        for (wid, side), pos in sorted(restart.items()):
            if wid not in self.store.walks:
                continue
            if self.delete_policy == "first_visit":
                verts = self.store.walks[wid].halves[side].verts
                pos = next(p for p, x in enumerate(verts) if x == u or x == v)
            self.store.regenerate_suffix(wid, side, pos, None, g, member, self.step_cap, self.rng)
            touched.add(wid)
        for wid in sorted(touched):
            self._sync(self.store.walks[wid])
        self.store.drop_edge_index(eid)

    # -- views --------------------------------------------------------------

    def sketch_view(self) -> WeightedGraphView:
        return self.sketch.view()

    def change_log(self) -> list[Change]:
        return self._log

    def drain_changes(self) -> list[Change]:
        out, self._log[:] = list(self._log), []
        return out

    def capped_walks(self) -> int:
        return sum(1 for w in self.store.walks.values() if not w.reached)

    def audit(self) -> None:
        """Full consistency check of walks, indexes, and the walk/H-edge correspondence."""
        self.store.audit()
        self.store.check_walks(self.graph, self.terminals.member, self.step_cap)
        reaching = {wid for wid, w in self.store.walks.items() if w.reached}
        assert reaching == set(self.sketch.edges)
        for wid in reaching:
            w = self.store.walks[wid]
            assert self.sketch.edges[wid] == w.terminal_edge() == w.hedge
            assert self.terminals.member[w.hedge[0]] and self.terminals.member[w.hedge[1]]
        per_edge: dict[int, int] = {}
        for w in self.store.walks.values():
            per_edge[w.origin] = per_edge.get(w.origin, 0) + 1
        assert all(per_edge.get(e, 0) == self.rho for e, _, _ in self.graph.edges())
