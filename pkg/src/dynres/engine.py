"""Two-level effective-resistance engine: sampled terminals, dynamic sketch, periodic rebuilds."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from .dynamic import DynamicSC
from .errors import (
    Disconnected,
    PairNotRegistered,
    TerminalBudgetExceeded,
    UnknownVertex,
    WrongMode,
)
from .graph import DynamicMultigraph
from .numerics import SolveOptions, assemble, effective_resistance, sparsify_by_leverage
from .schur import TerminalSet, default_rho, default_step_cap

MODES = ("edge", "vertex", "explicit")


@dataclass(frozen=True)
class EngineConfig:
    eps: float = 0.25
    mode: str = "edge"
    beta: float | None = None
    terminals: tuple[int, ...] = ()
    c_rho: float = 1.0
    c_len: float = 1.0
    rebuild_factor: float = 1.0
    solve: SolveOptions = field(default_factory=SolveOptions)
    seed: int = 0
    resparsify: bool = False
    resparsify_threshold: int | None = None
    delete_policy: str = "first_use"
    rho: int | None = None
    step_cap: int | None = None

    def __post_init__(self):
        if not 0 < self.eps < 1:
            raise ValueError("eps must lie in (0, 1)")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.beta is not None and not 0 < self.beta <= 1:
            raise ValueError("beta must lie in (0, 1]")
        if self.mode != "explicit" and self.terminals:
            raise ValueError("an explicit terminal list requires mode='explicit'")
        if self.rebuild_factor <= 0:
            raise ValueError("rebuild_factor must be positive")

    @property
    def eps_sketch(self) -> float:
        return self.eps / 2

    @property
    def eps_sparsify(self) -> float:
        return self.eps / 4


class _Components:
    """Union-find over live edges; recomputed from scratch after deletions."""

    def __init__(self, graph: DynamicMultigraph):
        self.graph = graph
        self.parent: list[int] | None = None

    def _find(self, x: int) -> int:
        p = self.parent
        root = x
        while p[root] != root:
            root = p[root]
        while p[x] != root:
            p[x], x = root, p[x]
        return root

    def union(self, u: int, v: int) -> None:
        if self.parent is None:
            return
        a, b = self._find(u), self._find(v)
        if a != b:
            self.parent[a] = b

    def invalidate(self) -> None:
        self.parent = None

    def connected(self, u: int, v: int) -> bool:
        if self.parent is None:
            self.parent = [int(x) for x in self.graph.components()]
            # labels are valid roots once each label points at itself
            roots = {}
            for x, lab in enumerate(self.parent):
                roots.setdefault(lab, x)
            self.parent = [roots[lab] for lab in self.parent]
        return self._find(u) == self._find(v)


class ErEngine:
    """Maintains (1 +- eps)-approximate effective resistances under edge updates.

    Queries make both endpoints terminals and solve on the aggregated sketch.
    After ``ceil(rebuild_factor * beta * m)`` query-driven terminal additions
    the terminal set is resampled and the sketch rebuilt from scratch.
    """

    def __init__(self, graph: DynamicMultigraph, config: EngineConfig | None = None):
        self.graph = graph
        self.config = config or EngineConfig()
        self.rng = random.Random(self.config.seed)
        self.pinned: list[int] = []
        self.pairs: set[tuple[int, int]] = set()
        self.rebuilds = 0
        self.last_churn = 0
        self._components = _Components(graph)
        self._build()

    # -- setup --------------------------------------------------------------

    def _default_beta(self) -> float:
        if self.config.beta is not None:
            return self.config.beta
        if self.config.mode == "vertex":
            return max(self.graph.n, 1) ** (-1 / 7)
        return max(self.graph.m, 1) ** (-1 / 5)

    def _sample_terminals(self, beta: float) -> TerminalSet:
        g, cfg, rnd = self.graph, self.config, self.rng.random
        T = TerminalSet(g.n)
        if cfg.mode == "edge":
            for _, u, v in g.edges():
                if rnd() < beta:
                    T.add(u)
                    T.add(v)
        elif cfg.mode == "vertex":
            for x in range(g.n):
                if rnd() < beta:
                    T.add(x)
        else:
            for x in cfg.terminals:
                T.add(x)
        for x in self.pinned:
            T.add(x)
        return T

    def _build(self) -> None:
        cfg, g = self.config, self.graph
        self.beta = self._default_beta()
        terminals = self._sample_terminals(self.beta)
        vertex_mode = cfg.mode == "vertex"
        rho = cfg.rho if cfg.rho is not None else default_rho(g.n, cfg.eps_sketch, cfg.c_rho)
        cap = cfg.step_cap
        if cap is None:
            cap = default_step_cap(g.n, self.beta, cfg.c_len, vertex_mode=vertex_mode)
        self.sc = DynamicSC.initialize(
            g,
            terminals,
            self.beta,
            cfg.eps_sketch,
            self.rng,
            rho=rho,
            step_cap=cap,
            terminal_coins=cfg.mode == "edge",
            delete_policy=cfg.delete_policy,
        )
        self.sc.drain_changes()
        self.m_at_build = max(g.m, 1)
        self.query_additions = 0
        self.rebuild_threshold = math.ceil(cfg.rebuild_factor * self.beta * self.m_at_build)
        self.terminals_after_build = len(terminals)

    def rebuild(self) -> None:
        self._build()
        self.rebuilds += 1

    @property
    def terminals(self) -> TerminalSet:
        return self.sc.terminals

    @property
    def rho(self) -> int:
        return self.sc.rho

    @property
    def step_cap(self) -> int:
        return self.sc.step_cap

    # -- updates ------------------------------------------------------------

    def insert(self, u: int, v: int) -> int:
        eid = self.sc.insert(u, v)
        self._components.union(u, v)
        self._after_update()
        return eid

    def delete(self, eid: int) -> None:
        self.sc.delete(eid)
        self._components.invalidate()
        self._after_update()

    def _after_update(self) -> None:
        self.last_churn = len(self.sc.drain_changes())
        self._check_terminal_budget()

    def terminal_budget(self) -> float:
        n = max(self.graph.n, 2)
        m = max(self.m_at_build, self.graph.m)
        return 8 * self.beta * m + 4 * math.log2(n) + 4

    def _check_terminal_budget(self) -> None:
        if self.config.mode == "edge" and len(self.terminals) > self.terminal_budget():
            raise TerminalBudgetExceeded(
                f"|T| = {len(self.terminals)} exceeds {self.terminal_budget():.1f}"
            )

    # -- queries ------------------------------------------------------------

    def register_pair(self, s: int, t: int) -> None:
        if self.config.mode != "vertex":
            raise WrongMode("fixed query pairs exist only in vertex mode")
        for x in (s, t):
            if not 0 <= x < self.graph.n:
                raise UnknownVertex(x)
            if x not in self.pinned:
                self.pinned.append(x)
            self.sc.add_terminal(x)
        self.sc.drain_changes()
        self.pairs.add((min(s, t), max(s, t)))

    def effective_resistance(self, s: int, t: int) -> float:
        n = self.graph.n
        for x in (s, t):
            if not 0 <= x < n:
                raise UnknownVertex(x)
        if s == t:
            return 0.0
        cfg = self.config
        if cfg.mode == "vertex" and (min(s, t), max(s, t)) not in self.pairs:
            raise PairNotRegistered((s, t))
        if not self._components.connected(s, t):
            raise Disconnected(f"{s} and {t} are in different components")
        added = int(self.sc.add_terminal(s)) + int(self.sc.add_terminal(t))
        if cfg.mode != "vertex":
            self.query_additions += added
        self.last_churn = len(self.sc.drain_changes())
        view = self.sc.sketch_view()
        threshold = cfg.resparsify_threshold
        if threshold is None:
            threshold = math.ceil(20 * n * math.log2(max(n, 2)) / cfg.eps**2)
        if cfg.resparsify and len(view) > threshold:
            view = sparsify_by_leverage(view, cfg.eps_sparsify, self.rng)
        sys = assemble(view)
        if sys.labels[s] != sys.labels[t]:
            raise Disconnected(f"sketch separates {s} and {t}; walks failed to reach terminals")
        value = effective_resistance(sys, s, t, cfg.solve)
        self._check_terminal_budget()
        if cfg.mode != "vertex" and self.query_additions >= self.rebuild_threshold:
            self.rebuild()
        return value
