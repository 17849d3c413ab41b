"""Schur complements onto a terminal set: exact elimination, walk sums, and the sampled sketch."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import TooLarge, UnknownVertex
from .graph import DynamicMultigraph, RandomStream
from .numerics import DENSE_CAP, WeightedGraphView
from .walks import extend_walk


class TerminalSet:
    """Membership flags plus insertion-ordered member list."""

    def __init__(self, n: int, members: Iterable[int] = ()):
        self.n = n
        self.member = bytearray(n)
        self._order: list[int] = []
        for x in members:
            self.add(x)

    def add(self, x: int) -> bool:
        """Insert ``x``; returns False if it was already present."""
        if not 0 <= x < self.n:
            raise UnknownVertex(x)
        if self.member[x]:
            return False
        self.member[x] = 1
        self._order.append(x)
        return True

    def __contains__(self, x: int) -> bool:
        return bool(self.member[x])

    def __iter__(self) -> Iterator[int]:
        return iter(self._order)

    def __len__(self) -> int:
        return len(self._order)

    def copy(self) -> "TerminalSet":
        return TerminalSet(self.n, self._order)

    def __repr__(self) -> str:
        return f"TerminalSet({self._order})"


def default_rho(n: int, eps: float, c_rho: float = 1.0) -> int:
    return max(1, math.ceil(c_rho * math.log2(max(n, 2)) / eps**2))


def default_step_cap(n: int, beta: float, c_len: float = 1.0, vertex_mode: bool = False) -> int:
    """``c_len beta^-2 log^3 n`` steps, or ``c_len beta^-3 log^4 n`` for vertex sampling."""
    lg = math.log2(max(n, 2))
    if vertex_mode:
        return max(1, math.ceil(c_len * beta**-3 * lg**4))
    return max(1, math.ceil(c_len * beta**-2 * lg**3))


@dataclass
class ExactSchur:
    """Dense Laplacian over the terminals, indexed in ``terminals`` order."""

    terminals: list[int]
    L: np.ndarray

    def index(self, x: int) -> int:
        return self.terminals.index(x)

    def weight(self, a: int, b: int) -> float:
        return -float(self.L[self.index(a), self.index(b)])

    def pinv(self) -> np.ndarray:
        return np.linalg.pinv(self.L, hermitian=True)

    def effective_resistance(self, a: int, b: int) -> float:
        P = self.pinv()
        i, j = self.index(a), self.index(b)
        return float(P[i, i] + P[j, j] - 2 * P[i, j])


def dense_laplacian(g: DynamicMultigraph) -> np.ndarray:
    L = np.zeros((g.n, g.n))
    for _, u, v in g.edges():
        L[u, v] -= 1
        L[v, u] -= 1
        L[u, u] += 1
        L[v, v] += 1
    return L


def exact_schur(g: DynamicMultigraph, terminals: TerminalSet) -> ExactSchur:
    """Eliminate every non-terminal vertex algebraically.

    Non-terminal components that touch no terminal are decoupled from T and
    are dropped; on the rest the ``F x F`` block is nonsingular.
    """
    if g.n > DENSE_CAP:
        raise TooLarge(f"{g.n} vertices exceeds the dense cap {DENSE_CAP}")
    L = dense_laplacian(g)
    T = list(terminals)
    F = np.array([x for x in range(g.n) if x not in terminals], dtype=np.int64)
    LTT = L[np.ix_(T, T)]
    if len(F) == 0 or len(T) == 0:
        return ExactSchur(T, LTT)
    LFF = L[np.ix_(F, F)]
    LFT = L[np.ix_(F, T)]
    _, labels = connected_components(np.abs(LFF) > 0, directed=False)
    touches = {labels[i] for i in np.flatnonzero(np.any(LFT != 0, axis=1))}
    keep = np.array([labels[i] in touches for i in range(len(F))])
    if not keep.any():
        return ExactSchur(T, LTT)
    X = np.linalg.solve(LFF[np.ix_(keep, keep)], LFT[keep])
    S = LTT - LFT[keep].T @ X
    return ExactSchur(T, (S + S.T) / 2)


def enumerate_terminal_free_walks(
    g: DynamicMultigraph, terminals: TerminalSet, max_len: int
) -> ExactSchur:
    """Sum of terminal-free walk weights with at most ``max_len`` interior vertices.

    A walk ``t0, x1, ..., xk, t1`` with interior vertices outside T contributes
    an edge ``(t0, t1)`` of weight ``prod 1/deg(x_i)``.  Each undirected walk is
    counted once; closed walks only add self-loops and are skipped.  The sum
    is carried out by propagating walk weights one interior vertex at a time.
    """
    if g.n > 12 or max_len > 32:
        raise TooLarge("walk enumeration is limited to 12 vertices and length 32")
    n = g.n
    A = np.zeros((n, n))
    for _, u, v in g.edges():
        A[u, v] += 1
        A[v, u] += 1
    deg = A.sum(axis=1)
    T = list(terminals)
    free = np.array([0.0 if x in terminals else 1.0 for x in range(n)])
    inv = np.divide(free, deg, out=np.zeros(n), where=deg > 0)
    M = np.zeros((len(T), len(T)))
    for i, a in enumerate(T):
        M[i] += A[a, T]
        f = A[a] * inv
        for _ in range(max_len):
            M[i] += f @ A[:, T]
            f = (f @ A) * inv
    np.fill_diagonal(M, 0.0)
    S = -M
    np.fill_diagonal(S, M.sum(axis=1))
    return ExactSchur(T, S)


class SchurSketch:
    """Weighted multigraph on the terminals, one edge per terminal-reaching walk.

    Each edge is stored as ``(t1, t2, length)`` and weighs ``1 / (rho * length)``.
    Pair totals are kept as integer counts per length so removals never
    accumulate rounding error.
    """

    def __init__(self, n: int, rho: int):
        self.n = n
        self.rho = rho
        self.edges: dict[int, tuple[int, int, int]] = {}
        self._agg: dict[tuple[int, int], Counter] = {}
        self.capped = 0

    def __len__(self) -> int:
        return len(self.edges)

    def weight_of(self, length: int) -> float:
        return 1.0 / (self.rho * length)

    def set(self, handle: int, t1: int, t2: int, length: int) -> None:
        if handle in self.edges:
            self.remove(handle)
        self.edges[handle] = (t1, t2, length)
        if t1 != t2:
            key = (t1, t2) if t1 < t2 else (t2, t1)
            c = self._agg.get(key)
            if c is None:
                c = self._agg[key] = Counter()
            c[length] += 1

    def remove(self, handle: int) -> None:
        t1, t2, length = self.edges.pop(handle)
        if t1 != t2:
            key = (t1, t2) if t1 < t2 else (t2, t1)
            c = self._agg[key]
            c[length] -= 1
            if not c[length]:
                del c[length]
                if not c:
                    del self._agg[key]

    def pair_weights(self) -> dict[tuple[int, int], float]:
        rho = self.rho
        return {
            key: sum(k / (rho * ell) for ell, k in sorted(c.items()))
            for key, c in sorted(self._agg.items())
        }

    def view(self) -> WeightedGraphView:
        pw = self.pair_weights()
        return WeightedGraphView.from_triples(self.n, ((a, b, w) for (a, b), w in pw.items()))

    def laplacian(self, order: list[int]) -> np.ndarray:
        """Dense aggregated Laplacian restricted to ``order``."""
        pos = {x: i for i, x in enumerate(order)}
        L = np.zeros((len(order), len(order)))
        for (a, b), w in self.pair_weights().items():
            i, j = pos[a], pos[b]
            L[i, j] -= w
            L[j, i] -= w
            L[i, i] += w
            L[j, j] += w
        return L


def sample_schur_sketch(
    g: DynamicMultigraph,
    terminals: TerminalSet,
    rho: int,
    step_cap: int,
    rng: RandomStream,
) -> SchurSketch:
    """Static random-walk sparsifier of the Schur complement onto ``terminals``.

    For every edge and each of ``rho`` replicas, walk from both endpoints
    until a terminal or ``step_cap`` steps; a combined walk of length ``l``
    whose halves both reach terminals adds an edge of weight ``1/(rho l)``.
    """
    if rho < 1 or step_cap < 1:
        raise ValueError("rho and step_cap must be positive")
    sketch = SchurSketch(g.n, rho)
    member = terminals.member
    handle = 0
    for _, u, v in g.edges():
        for _ in range(rho):
            va, ea = [u], []
            vb, eb = [v], []
            ok_a = extend_walk(g, va, ea, member, step_cap, rng)
            ok_b = extend_walk(g, vb, eb, member, step_cap, rng)
            if ok_a and ok_b:
                sketch.set(handle, va[-1], vb[-1], len(ea) + len(eb) + 1)
            else:
                sketch.capped += 1
            handle += 1
    return sketch
