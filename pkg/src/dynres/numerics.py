"""Laplacian assembly, effective-resistance solves, and leverage-score sparsification."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import cg

from .errors import Disconnected, NonPositiveWeight, TooLarge, UnknownVertex
from .graph import DynamicMultigraph, RandomStream

DENSE_CAP = 2048


@dataclass(frozen=True)
class WeightedGraphView:
    """A weighted multigraph given as parallel arrays of endpoints and weights."""

    n: int
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray

    @classmethod
    def from_triples(cls, n: int, triples: Iterable[tuple[int, int, float]]) -> "WeightedGraphView":
        rows = list(triples)
        if not rows:
            return cls(n, np.zeros(0, np.int64), np.zeros(0, np.int64), np.zeros(0))
        u, v, w = zip(*rows)
        return cls(n, np.asarray(u, np.int64), np.asarray(v, np.int64), np.asarray(w, float))

    @classmethod
    def from_graph(cls, g: DynamicMultigraph) -> "WeightedGraphView":
        e = g.edge_array()
        return cls(g.n, e[:, 0].copy(), e[:, 1].copy(), np.ones(len(e)))

    def __len__(self) -> int:
        return len(self.w)

    def triples(self) -> Iterator[tuple[int, int, float]]:
        for a, b, x in zip(self.u.tolist(), self.v.tolist(), self.w.tolist()):
            yield a, b, x

    def total_weight(self) -> float:
        return float(self.w.sum())


@dataclass(frozen=True)
class SolveOptions:
    tol: float = 1e-8
    max_iter: int | None = None
    kind: str = "auto"  # "auto" | "cg" | "dense"
    dense_below: int = 300

    def __post_init__(self):
        if not 0 < self.tol < 1:
            raise ValueError("tolerance must lie in (0, 1)")
        if self.kind not in ("auto", "cg", "dense"):
            raise ValueError(f"unknown solver kind {self.kind!r}")


@dataclass(frozen=True)
class LaplacianSystem:
    L: sp.csr_matrix
    labels: np.ndarray
    n_components: int

    @property
    def n(self) -> int:
        return self.L.shape[0]


def assemble(view: WeightedGraphView) -> LaplacianSystem:
    w = view.w
    if len(w) and not (np.all(np.isfinite(w)) and np.all(w > 0)):
        raise NonPositiveWeight("edge weights must be positive and finite")
    n, u, v = view.n, view.u, view.v
    rows = np.concatenate([u, v, u, v])
    cols = np.concatenate([v, u, u, v])
    vals = np.concatenate([-w, -w, w, w])
    L = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    L.sum_duplicates()
    L.eliminate_zeros()
    ncomp, labels = connected_components(L, directed=False)
    return LaplacianSystem(L, labels, ncomp)


def effective_resistance(
    sys: LaplacianSystem, s: int, t: int, opts: SolveOptions | None = None
) -> float:
    """Effective resistance between ``s`` and ``t``.

    Grounds ``t`` inside the shared component and solves ``L' x = 1_s`` once;
    the potential at ``s`` is the resistance.
    """
    opts = opts or SolveOptions()
    n = sys.n
    for x in (s, t):
        if not 0 <= x < n:
            raise UnknownVertex(x)
    if s == t:
        return 0.0
    if sys.labels[s] != sys.labels[t]:
        raise Disconnected(f"{s} and {t} are in different components")
    comp = np.flatnonzero(sys.labels == sys.labels[s])
    keep = comp[comp != t]
    A = sys.L[keep][:, keep]
    b = (keep == s).astype(float)
    kind = opts.kind
    if kind == "auto":
        kind = "dense" if len(keep) < opts.dense_below else "cg"
    if kind == "dense":
        x = scipy.linalg.solve(A.toarray(), b, assume_a="pos")
    else:
        diag = A.diagonal()
        M = sp.diags(1.0 / diag)
        x, info = cg(A, b, rtol=opts.tol, atol=0.0, maxiter=opts.max_iter, M=M)
        if info > 0:
            raise RuntimeError(f"conjugate gradient did not converge in {info} iterations")
    return float(x[np.searchsorted(keep, s)])


def pinv_dense(sys: LaplacianSystem, cap: int = DENSE_CAP) -> np.ndarray:
    """Moore-Penrose pseudoinverse of the Laplacian; meant for test oracles."""
    if sys.n > cap:
        raise TooLarge(f"{sys.n} vertices exceeds the dense cap {cap}")
    return np.linalg.pinv(sys.L.toarray(), hermitian=True)


def resistance_from_pinv(P: np.ndarray, s, t) -> np.ndarray | float:
    """Vectorised ``P[s,s] + P[t,t] - 2 P[s,t]``."""
    s = np.asarray(s)
    t = np.asarray(t)
    r = P[s, s] + P[t, t] - 2.0 * P[s, t]
    return float(r) if r.ndim == 0 else r


def sample_count(n: int, eps: float, c: float = 1.0) -> int:
    return math.ceil(c * n * math.log(max(n, 2)) / eps**2)


def sparsify_by_leverage(
    view: WeightedGraphView, eps: float, rng: RandomStream, c: float = 1.0
) -> WeightedGraphView:
    """Importance-sample edges by exact leverage score.

    Draws ``ceil(c n ln n / eps^2)`` edges with replacement, each with
    probability proportional to ``w_e R(e)``, and reweights every draw by
    ``w_e / (q p_e)`` so the Laplacian is preserved in expectation.
    Inputs already at or below that size are returned as-is.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    q = sample_count(view.n, eps, c)
    if len(view) <= q:
        return view
    sys = assemble(view)
    if view.n <= DENSE_CAP:
        R = resistance_from_pinv(pinv_dense(sys), view.u, view.v)
    else:
        cache: dict[tuple[int, int], float] = {}
        R = np.empty(len(view))
        for i, (a, b, _) in enumerate(view.triples()):
            key = (min(a, b), max(a, b))
            if key not in cache:
                cache[key] = effective_resistance(sys, a, b)
            R[i] = cache[key]
    lev = np.clip(view.w * R, 0.0, None)
    p = lev / lev.sum()
    gen = np.random.default_rng(rng.getrandbits(64))
    counts = np.bincount(gen.choice(len(view), size=q, p=p), minlength=len(view))
    hit = counts > 0
    w = view.w[hit] * counts[hit] / (q * p[hit])
    return WeightedGraphView(view.n, view.u[hit], view.v[hit], w)
