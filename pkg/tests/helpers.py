"""Shared builders and independent oracles for the test suite."""

from __future__ import annotations

import random

import numpy as np

from dynres.graph import DynamicMultigraph


def random_connected(n: int, m: int, rng: random.Random) -> DynamicMultigraph:
    """Random spanning tree plus uniformly random extra (possibly parallel) edges."""
    g = DynamicMultigraph(n)
    for i in range(1, n):
        g.insert_edge(i, rng.randrange(i))
    while g.m < m:
        a, b = rng.randrange(n), rng.randrange(n)
        if a != b:
            g.insert_edge(a, b)
    return g


def laplacian_of(n: int, edges) -> np.ndarray:
    L = np.zeros((n, n))
    for u, v, *w in edges:
        x = w[0] if w else 1.0
        L[u, u] += x
        L[v, v] += x
        L[u, v] -= x
        L[v, u] -= x
    return L


def resistance_matrix(L: np.ndarray) -> np.ndarray:
    """All-pairs resistances of a connected Laplacian via ``inv(L + J/n) - J/n``."""
    n = len(L)
    J = np.full((n, n), 1.0 / n)
    P = np.linalg.inv(L + J) - J
    d = np.diag(P)
    return d[:, None] + d[None, :] - 2 * P


def graph_resistances(g: DynamicMultigraph) -> np.ndarray:
    return resistance_matrix(laplacian_of(g.n, [(u, v) for _, u, v in g.edges()]))


def schur_by_elimination(L: np.ndarray, T: list[int]) -> np.ndarray:
    """Gaussian elimination of the non-terminals one at a time, in ``T`` order."""
    n = len(L)
    A = L.astype(float).copy()
    alive = list(range(n))
    for x in [v for v in range(n) if v not in T]:
        alive.remove(x)
        if A[x, x] == 0:
            continue
        A[np.ix_(alive, alive)] -= np.outer(A[alive, x], A[x, alive]) / A[x, x]
    return A[np.ix_(T, T)]


# one line per acceptance criterion, printed again in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def verdict(number: int, name: str, ok: bool, detail: str, seconds: float, limit: float | None):
    """Record and print the pass/fail line of an acceptance criterion, then assert it."""
    timed = seconds <= limit if limit is not None else True
    status = "PASS" if ok and timed else "FAIL"
    bound = f" / limit {limit:.0f}s" if limit is not None else ""
    line = f"[{number:02d}] {status}  {name}: {detail}  ({seconds:.1f}s{bound})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line
    assert timed, line
