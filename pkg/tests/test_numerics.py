import random

import numpy as np
import pytest

from dynres.errors import Disconnected, NonPositiveWeight, TooLarge
from dynres.graph import DynamicMultigraph
from dynres.numerics import (
    SolveOptions,
    WeightedGraphView,
    assemble,
    effective_resistance,
    pinv_dense,
    resistance_from_pinv,
    sample_count,
    sparsify_by_leverage,
)

from helpers import graph_resistances, laplacian_of, random_connected, resistance_matrix


def view(n, triples):
    return WeightedGraphView.from_triples(n, triples)


def test_single_edge_laplacian():
    L = assemble(view(2, [(0, 1, 1.0)])).L.toarray()
    assert np.array_equal(L, [[1, -1], [-1, 1]])


def test_parallel_halves_sum():
    a = assemble(view(2, [(0, 1, 0.5), (0, 1, 0.5)])).L.toarray()
    assert np.allclose(a, [[1, -1], [-1, 1]])


def test_triangle_laplacian():
    L = assemble(view(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)])).L.toarray()
    assert np.array_equal(np.diag(L), [2, 2, 2])
    assert np.all(L[~np.eye(3, dtype=bool)] == -1)


@pytest.mark.parametrize("w", [0.0, -1.0, np.inf, np.nan])
def test_bad_weights(w):
    with pytest.raises(NonPositiveWeight):
        assemble(view(2, [(0, 1, w)]))


@pytest.mark.parametrize("kind", ["dense", "cg"])
def test_path_resistance(kind):
    sys = assemble(view(3, [(0, 1, 1), (1, 2, 1)]))
    assert effective_resistance(sys, 0, 2, SolveOptions(kind=kind)) == pytest.approx(2.0)


@pytest.mark.parametrize("kind", ["dense", "cg"])
def test_triangle_resistance(kind):
    sys = assemble(view(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)]))
    assert effective_resistance(sys, 0, 1, SolveOptions(kind=kind)) == pytest.approx(2 / 3)


def test_complete_graph_resistance():
    sys = assemble(view(5, [(i, j, 1) for i in range(5) for j in range(i + 1, 5)]))
    assert effective_resistance(sys, 1, 3) == pytest.approx(0.4, abs=1e-10)
    P = pinv_dense(sys)
    assert resistance_from_pinv(P, 1, 3) == pytest.approx(0.4, abs=1e-10)


def test_same_vertex_is_zero():
    sys = assemble(view(3, [(0, 1, 1)]))
    assert effective_resistance(sys, 2, 2) == 0.0


def test_disconnected_raises():
    sys = assemble(view(4, [(0, 1, 1), (2, 3, 1)]))
    with pytest.raises(Disconnected):
        effective_resistance(sys, 0, 3)


def test_grounding_within_component():
    # the unrelated component must not make the grounded system singular
    sys = assemble(view(5, [(0, 1, 1), (1, 2, 2), (3, 4, 1)]))
    assert effective_resistance(sys, 0, 2) == pytest.approx(1.5)


def test_pinv_single_edge():
    P = pinv_dense(assemble(view(2, [(0, 1, 1)])))
    assert np.allclose(P, 0.25 * np.array([[1, -1], [-1, 1]]))


def test_pinv_identity_residual():
    g = random_connected(30, 70, random.Random(2))
    sys = assemble(WeightedGraphView.from_graph(g))
    L = sys.L.toarray()
    P = pinv_dense(sys)
    assert np.linalg.norm(L @ P @ L - L) / np.linalg.norm(L) <= 1e-8


def test_pinv_block_diagonal_when_disconnected():
    P = pinv_dense(assemble(view(4, [(0, 1, 1), (2, 3, 1)])))
    assert np.allclose(P[:2, 2:], 0) and np.allclose(P[2:, :2], 0)


def test_pinv_cap():
    with pytest.raises(TooLarge):
        pinv_dense(assemble(view(5, [(0, 1, 1)])), cap=4)


def test_solvers_agree_with_pinv():
    rng = random.Random(5)
    for _ in range(20):
        n = rng.randint(5, 40)
        g = random_connected(n, rng.randint(n - 1, 3 * n), rng)
        sys = assemble(WeightedGraphView.from_graph(g))
        R = graph_resistances(g)
        P = pinv_dense(sys)
        s, t = rng.sample(range(n), 2)
        assert resistance_from_pinv(P, s, t) == pytest.approx(R[s, t], abs=1e-8)
        for kind in ("cg", "dense"):
            got = effective_resistance(sys, s, t, SolveOptions(kind=kind, tol=1e-10))
            assert got == pytest.approx(R[s, t], abs=1e-6)


def test_sparsify_small_input_unchanged():
    v = view(3, [(0, 1, 1), (1, 2, 1)])
    assert sparsify_by_leverage(v, 0.5, random.Random(0)) is v


def test_sparsify_parallel_bundle_conserves_weight():
    v = view(2, [(0, 1, 1.0)] * 100)
    assert len(v) > sample_count(2, 0.25)
    out = sparsify_by_leverage(v, 0.25, random.Random(1))
    assert len(out) < len(v)
    assert out.total_weight() == pytest.approx(100.0, rel=0.25)


def test_sparsify_preserves_resistances():
    rng = random.Random(8)
    n = 64
    triples = []
    for i in range(n):
        for j in range(i + 1, n):
            for _ in range(3):
                triples.append((i, j, rng.uniform(0.5, 2.0)))
    v = view(n, triples)
    assert len(v) > sample_count(n, 0.25)
    out = sparsify_by_leverage(v, 0.25, rng)
    assert len(out) <= sample_count(n, 0.25)
    R0 = resistance_matrix(laplacian_of(n, triples))
    R1 = resistance_matrix(laplacian_of(n, out.triples()))
    iu = np.triu_indices(n, 1)
    rel = np.abs(R1[iu] / R0[iu] - 1)
    assert np.mean(rel <= 0.25) >= 0.95


def test_solve_options_validation():
    with pytest.raises(ValueError):
        SolveOptions(tol=0)
    with pytest.raises(ValueError):
        SolveOptions(kind="lu")


def test_view_from_graph_and_triples():
    g = DynamicMultigraph(3, [(0, 1), (1, 2)])
    v = WeightedGraphView.from_graph(g)
    assert list(v.triples()) == [(0, 1, 1.0), (1, 2, 1.0)]
    assert v.total_weight() == 2.0
    assert len(view(3, [])) == 0
