import math
import random

import numpy as np
import pytest

from dynres.errors import TooLarge, UnknownVertex
from dynres.graph import DynamicMultigraph
from dynres.schur import (
    SchurSketch,
    TerminalSet,
    default_rho,
    default_step_cap,
    dense_laplacian,
    enumerate_terminal_free_walks,
    exact_schur,
    sample_schur_sketch,
)

from helpers import graph_resistances, random_connected, resistance_matrix, schur_by_elimination


def path(n):
    return DynamicMultigraph(n, [(i, i + 1) for i in range(n - 1)])


def test_terminal_set_basics():
    T = TerminalSet(5, [3, 1, 3])
    assert list(T) == [3, 1] and len(T) == 2
    assert 1 in T and 0 not in T
    assert not T.add(1) and T.add(0)
    assert [x for x in range(5) if T.member[x]] == sorted(T)
    with pytest.raises(UnknownVertex):
        T.add(5)
    c = T.copy()
    c.add(4)
    assert 4 not in T


def test_default_parameters():
    assert default_rho(64, 0.25) == 96
    assert default_rho(64, 0.125) == 384
    assert default_step_cap(64, 0.5) == math.ceil(4 * 216)
    assert default_step_cap(64, 0.5, vertex_mode=True) == math.ceil(8 * 6**4)
    assert default_step_cap(64, 0.5, c_len=0.5) == 432


def test_path_series_reduction():
    S = exact_schur(path(3), TerminalSet(3, [0, 2]))
    assert S.weight(0, 2) == pytest.approx(0.5)
    assert np.allclose(S.L, [[0.5, -0.5], [-0.5, 0.5]])


def test_star_mesh():
    g = DynamicMultigraph(4, [(0, 1), (0, 2), (0, 3)])
    S = exact_schur(g, TerminalSet(4, [1, 2, 3]))
    for a, b in [(1, 2), (1, 3), (2, 3)]:
        assert S.weight(a, b) == pytest.approx(1 / 3)


def test_matches_elimination_and_resistances():
    rng = random.Random(4)
    g = random_connected(25, 60, rng)
    T = rng.sample(range(25), 6)
    S = exact_schur(g, TerminalSet(25, T))
    assert np.allclose(S.L, schur_by_elimination(dense_laplacian(g), T), atol=1e-10)
    R = graph_resistances(g)
    RS = resistance_matrix(S.L)
    for i, a in enumerate(T):
        for j, b in enumerate(T):
            assert abs(RS[i, j] - R[a, b]) <= 1e-8


def test_component_without_terminals_is_dropped():
    g = DynamicMultigraph(5, [(0, 1), (1, 2), (3, 4)])
    S = exact_schur(g, TerminalSet(5, [0, 2]))
    assert S.weight(0, 2) == pytest.approx(0.5)


def test_exact_schur_too_large(monkeypatch):
    from dynres import schur

    monkeypatch.setattr(schur, "DENSE_CAP", 3)
    with pytest.raises(TooLarge):
        exact_schur(path(4), TerminalSet(4, [0]))


def test_enumeration_path_single_walk():
    S = enumerate_terminal_free_walks(path(3), TerminalSet(3, [0, 2]), 2)
    assert S.weight(0, 2) == pytest.approx(0.5)
    assert np.allclose(S.L, exact_schur(path(3), TerminalSet(3, [0, 2])).L)


def test_enumeration_zero_length_is_terminal_edges():
    g = DynamicMultigraph(4, [(0, 1), (0, 1), (1, 2), (2, 3)])
    S = enumerate_terminal_free_walks(g, TerminalSet(4, [0, 1, 3]), 0)
    assert S.weight(0, 1) == 2.0
    assert S.weight(1, 3) == 0.0


def test_enumeration_converges_on_path4():
    g = path(4)
    T = TerminalSet(4, [0, 3])
    exact = exact_schur(g, T).weight(0, 3)
    errs = [abs(enumerate_terminal_free_walks(g, T, k).weight(0, 3) - exact) for k in range(2, 21)]
    assert all(b <= a for a, b in zip(errs, errs[1:]))
    assert errs[-1] <= 1e-3


def test_enumeration_limits():
    with pytest.raises(TooLarge):
        enumerate_terminal_free_walks(path(13), TerminalSet(13, [0]), 3)
    with pytest.raises(TooLarge):
        enumerate_terminal_free_walks(path(3), TerminalSet(3, [0]), 33)


def test_all_terminals_gives_unit_total():
    g = DynamicMultigraph(2, [(0, 1)])
    sk = sample_schur_sketch(g, TerminalSet(2, [0, 1]), 37, 5, random.Random(0))
    assert all(ell == 1 for _, _, ell in sk.edges.values())
    assert sk.pair_weights()[(0, 1)] == pytest.approx(1.0, abs=1e-12)


def test_path_walk_lengths_and_mean():
    sk = sample_schur_sketch(path(3), TerminalSet(3, [0, 2]), 10_000, 50, random.Random(1))
    assert all(ell == 2 for _, _, ell in sk.edges.values())
    assert all({a, b} <= {0, 2} for a, b, _ in sk.edges.values())
    assert sk.pair_weights()[(0, 2)] == pytest.approx(0.5, rel=0.05)


def test_component_without_terminal_gives_no_edges():
    g = DynamicMultigraph(5, [(0, 1), (2, 3), (3, 4), (2, 4)])
    sk = sample_schur_sketch(g, TerminalSet(5, [0]), 10, 2, random.Random(0))
    assert sk.capped == 30
    assert all(a in (0, 1) and b in (0, 1) for a, b, _ in sk.edges.values())


def test_sketch_weights_are_inverse_lengths():
    rng = random.Random(6)
    g = random_connected(15, 30, rng)
    rho = 20
    sk = sample_schur_sketch(g, TerminalSet(15, [0, 5, 9]), rho, 200, rng)
    for t1, t2, ell in sk.edges.values():
        assert ell >= 1 and sk.weight_of(ell) == 1.0 / (rho * ell)
    total = {}
    for t1, t2, ell in sk.edges.values():
        if t1 != t2:
            k = (min(t1, t2), max(t1, t2))
            total[k] = total.get(k, 0.0) + 1.0 / (rho * ell)
    assert total.keys() == sk.pair_weights().keys()
    assert all(total[k] == pytest.approx(w) for k, w in sk.pair_weights().items())


def test_sketch_set_remove_is_exact():
    sk = SchurSketch(4, 3)
    sk.set(0, 0, 1, 2)
    sk.set(1, 1, 0, 5)
    sk.set(2, 2, 2, 4)
    sk.set(1, 0, 2, 1)
    assert sk.pair_weights() == {(0, 1): 1 / 6, (0, 2): 1 / 3}
    sk.remove(0)
    sk.remove(1)
    assert sk.pair_weights() == {} and len(sk) == 1
    assert np.array_equal(sk.laplacian([0, 1, 2]), np.zeros((3, 3)))


def test_sampler_rejects_bad_params():
    with pytest.raises(ValueError):
        sample_schur_sketch(path(3), TerminalSet(3, [0]), 0, 3, random.Random(0))
