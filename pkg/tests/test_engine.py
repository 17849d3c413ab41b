import math
import random

import numpy as np
import pytest

from dynres.engine import EngineConfig, ErEngine
from dynres.errors import (
    Disconnected,
    PairNotRegistered,
    TerminalBudgetExceeded,
    UnknownVertex,
    WrongMode,
)
from dynres.graph import DynamicMultigraph
from dynres.schur import default_step_cap

from helpers import graph_resistances, random_connected


def small_config(**kw):
    kw.setdefault("rho", 8)
    kw.setdefault("step_cap", 200)
    return EngineConfig(**kw)


def test_config_validation():
    for bad in (
        dict(eps=0),
        dict(eps=1.0),
        dict(mode="random"),
        dict(beta=0.0),
        dict(beta=1.5),
        dict(terminals=(1,)),
        dict(rebuild_factor=0),
    ):
        with pytest.raises(ValueError):
            EngineConfig(**bad)
    c = EngineConfig(eps=0.4)
    assert c.eps_sketch == 0.2 and c.eps_sparsify == 0.1


def test_explicit_all_vertices_reproduces_graph():
    g = DynamicMultigraph(4, [(0, 1), (0, 1), (1, 2), (2, 3)])
    eng = ErEngine(g, small_config(mode="explicit", terminals=(0, 1, 2, 3)))
    assert eng.sc.sketch.pair_weights() == pytest.approx({(0, 1): 2.0, (1, 2): 1.0, (2, 3): 1.0})
    assert eng.effective_resistance(0, 3) == pytest.approx(2.5)


def test_beta_one_takes_all_non_isolated():
    g = DynamicMultigraph(5, [(0, 1), (1, 2), (2, 3)])
    eng = ErEngine(g, small_config(beta=1.0))
    assert sorted(eng.terminals) == [0, 1, 2, 3]


def test_terminal_sample_size_matches_binomial_law():
    rng = random.Random(3)
    g = random_connected(80, 200, rng)
    eng = ErEngine(g, small_config(beta=0.3, seed=1))
    beta = 0.3
    deg = g.degrees()
    p = 1 - (1 - beta) ** deg
    mean, var = p.sum(), (p * (1 - p)).sum()
    sizes = [len(eng._sample_terminals(beta)) for _ in range(1000)]
    assert abs(np.mean(sizes) - mean) <= 3 * math.sqrt(var / 1000)
    assert np.mean(sizes) <= 2 * beta * g.m


def test_default_beta_and_caps():
    g = random_connected(40, 100, random.Random(0))
    eng = ErEngine(g, EngineConfig(rho=2))
    assert eng.beta == pytest.approx(100 ** (-1 / 5))
    assert eng.step_cap == default_step_cap(40, eng.beta)
    v = ErEngine(g.copy(), EngineConfig(mode="vertex", rho=2))
    assert v.beta == pytest.approx(40 ** (-1 / 7))
    assert v.step_cap == math.ceil(v.beta**-3 * math.log2(40) ** 4)


def test_same_vertex_and_unknown_vertex():
    g = DynamicMultigraph(3, [(0, 1)])
    eng = ErEngine(g, small_config())
    before = len(eng.terminals)
    assert eng.effective_resistance(2, 2) == 0.0
    assert len(eng.terminals) == before
    with pytest.raises(UnknownVertex):
        eng.effective_resistance(0, 3)


def test_disconnected_components():
    g = DynamicMultigraph(4, [(0, 1), (2, 3)])
    eng = ErEngine(g, small_config())
    with pytest.raises(Disconnected):
        eng.effective_resistance(0, 2)
    eng.insert(1, 2)
    assert eng.effective_resistance(0, 3) > 0
    eng.delete(2)  # the bridge
    with pytest.raises(Disconnected):
        eng.effective_resistance(0, 3)


def test_vertex_mode_pairs():
    g = random_connected(12, 24, random.Random(1))
    eng = ErEngine(g, small_config(mode="vertex", beta=0.5))
    with pytest.raises(PairNotRegistered):
        eng.effective_resistance(0, 5)
    eng.register_pair(0, 5)
    assert eng.effective_resistance(5, 0) > 0
    eng.rebuild()
    assert 0 in eng.terminals and 5 in eng.terminals
    assert eng.effective_resistance(0, 5) > 0


def test_register_pair_needs_vertex_mode():
    eng = ErEngine(DynamicMultigraph(3, [(0, 1)]), small_config())
    with pytest.raises(WrongMode):
        eng.register_pair(0, 1)


def test_one_insert_no_rebuild():
    g = random_connected(20, 40, random.Random(2))
    eng = ErEngine(g, small_config(beta=0.2))
    eng.insert(0, 1)
    assert eng.rebuilds == 0


def test_query_driven_rebuild_resets_terminals():
    rng = random.Random(4)
    n = 60
    g = random_connected(n, 150, rng)
    eng = ErEngine(g, EngineConfig(beta=0.1, seed=4, rho=16, step_cap=5000))
    threshold = math.ceil(0.1 * 150)
    assert eng.rebuild_threshold == threshold
    sizes = [len(eng.terminals)]
    fresh = [x for x in range(n) if x not in eng.terminals]
    while eng.rebuilds == 0:
        s, t = fresh.pop(), fresh.pop()
        eng.effective_resistance(s, t)
        if eng.rebuilds == 0:
            sizes.append(len(eng.terminals))
    assert sizes == sorted(sizes)
    bm = 0.1 * g.m
    assert len(eng.terminals) <= 2 * bm + 6 * math.sqrt(bm * math.log(n))
    R = graph_resistances(g)
    for _ in range(5):
        s, t = rng.sample(range(n), 2)
        assert eng.effective_resistance(s, t) == pytest.approx(R[s, t], rel=0.25)


@pytest.mark.slow
def test_answers_converge_with_many_walks():
    rng = random.Random(6)
    for trial in range(3):
        n = rng.randint(6, 10)
        g = random_connected(n, 2 * n, rng)
        R = graph_resistances(g)
        eng = ErEngine(g, EngineConfig(rho=10_000, step_cap=10_000, beta=0.4, seed=trial))
        s, t = rng.sample(range(n), 2)
        assert eng.effective_resistance(s, t) == pytest.approx(R[s, t], rel=0.02)


def test_resparsified_queries_stay_accurate():
    rng = random.Random(8)
    g = random_connected(30, 90, rng)
    cfg = EngineConfig(eps=0.5, rho=64, seed=3, resparsify=True, resparsify_threshold=10)
    eng = ErEngine(g, cfg)
    R = graph_resistances(g)
    errs = []
    for _ in range(10):
        s, t = rng.sample(range(30), 2)
        errs.append(abs(eng.effective_resistance(s, t) / R[s, t] - 1))
    assert np.mean(np.array(errs) <= 0.5) >= 0.9


def test_budget_violation_raises(monkeypatch):
    g = random_connected(10, 20, random.Random(0))
    eng = ErEngine(g, small_config(beta=0.5))
    monkeypatch.setattr(ErEngine, "terminal_budget", lambda self: 0.0)
    with pytest.raises(TerminalBudgetExceeded):
        eng.insert(0, 1)


def test_updates_keep_structure_consistent():
    rng = random.Random(9)
    g = random_connected(16, 32, rng)
    eng = ErEngine(g, small_config(beta=0.3, seed=9))
    for _ in range(60):
        if rng.random() < 0.5:
            a, b = rng.sample(range(16), 2)
            eng.insert(a, b)
        else:
            eng.delete(rng.choice([e for e, _, _ in g.edges()]))
        eng.sc.audit()
