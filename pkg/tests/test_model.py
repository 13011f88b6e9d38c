import random
from fractions import Fraction as F

import pytest

from conftest import load, path_sum_process
from umwelt.arith import Arithmetic
from umwelt.model import (CapExceeded, FiniteSpace, ModelError, compose, constant, gamma, identity, kappa,
                          make_model, memory_sensor_kernel, sensor_process, simulate, validate)
from umwelt.oracles import gamma_by_paths
from umwelt.random_models import ModelBounds, model_rng, random_model


def test_example_is_valid(ex31):
    assert validate(ex31) == []


def test_row_sum_violation_reported_once():
    problems = validate(load("row_sum_0_9.json"))
    assert len(problems) == 1
    assert "beta" in problems[0] and "row" in problems[0]


def test_memoryless_flag_with_memory_dependent_phi():
    m = make_model(["x", "y"], ["0"], [[1, 0], [0, 1]], [[1], [1]], C=["c", "d"],
                   phi=[[1, 0], [0, 1]], memoryless=True)
    problems = validate(m)
    assert len(problems) == 1 and "memoryless" in problems[0]


def test_negative_entry_reported():
    m = make_model(["x", "y"], ["0", "1"], [[1, 0], [0, 1]], [["3/2", "-1/2"], [1, 0]])
    assert any("negative" in p for p in validate(m))


def test_compose_identity_is_neutral(ex31):
    assert compose(identity(ex31.W), ex31.beta).rows == ex31.beta.rows
    assert compose(ex31.beta, identity(ex31.S)).rows == ex31.beta.rows


def test_compose_with_constant_gives_constant(ex31):
    A = FiniteSpace("A", ("l", "r", "u"))
    dist = (F(1, 3), F(1, 6), F(1, 2))
    out = compose(ex31.beta, constant((ex31.S,), (A,), dist))
    assert all(r == dist for r in out.rows)


def test_compose_rejects_mismatch(ex31):
    with pytest.raises(ModelError):
        compose(ex31.beta, ex31.beta)


def test_compose_is_associative():
    rng = random.Random(3)
    m = random_model(rng, ModelBounds(max_w=5), memoryless=True)
    phi = memory_sensor_kernel(m)
    assert compose(compose(m.beta, phi), m.pi).rows == compose(m.beta, compose(phi, m.pi)).rows


def test_gamma_single_action_is_dirac(ex31):
    assert all(r == (F(1),) for r in gamma(ex31).rows)


def test_gamma_uniform_policy_gives_uniform_rows():
    m = make_model(["x", "y", "z"], ["0", "1"], [[1, 0, 0]] * 9, [[1, 0], ["1/3", "2/3"], [0, 1]],
                   A=["a", "b", "c"])
    assert all(r == (F(1, 3),) * 3 for r in gamma(m).rows)


@pytest.mark.parametrize("k", range(10))
def test_gamma_matches_path_enumeration(k):
    m = random_model(model_rng(11, k), ModelBounds(max_w=3, min_w=3), memoryless=True)
    assert [list(r) for r in gamma(m).rows] == gamma_by_paths(m)


def test_gamma_rejects_memory_agent():
    m = make_model(["x"], ["0"], [[1]], [[1]], C=["c", "d"], phi=[[0, 1], [1, 0]])
    with pytest.raises(ModelError):
        gamma(m)
    with pytest.raises(ModelError):
        kappa(m)


@pytest.mark.parametrize("k", range(10))
def test_kappa_marginal_and_conditional(k):
    m = random_model(model_rng(12, k), memoryless=True)
    g, kp = gamma(m), kappa(m)
    nw, na = m.n_world, len(m.A)
    for w in range(nw):
        row = kp.rows[w]
        assert sum(row) == 1
        for a in range(na):
            mass = sum(row[a * nw:(a + 1) * nw])
            assert mass == g.rows[w][a]
            if mass:
                assert tuple(x / mass for x in row[a * nw:(a + 1) * nw]) == m.alpha_row(a, w)


def test_kappa_single_action(ex31):
    kp = kappa(ex31)
    assert kp.rows == ex31.alpha.rows


def test_sensor_process_examples(ex31):
    assert sensor_process(ex31, "1", ("a0",)).table == {("0",): F(1, 2), ("1",): F(1, 2)}
    t = sensor_process(ex31, "2", ("a0", "a0")).table
    assert t == {("0", "0"): F(1, 2), ("0", "1"): F(1, 2), ("1", "0"): 0, ("1", "1"): 0}
    assert sensor_process(ex31, "3", ()).table == {(): 1}


@pytest.mark.parametrize("k", range(12))
def test_sensor_process_matches_path_sum(k):
    m = random_model(model_rng(13, k), ModelBounds(max_w=4, max_s=3, max_a=2))
    rng = random.Random(k)
    word = tuple(rng.choice(m.A.states) for _ in range(rng.randint(1, 3)))
    w = rng.choice(m.W.states)
    sp = sensor_process(m, w, word)
    assert sp.table == path_sum_process(m, w, word)
    assert sp.total() == 1


def test_sensor_process_cap(ex31):
    with pytest.raises(CapExceeded):
        sensor_process(ex31, "1", ("a0",) * 6, cap=32)


def test_simulate_binomial_bound(ex31):
    emp = simulate(ex31, "1", ("a0",), 100_000, seed=7)
    assert abs(emp.table[("0",)] - F(1, 2)) <= F(1, 100)


def test_simulate_deterministic_model_is_exact():
    m = load("chain3.json")
    word = ("a0",) * 4
    emp = simulate(m, "1", word, 500, seed=1)
    exact = {k: v for k, v in sensor_process(m, "1", word).table.items() if v}
    assert emp.table == exact


def test_simulate_reproducible(ex31):
    a = simulate(ex31, "1", ("a0",) * 4, 2000, seed=5)
    b = simulate(ex31, "1", ("a0",) * 4, 2000, seed=5)
    assert a.table == b.table


def test_simulate_rejects_zero_samples(ex31):
    with pytest.raises(ValueError):
        simulate(ex31, "1", ("a0",), 0)


@pytest.mark.parametrize("name", ["example_3_1.json", "chain3.json", "blind_actor.json", "one_state.json"])
def test_simulate_converges_on_fixtures(name):
    m = load(name)
    rng = random.Random(name)
    for w in m.W.states:
        word = tuple(rng.choice(m.A.states) for _ in range(5))
        tv = sensor_process(m, w, word).tv_distance(simulate(m, w, word, 100_000, seed=3))
        assert tv <= 0.02


def test_float_mode_matches_rational():
    mr = load("example_3_1.json")
    mf = load("example_3_1_float.json")
    assert not mf.arith.exact
    a = sensor_process(mr, "1", ("a0",) * 3).table
    b = sensor_process(mf, "1", ("a0",) * 3).table
    assert all(abs(float(a[k]) - b[k]) < 1e-12 for k in a)


def test_float_arithmetic_groups_within_eps():
    ar = Arithmetic.floating(1e-6)
    assert ar.group([(0.5,), (0.5 + 1e-9,), (0.7,)]) == [0, 0, 1]
