import itertools
import random

import pytest

from conftest import fixture_path, load
from umwelt.arith import Arithmetic
from umwelt.intrinsic import intrinsic_partition
from umwelt.io import read_json, two_agent_from_json
from umwelt.model import CapExceeded, FiniteSpace, Kernel, make_model
from umwelt.multiagent import (AgentSpec, JointLayout, TwoAgentModel, agent_view, as_single_agent,
                               shared_distinctions, umwelt_table)
from umwelt.random_models import model_rng, random_model, random_row
from umwelt.refinement import sigma_beta, w_am, w_sep


def two_agent(name):
    return two_agent_from_json(read_json(fixture_path(name))[0])


def random_two_agent(rng, nw=3):
    W = FiniteSpace("W", tuple(f"w{i}" for i in range(nw)))
    agents = []
    for tag in "pq":
        S = FiniteSpace("S", (f"{tag}0", f"{tag}1"))
        C = FiniteSpace("C", (f"{tag}m", f"{tag}n"))
        A = FiniteSpace("A", (f"{tag}x", f"{tag}y"))
        agents.append(AgentSpec(S, C, A,
                                Kernel((W,), (S,), tuple(random_row(rng, 2, 4) for _ in range(nw))),
                                Kernel((S, C), (C,), tuple(random_row(rng, 2, 4) for _ in range(4))),
                                Kernel((C,), (A,), tuple(random_row(rng, 2, 4) for _ in range(2))),
                                False))
    alpha = Kernel((agents[0].A, agents[1].A, W), (W,), tuple(random_row(rng, nw, 4) for _ in range(4 * nw)))
    return TwoAgentModel(W, tuple(agents), alpha, Arithmetic.rational())


def enumerate_view_alpha(m, i):
    """Derived kernel of agent i by summing over every (w', s', c', a') of the partner."""
    me, other = m.agents[i - 1], m.agents[2 - i]
    outer = list(itertools.product(range(len(m.W)), range(len(other.S)), range(len(other.C)), range(len(other.A))))
    rows = []
    for ai in range(len(me.A)):
        for (w, _, c, aj) in outer:
            src = (ai, aj, w) if i == 1 else (aj, ai, w)
            row = []
            for (w2, s2, c2, a2) in outer:
                row.append(m.alpha.row(*src)[w2] * other.beta.rows[w2][s2]
                           * other.phi.row(s2, c)[c2] * other.pi.rows[c2][a2])
            rows.append(tuple(row))
    return tuple(rows)


@pytest.mark.parametrize("name", ["two_agent_bits.json", "two_agent_symmetric.json", "two_agent_degenerate.json"])
def test_fixtures_are_valid(name):
    assert two_agent(name).validate() == []


@pytest.mark.parametrize("i", [1, 2])
def test_view_alpha_matches_enumeration_on_bits(i):
    m = two_agent("two_agent_bits.json")
    assert agent_view(m, i).model.alpha.rows == enumerate_view_alpha(m, i)


@pytest.mark.parametrize("k", range(6))
def test_view_alpha_matches_enumeration_random(k):
    m = random_two_agent(random.Random(k))
    for i in (1, 2):
        v = agent_view(m, i).model
        assert v.alpha.rows == enumerate_view_alpha(m, i)
        assert all(sum(r) == 1 for r in v.alpha.rows)
        t = "q" if i == 1 else "p"
        assert v.W.states[0] == f"w0,{t}0,{t}m,{t}x"


def test_degenerate_partner_view_is_single_agent_loop(ex31):
    m = two_agent("two_agent_degenerate.json")
    view = agent_view(m, 1).model
    single = as_single_agent(m, 1)
    assert single.alpha.rows == ex31.alpha.rows and single.beta.rows == ex31.beta.rows
    # outer-world states "w,-,-,-" correspond to w in order
    assert [s.split(",")[0] for s in view.W.states] == list(ex31.W.states)
    assert view.alpha.rows == ex31.alpha.rows and view.beta.rows == ex31.beta.rows
    for fn in (sigma_beta, lambda x: w_sep(x)[0], lambda x: w_am(x)[0], lambda x: intrinsic_partition(x).partition):
        assert fn(view).labels == fn(ex31).labels


def test_symmetric_agents_have_identical_dynamics():
    m = two_agent("two_agent_symmetric.json")
    v1, v2 = agent_view(m, 1).model, agent_view(m, 2).model
    assert v1.W.states == v2.W.states
    assert v1.alpha.rows == v2.alpha.rows and v1.beta.rows == v2.beta.rows


def test_shared_distinctions_bits():
    rep = shared_distinctions(two_agent("two_agent_bits.json"))
    assert rep["intrinsic"]["all_w_cylinders"]
    assert rep["intrinsic"]["w_partition"] == [["00", "01", "10", "11"]]
    assert all(len(p) == 2 for p in rep["agent_intrinsic"])


def test_shared_distinctions_symmetric():
    rep = shared_distinctions(two_agent("two_agent_symmetric.json"))
    assert rep["umwelten_equal"]
    assert rep["agent_intrinsic"][0] == rep["agent_intrinsic"][1]
    assert rep["intrinsic"]["w_partition"] == [["1"], ["2"], ["3"]]


def test_shared_distinctions_degenerate_partner():
    m = two_agent("two_agent_degenerate.json")
    rep = shared_distinctions(m)
    mine = [[s.split(",")[0] for s in b] for b in rep["agent_intrinsic"][0]]
    assert mine == [["1", "4", "5"], ["2"], ["3"]]
    # the partner is blind, so its Umwelt and hence the meet are trivial
    assert len(rep["agent_intrinsic"][1]) == 1
    assert rep["intrinsic"]["meet_blocks"] == 1


def test_lifted_partitions_are_cylinders():
    m = two_agent("two_agent_bits.json")
    layout = JointLayout(m)
    p = intrinsic_partition(agent_view(m, 1).model).partition
    lifted = layout.lift(p, 1)
    assert layout.w_cylinder(lifted).block_labels() == [["00", "01"], ["10", "11"]]


def test_joint_cap(monkeypatch):
    monkeypatch.setenv("UMWELT_MAX_JOINT_STATES", "10")
    m = two_agent("two_agent_symmetric.json")
    with pytest.raises(CapExceeded):
        shared_distinctions(m)


def test_umwelt_table_blind_actor():
    row = umwelt_table(load("blind_actor.json"))
    assert row["kind"] == "blind actor"
    assert row["intrinsic_trivial"] and row["verdict"] == "W_int: no Umwelt"


def test_umwelt_table_passive_observer(ex31):
    row = umwelt_table(ex31)
    assert row["kind"] == "passive observer"
    assert row["intrinsic"] == [["1", "4", "5"], ["2"], ["3"]]
    assert row["intrinsic_refines_merkwelt"] and not row["intrinsic_trivial"]
    assert row["verdict"] == "W_int contains Merkwelt"


def test_umwelt_table_fully_degenerate():
    m = make_model(["x", "y"], ["0"], [[0, 1], [1, 0]], [[1], [1]])
    row = umwelt_table(m)
    assert row["kind"] == "passive observer and blind actor"
    assert row["merkwelt_trivial"] and row["intrinsic_trivial"]
    assert row["verdict"] == "W_int contains Merkwelt; W_int: no Umwelt"


@pytest.mark.parametrize("k", range(30))
def test_blind_actor_theorem(k):
    m = random_model(model_rng(51, k), ns=1)
    assert intrinsic_partition(m).partition.is_trivial()
