from fractions import Fraction
from itertools import product
from pathlib import Path

import pytest

from umwelt.io import load_model

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
F = Fraction


def fixture_path(name: str) -> Path:
    return FIXTURES / name


def load(name: str):
    return load_model(fixture_path(name))[0]


@pytest.fixture
def ex31():
    return load("example_3_1.json")


def path_sum_process(model, w, word):
    """Sensor-word probabilities by summing over every world path (no dynamic programming)."""
    nw = model.n_world
    acts = [model.A.index(a) for a in word]
    n = len(word)
    table = {}
    for sensed in product(range(len(model.S)), repeat=n):
        total = F(0)
        for path in product(range(nw), repeat=n - 1):
            states = (model.W.index(w),) + path
            p = F(1)
            for k in range(n):
                p *= model.beta.rows[states[k]][sensed[k]]
                if k + 1 < n:
                    p *= model.alpha.rows[acts[k] * nw + states[k]][states[k + 1]]
                if not p:
                    break
            total += p
        table[tuple(model.S.states[s] for s in sensed)] = total
    return table


# one summary line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record(criterion: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[criterion] = (ok, detail)
    print(f"criterion {criterion}: {'PASS' if ok else 'FAIL'}  {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
