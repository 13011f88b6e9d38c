"""Property-test campaign over seeded random models, with witness shrinking."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterator

from .intrinsic import (ContainmentViolation, brute_force_partition, build_basis, check_containment,
                        partition_from_basis)
from .io import dumps, model_to_json
from .model import FiniteSpace, Kernel, LoopModel, validate
from .partition import Partition, join, meet
from .random_models import ModelBounds, model_rng, random_model, random_partition
from .refinement import sigma_beta, w_sep
from .synthesis import certify_minimal_model, select_representatives, synthesize_alpha_prime, verify_equivalence

SUITES = ("containment", "minimality", "oracle", "bounds", "lattice")
ORACLE_MAX_W = 5


def _intrinsic(model: LoopModel) -> Partition:
    return partition_from_basis(model, build_basis(model))


# Deliberately broken stand-ins used to check that the harness catches bugs.
MUTATIONS: dict[str, dict[str, Callable]] = {
    "intrinsic-is-sigma-beta": {"intrinsic": sigma_beta},
    "sep-skips-refinement": {"w_sep": lambda m: sigma_beta(m)},
}


@dataclass
class Impl:
    intrinsic: Callable[[LoopModel], Partition] = _intrinsic
    w_sep: Callable[[LoopModel], Partition] = lambda m: w_sep(m)[0]


def check_containment_suite(model: LoopModel, impl: Impl) -> str | None:
    try:
        check_containment(model, impl.intrinsic(model), impl.w_sep(model))
    except ContainmentViolation as e:
        return str(e)
    return None


def check_minimality_suite(model: LoopModel, impl: Impl) -> str | None:
    intr = impl.intrinsic(model)
    mod = synthesize_alpha_prime(model, select_representatives(intr))
    cert = verify_equivalence(model, mod)
    if not cert.ok:
        return f"alpha' not equivalent: {cert.counterexample}"
    rep = certify_minimal_model(model, mod, intr)
    if not rep.ok:
        return f"W_sep(alpha') {rep.sep_modified} != W_int {rep.intrinsic}"
    return None


def check_oracle_suite(model: LoopModel, impl: Impl) -> str | None:
    if model.n_world > ORACLE_MAX_W:
        return None
    intr = impl.intrinsic(model)
    brute = brute_force_partition(model, model.n_world)
    if intr != brute:
        return f"intrinsic {intr} != brute force {brute} at horizon {model.n_world}"
    return None


def check_bounds_suite(model: LoopModel, impl: Impl) -> str | None:
    _, trace = w_sep(model)
    if trace.fixpoint_index > model.n_world - 1:
        return f"fixpoint index {trace.fixpoint_index} > |W|-1"
    dim = build_basis(model).dimension
    if dim > model.n_world:
        return f"basis dimension {dim} > |W|"
    return None


CHECKS = {
    "containment": check_containment_suite,
    "minimality": check_minimality_suite,
    "oracle": check_oracle_suite,
    "bounds": check_bounds_suite,
}


def lattice_violations(p: Partition, q: Partition, r: Partition) -> list[str]:
    out = []
    if join(p, q) != join(q, p) or meet(p, q) != meet(q, p):
        out.append("commutativity")
    if join(join(p, q), r) != join(p, join(q, r)) or meet(meet(p, q), r) != meet(p, meet(q, r)):
        out.append("associativity")
    if join(p, p) != p or meet(p, p) != p:
        out.append("idempotence")
    if join(p, meet(p, q)) != p or meet(p, join(p, q)) != p:
        out.append("absorption")
    if not (join(p, q).refines(p) and join(p, q).refines(q)):
        out.append("join refines both")
    if not (p.refines(meet(p, q)) and q.refines(meet(p, q))):
        out.append("meet coarsens both")
    return out


# shrinking

def _renorm_uniform(n: int) -> tuple[Fraction, ...]:
    return tuple(Fraction(1, n) for _ in range(n))


def _drop_action(m: LoopModel, a: int) -> LoopModel:
    A = FiniteSpace(m.A.name, m.A.states[:a] + m.A.states[a + 1:])
    nw = m.n_world
    rows = [m.alpha.rows[b * nw + w] for b in range(len(m.A)) if b != a for w in range(nw)]
    pi = [_renorm_uniform(len(A))] * len(m.C)
    return LoopModel(m.W, m.S, m.C, A, Kernel((A, m.W), (m.W,), rows), m.beta, m.phi,
                     Kernel((m.C,), (A,), pi), None, m.memoryless, m.arith)


def _merge_sensor(m: LoopModel, s: int) -> LoopModel:
    into = 0 if s != 0 else 1
    S = FiniteSpace(m.S.name, m.S.states[:s] + m.S.states[s + 1:])
    beta = []
    for r in m.beta.rows:
        r = list(r)
        r[into] += r[s]
        del r[s]
        beta.append(tuple(r))
    nc = len(m.C)
    phi = [m.phi.rows[t * nc + c] for t in range(len(m.S)) if t != s for c in range(nc)]
    return LoopModel(m.W, S, m.C, m.A, m.alpha, Kernel((m.W,), (S,), beta),
                     Kernel((S, m.C), (m.C,), phi), m.pi, None, m.memoryless, m.arith)


def _drop_world(m: LoopModel, w: int) -> LoopModel:
    into = 0 if w != 0 else 1
    nw = m.n_world
    W = FiniteSpace(m.W.name, m.W.states[:w] + m.W.states[w + 1:])
    rows = []
    for a in range(len(m.A)):
        for v in range(nw):
            if v == w:
                continue
            r = list(m.alpha_row(a, v))
            r[into] += r[w]
            del r[w]
            rows.append(tuple(r))
    beta = [r for v, r in enumerate(m.beta.rows) if v != w]
    return LoopModel(W, m.S, m.C, m.A, Kernel((m.A, W), (W,), rows), Kernel((W,), (m.S,), beta),
                     m.phi, m.pi, None, m.memoryless, m.arith)


def _drop_memory(m: LoopModel) -> LoopModel:
    C = FiniteSpace(m.C.name, m.C.states[:1])
    phi = [(Fraction(1),)] * len(m.S)
    return LoopModel(m.W, m.S, C, m.A, m.alpha, m.beta, Kernel((m.S, C), (C,), phi),
                     Kernel((C,), (m.A,), m.pi.rows[:1]), None, True, m.arith)


def shrink_candidates(m: LoopModel) -> Iterator[LoopModel]:
    if len(m.C) > 1:
        yield _drop_memory(m)
    for a in range(len(m.A)) if len(m.A) > 1 else ():
        yield _drop_action(m, a)
    for s in range(len(m.S)) if len(m.S) > 1 else ():
        yield _merge_sensor(m, s)
    for w in range(m.n_world) if m.n_world > 1 else ():
        yield _drop_world(m, w)


def shrink(model: LoopModel, failing: Callable[[LoopModel], bool], max_rounds: int = 200) -> LoopModel:
    """Greedy shrink: keep taking the first smaller model that still fails."""
    for _ in range(max_rounds):
        for cand in shrink_candidates(model):
            if not validate(cand) and failing(cand):
                model = cand
                break
        else:
            return model
    return model


@dataclass
class CampaignSummary:
    count: int
    seed: int
    max_w: int
    checked: dict[str, int] = field(default_factory=lambda: {s: 0 for s in SUITES})
    violations: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {"count": self.count, "seed": self.seed, "max_w": self.max_w,
                "suites": {s: {"checked": self.checked[s],
                               "violations": sum(v["suite"] == s for v in self.violations)}
                           for s in SUITES},
                "violations": self.violations, "ok": self.ok}


def run_campaign(count: int, max_w: int = 8, seed: int = 0, *, bounds: ModelBounds | None = None,
                 witness_dir: str | Path | None = None, mutation: str | None = None,
                 suites=SUITES) -> CampaignSummary:
    bounds = bounds or ModelBounds(max_w=max_w)
    impl = Impl(**MUTATIONS[mutation]) if mutation else Impl()
    summary = CampaignSummary(count, seed, bounds.max_w)
    for k in range(count):
        model = random_model(model_rng(seed, k), bounds)
        for suite in suites:
            if suite == "lattice":
                rng = random.Random(f"lattice-{seed}-{k}")
                space = FiniteSpace("X", tuple(str(i) for i in range(rng.randint(1, 10))))
                p, q, r = (random_partition(rng, space) for _ in range(3))
                bad = lattice_violations(p, q, r)
                summary.checked[suite] += 1
                if bad:
                    summary.violations.append({"suite": suite, "index": k, "message": ", ".join(bad)})
                continue
            if suite == "oracle" and model.n_world > ORACLE_MAX_W:
                continue
            check = CHECKS[suite]
            summary.checked[suite] += 1
            msg = check(model, impl)
            if msg is None:
                continue
            small = shrink(model, lambda m: check(m, impl) is not None)
            entry = {"suite": suite, "index": k, "message": msg,
                     "shrunk_message": check(small, impl), "shrunk_world_states": small.n_world}
            if witness_dir is not None:
                path = Path(witness_dir) / f"witness-{suite}-seed{seed}-{k}.json"
                path.parent.mkdir(parents=True, exist_ok=True)
                path.write_text(dumps(model_to_json(small)), encoding="utf-8")
                entry["witness"] = str(path)
            summary.violations.append(entry)
    return summary


def random_pair_stream(seed: int, n: int, max_size: int = 10) -> Iterator[tuple[Partition, Partition, Partition]]:
    rng = random.Random(f"lattice-{seed}")
    for _ in range(n):
        space = FiniteSpace("X", tuple(str(i) for i in range(rng.randint(1, max_size))))
        yield tuple(random_partition(rng, space) for _ in range(3))
