"""Sensor-preserving minimal world model: rewire alpha through one state per intrinsic class."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Mapping

from .model import FiniteSpace, Kernel, LoopModel, sensor_process, simulate
from .intrinsic import IntrinsicResult, build_basis, intrinsic_partition
from .partition import Partition
from .refinement import w_sep


@dataclass(frozen=True)
class Selector:
    """Map from each world state to a representative (as state indices)."""

    space: FiniteSpace
    target: tuple[int, ...]

    def __call__(self, w: int) -> int:
        return self.target[w]

    @classmethod
    def from_labels(cls, space: FiniteSpace, mapping: Mapping[str, str]) -> "Selector":
        return cls(space, tuple(space.index(mapping[s]) for s in space.states))

    def is_idempotent(self) -> bool:
        return all(self.target[t] == t for t in self.target)

    def induced_partition(self) -> Partition:
        return Partition(self.space, self.target)

    def is_consistent(self, p: Partition) -> bool:
        return self.is_idempotent() and self.induced_partition() == p

    def to_json(self) -> dict:
        return {s: self.space.states[t] for s, t in zip(self.space.states, self.target)}


def select_representatives(intr: IntrinsicResult | Partition) -> Selector:
    """Send every state to the least-indexed state of its intrinsic block."""
    p = intr.partition if isinstance(intr, IntrinsicResult) else intr
    blocks = p.blocks
    return Selector(p.space, tuple(blocks[b][0] for b in p.labels))


@dataclass(frozen=True)
class ModifiedModel:
    base: LoopModel
    selector: Selector
    alpha_prime: Kernel
    weights: tuple | None = None

    @property
    def model(self) -> LoopModel:
        return self.base.with_alpha(self.alpha_prime)


def synthesize_alpha_prime(model: LoopModel, sel: Selector,
                           weights: Mapping[str, object] | None = None) -> ModifiedModel:
    """alpha'_a(w) := alpha_a(sel(w)), or with ``weights`` a convex mixture of the
    alpha_a rows over the states sharing w's representative."""
    nw, na = model.n_world, len(model.A)
    ar = model.arith
    rows = []
    wt = None
    if weights is not None:
        wt = tuple(ar.parse(weights.get(s, 0)) for s in model.W.states)
    for a in range(na):
        for w in range(nw):
            if wt is None:
                rows.append(model.alpha_row(a, sel(w)))
                continue
            group = [v for v in range(nw) if sel(v) == sel(w)]
            total = sum((wt[v] for v in group), ar.zero)
            if ar.is_zero(total):
                rows.append(model.alpha_row(a, sel(w)))
                continue
            mix = [ar.zero] * nw
            for v in group:
                for u, x in enumerate(model.alpha_row(a, v)):
                    mix[u] += wt[v] / total * x
            rows.append(tuple(mix))
    alpha = Kernel(model.alpha.source, model.alpha.target, tuple(rows))
    return ModifiedModel(model, sel, alpha, wt)


def union_model(model: LoopModel, alpha2: Kernel) -> LoopModel:
    """Two copies of W sharing S and A: ``orig:w`` moves by alpha, ``mod:w`` by alpha2."""
    nw, na = model.n_world, len(model.A)
    W2 = FiniteSpace(model.W.name, tuple(f"orig:{s}" for s in model.W.states)
                     + tuple(f"mod:{s}" for s in model.W.states))
    z = model.arith.zero
    rows = []
    for a in range(na):
        for w in range(nw):
            rows.append(tuple(model.alpha_row(a, w)) + (z,) * nw)
        for w in range(nw):
            rows.append((z,) * nw + tuple(alpha2.rows[a * nw + w]))
    beta = Kernel((W2,), (model.S,), model.beta.rows + model.beta.rows)
    return LoopModel(W2, model.S, model.C, model.A,
                     alpha=Kernel((model.A, W2), (W2,), tuple(rows)), beta=beta,
                     phi=model.phi, pi=model.pi, memoryless=model.memoryless, arith=model.arith)


@dataclass
class EquivalenceCertificate:
    ok: bool
    states: list[str] = field(default_factory=list)
    counterexample: dict | None = None
    monte_carlo: list[dict] = field(default_factory=list)
    mc_ok: bool = True

    def to_json(self) -> dict:
        out = {"equivalent": self.ok, "states_checked": self.states}
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        if self.monte_carlo:
            out["monte_carlo"] = {"ok": self.mc_ok, "checks": self.monte_carlo}
        return out


def verify_equivalence(model: LoopModel, mod: ModifiedModel, *, mc_samples: int = 0,
                       mc_horizon: int = 5, mc_words: int = 1, mc_tol: float = 0.02,
                       seed: int = 0) -> EquivalenceCertificate:
    """Certify every state equivalent to its copy under alpha' via the union-model basis.

    On failure the counterexample is the shortest basis word whose probability
    differs between a state and its copy.  With ``mc_samples > 0`` the modified
    model is also simulated on ``mc_words`` seeded random action words per state
    and compared with the exact sensor process of the original.
    """
    u = union_model(model, mod.alpha_prime)
    basis = build_basis(u)
    nw = model.n_world
    ar = model.arith
    bad = None
    for v, word in zip(basis.vectors, basis.words):
        for w in range(nw):
            if not ar.eq(v[w], v[nw + w]):
                if bad is None or len(word) < len(bad["word"]):
                    bad = {"state": model.W.states[w], "word": list(word),
                           "original": ar.fmt(v[w]), "modified": ar.fmt(v[nw + w])}
                break
    cert = EquivalenceCertificate(bad is None, list(model.W.states), bad)
    if mc_samples > 0:
        rng = random.Random(seed)
        mm = mod.model
        for w in model.W.states:
            for _ in range(mc_words):
                word = tuple(rng.choice(model.A.states) for _ in range(mc_horizon))
                exact = sensor_process(model, w, word)
                emp = simulate(mm, w, word, mc_samples, seed=rng.randrange(2 ** 32))
                tv = exact.tv_distance(emp)
                cert.monte_carlo.append({"state": w, "actions": list(word), "tv": round(tv, 6)})
                cert.mc_ok &= tv <= mc_tol
    return cert


@dataclass
class MinimalityReport:
    ok: bool
    sep_modified: Partition
    intrinsic: Partition

    def to_json(self) -> dict:
        return {"equal": self.ok, "w_sep_modified": self.sep_modified.block_labels(),
                "intrinsic": self.intrinsic.block_labels()}


def certify_minimal_model(model: LoopModel, mod: ModifiedModel,
                          intr: Partition | None = None) -> MinimalityReport:
    """Compare W_sep of the modified model with the original intrinsic partition."""
    intr = intr if intr is not None else intrinsic_partition(model).partition
    sep2, _ = w_sep(mod.model)
    return MinimalityReport(sep2 == intr, sep2, intr)


def minimize(model: LoopModel, selector: Selector | None = None, **mc) -> tuple[
        ModifiedModel, EquivalenceCertificate, MinimalityReport]:
    intr = intrinsic_partition(model)
    sel = selector if selector is not None else select_representatives(intr)
    mod = synthesize_alpha_prime(model, sel)
    return mod, verify_equivalence(model, mod, **mc), certify_minimal_model(model, mod, intr.partition)
