"""Extrinsic world partitions: sigma(beta), the separately measurable fixpoint, W_am."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .arith import Scalar
from .model import LoopModel, gamma
from .partition import Partition, join


@dataclass(frozen=True)
class RefinementTrace:
    """Stage n holds the atoms after n refinement steps; the last stage is the fixpoint."""

    stages: tuple[Partition, ...]

    @property
    def fixpoint_index(self) -> int:
        return len(self.stages) - 1

    def to_json(self) -> dict:
        return {"fixpoint_index": self.fixpoint_index,
                "stages": [p.block_labels() for p in self.stages]}


@dataclass(frozen=True)
class InvarianceResult:
    ok: bool
    action: str | None = None
    state: str | None = None
    other: str | None = None
    block: tuple[str, ...] | None = None

    def __bool__(self) -> bool:
        return self.ok

    def to_json(self) -> dict:
        if self.ok:
            return {"invariant": True}
        return {"invariant": False, "action": self.action, "state": self.state,
                "other": self.other, "block": list(self.block)}


def block_mass(row: Sequence[Scalar], p: Partition, zero) -> list[Scalar]:
    """Mass a distribution over the space puts on each block of ``p``."""
    out = [zero] * p.n_blocks
    for i, x in enumerate(row):
        out[p.labels[i]] += x
    return out


def sigma_beta(model: LoopModel) -> Partition:
    """States with identical sensor rows share a block."""
    keys = [model.beta_row(w) for w in range(model.n_world)]
    return Partition(model.W, tuple(model.arith.group(keys)))


def _alpha_signature(model: LoopModel, p: Partition, w: int):
    z = model.arith.zero
    return tuple(tuple(block_mass(model.alpha_row(a, w), p, z)) for a in range(len(model.A)))


def _refine(model: LoopModel, p: Partition, signature: Callable[[int], tuple]) -> Partition:
    keys = [signature(w) for w in range(model.n_world)]
    return join(p, Partition(model.W, tuple(model.arith.group(keys))))


def refine_step(model: LoopModel, p: Partition) -> Partition:
    """Split blocks of ``p`` by every action's block-mass signature."""
    return _refine(model, p, lambda w: _alpha_signature(model, p, w))


def _fixpoint(model: LoopModel, step: Callable[[Partition], Partition]) -> tuple[Partition, RefinementTrace]:
    stages = [sigma_beta(model)]
    while True:
        nxt = step(stages[-1])
        if nxt == stages[-1]:
            break
        stages.append(nxt)
    return stages[-1], RefinementTrace(tuple(stages))


def w_sep(model: LoopModel) -> tuple[Partition, RefinementTrace]:
    """Coarsest partition refining sigma(beta) on which every alpha_a is measurable."""
    return _fixpoint(model, lambda p: refine_step(model, p))


def kappa_step(model: LoopModel, p: Partition, g=None) -> Partition:
    g = g if g is not None else gamma(model)
    z = model.arith.zero

    def sig(w):
        return tuple(tuple(g.rows[w][a] * m for m in block_mass(model.alpha_row(a, w), p, z))
                     for a in range(len(model.A)))

    return _refine(model, p, sig)


def w_am(model: LoopModel) -> tuple[Partition, RefinementTrace]:
    """Minimal partition making beta and kappa = gamma (x) alpha measurable (memoryless agents)."""
    g = gamma(model)
    return _fixpoint(model, lambda p: kappa_step(model, p, g))


def joint_refine_step(model: LoopModel, p: Partition) -> Partition:
    """Refinement driven by (a, w) -> alpha(a, w)(B) on atoms {a} x F of the product.

    With finitely many actions this coincides with :func:`refine_step`.
    """
    na, nw = len(model.A), model.n_world
    z = model.arith.zero
    keys = [(a, p.labels[w], tuple(block_mass(model.alpha_row(a, w), p, z)))
            for a in range(na) for w in range(nw)]
    prod_labels = model.arith.group(keys)
    return Partition(model.W, tuple(tuple(prod_labels[a * nw + w] for a in range(na)) for w in range(nw)))


def check_invariance(model: LoopModel, p: Partition) -> InvarianceResult:
    """Whether every alpha_a^{-1} maps the partition's events into itself.

    Checking blocks is enough (mass on a union of blocks is the sum).  The
    witness names the action, the least state of the offending block, the first
    member disagreeing with it, and the first target block on which the least
    state puts more mass.
    """
    ar = model.arith
    blocks = p.blocks
    for a in range(len(model.A)):
        for blk in blocks:
            w = blk[0]
            ref = block_mass(model.alpha_row(a, w), p, ar.zero)
            for v in blk[1:]:
                other = block_mass(model.alpha_row(a, v), p, ar.zero)
                if ar.vec_eq(ref, other):
                    continue
                b = next(i for i, (x, y) in enumerate(zip(ref, other)) if x > y and not ar.eq(x, y))
                return InvarianceResult(False, model.A.states[a], model.W.states[w], model.W.states[v],
                                        tuple(model.W.states[i] for i in blocks[b]))
    return InvarianceResult(True)


def is_separately_measurable(model: LoopModel, p: Partition) -> bool:
    return sigma_beta(model).coarsens(p) and check_invariance(model, p).ok


def compare_am_sep(model: LoopModel) -> dict:
    """How W_am relates to W_sep on one memoryless model; reported, never asserted."""
    am, _ = w_am(model)
    sep, _ = w_sep(model)
    return {
        "am_coarsens_sep": sep.refines(am),
        "equal": am == sep,
        "am_blocks": am.block_labels(),
        "sep_blocks": sep.block_labels(),
    }
