"""Sensory equivalence: the intrinsic partition of the world.

Two world states are equivalent when every open-loop action word yields the
same distribution of sensor words.  The decision procedure closes the span of
word functionals

    f_{s}(w)          = beta(w, s)
    f_{s a u}(w)      = beta(w, s) * sum_v alpha_a(w, v) f_u(v)

under the operators ``T_{a,s} v = beta(., s) * (alpha_a v)``.  The span has
dimension at most |W|, so the closure terminates after at most |W| additions.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .arith import Scalar
from .model import CapExceeded, LoopModel
from .partition import Partition
from .refinement import InvarianceResult, check_invariance, w_sep

DEFAULT_ORACLE_CAP = 1 << 22


@dataclass(frozen=True)
class EquivalenceBasis:
    """Independent word functionals spanning all of them.

    ``words[i]`` alternates sensor and action labels: ``(s1, a1, s2, ..., sk)``;
    the empty word generates the all-ones vector.
    """

    vectors: tuple[tuple[Scalar, ...], ...]
    words: tuple[tuple[str, ...], ...]
    authoritative: bool = True

    @property
    def dimension(self) -> int:
        return len(self.vectors)

    def to_json(self, fmt=str) -> dict:
        return {"dimension": self.dimension, "authoritative": self.authoritative,
                "vectors": [[fmt(x) for x in v] for v in self.vectors],
                "words": [list(w) for w in self.words]}


@dataclass(frozen=True)
class IntrinsicResult:
    partition: Partition
    basis: EquivalenceBasis

    def to_json(self, fmt=str) -> dict:
        return {"partition": self.partition.to_json(), "basis": self.basis.to_json(fmt)}


class _Echelon:
    """Incremental row-echelon form used for independence tests."""

    def __init__(self, arith, scale: float = 1.0):
        self.arith = arith
        self.rows: list[tuple[int, list]] = []
        self.tol = 0.0 if arith.exact else arith.eps * max(scale, 1.0)

    def _is_zero(self, x) -> bool:
        return x == 0 if self.arith.exact else abs(x) <= self.tol

    def reduce(self, v):
        r = list(v)
        for piv, row in self.rows:
            c = r[piv]
            if not self._is_zero(c):
                for j in range(len(r)):
                    if row[j]:
                        r[j] -= c * row[j]
        return r

    def add(self, v) -> bool:
        r = self.reduce(v)
        if self.arith.exact:
            piv = next((j for j, x in enumerate(r) if x != 0), None)
        else:
            big = max(range(len(r)), key=lambda j: abs(r[j]))
            piv = None if self._is_zero(r[big]) else big
        if piv is None:
            return False
        c = r[piv]
        r = [x / c for x in r]
        for k, (p, row) in enumerate(self.rows):
            if not self._is_zero(row[piv]):
                f = row[piv]
                self.rows[k] = (p, [x - f * y for x, y in zip(row, r)])
        self.rows.append((piv, r))
        return True

    def rank(self) -> int:
        return len(self.rows)


def _apply(model: LoopModel, a: int, s: int, v) -> tuple:
    nw = model.n_world
    out = []
    for w in range(nw):
        b = model.beta.rows[w][s]
        if not b:
            out.append(b * 0)
            continue
        row = model.alpha_row(a, w)
        acc = model.arith.zero
        for u in range(nw):
            if row[u]:
                acc += row[u] * v[u]
        out.append(b * acc)
    return tuple(out)


def build_basis(model: LoopModel) -> EquivalenceBasis:
    """Worklist closure of the word functionals, shortest words first."""
    ar = model.arith
    nw = model.n_world
    ech = _Echelon(ar)
    vectors: list[tuple] = []
    words: list[tuple[str, ...]] = []
    queue: deque[int] = deque()

    def offer(v, word):
        if ech.add(v):
            vectors.append(v)
            words.append(word)
            queue.append(len(vectors) - 1)

    offer(tuple([ar.one] * nw), ())
    for s, label in enumerate(model.S.states):
        offer(tuple(model.beta.rows[w][s] for w in range(nw)), (label,))
    while queue and len(vectors) < nw:
        i = queue.popleft()
        for a, al in enumerate(model.A.states):
            for s, sl in enumerate(model.S.states):
                offer(_apply(model, a, s, vectors[i]), (sl, al) + words[i])
    return EquivalenceBasis(tuple(vectors), tuple(words), authoritative=ar.exact)


def basis_is_closed(model: LoopModel, basis: EquivalenceBasis) -> bool:
    """Every T_{a,s} image of a basis vector stays in the span."""
    ech = _Echelon(model.arith)
    for v in basis.vectors:
        ech.add(v)
    rank = ech.rank()
    for v in basis.vectors:
        for a in range(len(model.A)):
            for s in range(len(model.S)):
                if ech.add(_apply(model, a, s, v)):
                    return False
    return ech.rank() == rank


def partition_from_basis(model: LoopModel, basis: EquivalenceBasis) -> Partition:
    keys = [tuple(v[w] for v in basis.vectors) for w in range(model.n_world)]
    return Partition(model.W, tuple(model.arith.group(keys)))


def intrinsic_partition(model: LoopModel) -> IntrinsicResult:
    """Atoms of the intrinsic sigma-algebra: classes of sensory equivalence."""
    basis = build_basis(model)
    return IntrinsicResult(partition_from_basis(model, basis), basis)


# brute-force oracle

def _word_levels(model: LoopModel, horizon: int, cap: int):
    """Yield, per length k = 1..horizon, the matrix of all word functionals of that length.

    Column j of level k is P(S_1..S_k = s | A_1..A_{k-1} = a, W_1 = w) for one
    (sensor word, action word) pair, enumerated exhaustively.  Rational models
    are evaluated exactly on integers scaled by a common denominator; all
    columns of a level share the same scale.
    """
    na, ns, nw = len(model.A), len(model.S), model.n_world
    if na ** horizon * ns ** horizon > cap:
        raise CapExceeded(f"|A|^h*|S|^h = {na ** horizon * ns ** horizon} exceeds oracle cap {cap}")
    if model.arith.exact:
        entries = [x for r in model.alpha.rows + model.beta.rows for x in r]
        D = math.lcm(*(Fraction(x).denominator for x in entries))
        conv = lambda x: int(x * D)
        dtype = object
    else:
        conv, dtype = float, float
    B = np.array([[conv(x) for x in model.beta.rows[w]] for w in range(nw)], dtype=dtype)
    As = [np.array([[conv(x) for x in model.alpha_row(a, w)] for w in range(nw)], dtype=dtype)
          for a in range(na)]
    F = B.copy()
    yield F
    for _ in range(horizon - 1):
        cols = []
        for s in range(ns):
            for a in range(na):
                cols.append(B[:, [s]] * As[a].dot(F))
        F = np.concatenate(cols, axis=1)
        yield F


@lru_cache(maxsize=64)
def _oracle_labels(model: LoopModel, horizon: int, cap: int) -> tuple[int, ...]:
    labels = [0] * model.n_world
    for F in _word_levels(model, horizon, cap):
        keys = [(labels[w], tuple(F[w].tolist())) for w in range(model.n_world)]
        labels = model.arith.group(keys)
    return tuple(labels)


def brute_force_partition(model: LoopModel, horizon: int, cap: int = DEFAULT_ORACLE_CAP) -> Partition:
    """States grouped by equality of every sensor-word probability up to ``horizon``."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    return Partition(model.W, _oracle_labels(model, horizon, cap))


def brute_force_equivalent(model: LoopModel, w: str, w2: str, horizon: int,
                           cap: int = DEFAULT_ORACLE_CAP) -> bool:
    """Finite-horizon sensory equivalence by enumerating every action and sensor word."""
    p = brute_force_partition(model, horizon, cap)
    return p.block_of(w) == p.block_of(w2)


@dataclass(frozen=True)
class ContainmentReport:
    intrinsic: Partition
    separate: Partition
    equal: bool
    intrinsic_invariance: InvarianceResult

    def to_json(self) -> dict:
        return {"intrinsic_coarsens_sep": True, "equal": self.equal,
                "intrinsic_separately_measurable": self.intrinsic_invariance.to_json()}


class ContainmentViolation(AssertionError):
    pass


def check_containment(model: LoopModel, intr: Partition | None = None,
                      sep: Partition | None = None) -> ContainmentReport:
    """Check that the intrinsic partition coarsens W_sep and that equality holds
    exactly when the intrinsic partition is itself invariant under every alpha_a.

    Raises :class:`ContainmentViolation` with a witness otherwise.
    """
    intr = intr if intr is not None else intrinsic_partition(model).partition
    sep = sep if sep is not None else w_sep(model)[0]
    if not sep.refines(intr):
        for blk in sep.blocks:
            if len({intr.labels[i] for i in blk}) > 1:
                names = [model.W.states[i] for i in blk]
                raise ContainmentViolation(f"W_sep block {names} is split by the intrinsic partition")
    inv = check_invariance(model, intr)
    equal = intr == sep
    if equal != inv.ok:
        raise ContainmentViolation(
            f"intrinsic partition equal={equal} but invariance={inv.ok} ({inv.to_json()})")
    return ContainmentReport(intr, sep, equal, inv)
