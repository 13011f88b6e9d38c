"""Seeded random loop models with small-denominator rational kernels.

Rows are drawn from small per-kernel pools so that coincident rows, and hence
non-trivial partitions, are common.  Some models also carry a planted gadget of
three extra states m, n, z: m moves to p or q with probability 1/2 each, n moves
to z, and z senses like the even mixture of p and q and then continues like both.
m and n then emit identical sensor processes while their successors stay
distinguishable, so the intrinsic partition is strictly coarser than W_sep.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .arith import Arithmetic
from .model import FiniteSpace, Kernel, LoopModel
from .partition import Partition


@dataclass(frozen=True)
class ModelBounds:
    max_w: int = 8
    max_s: int = 4
    max_a: int = 4
    max_c: int = 2
    max_den: int = 8
    min_w: int = 1
    gadget_rate: float = 0.35


def random_row(rng: random.Random, n: int, max_den: int = 8) -> tuple[Fraction, ...]:
    """Multinomial row k_i/d with d <= max_den."""
    return _row_over(rng, n, rng.randint(1, max_den))


def _row_over(rng: random.Random, n: int, d: int) -> tuple[Fraction, ...]:
    counts = [0] * n
    for _ in range(d):
        counts[rng.randrange(n)] += 1
    return tuple(Fraction(c, d) for c in counts)


def _pooled_rows(rng: random.Random, count: int, width: int, max_den: int) -> list[tuple]:
    pool = [random_row(rng, width, max_den) for _ in range(rng.randint(1, count))]
    return [rng.choice(pool) for _ in range(count)]


def random_model(rng: random.Random, bounds: ModelBounds = ModelBounds(), *,
                 nw: int | None = None, ns: int | None = None, na: int | None = None,
                 memoryless: bool | None = None) -> LoopModel:
    nw = nw or rng.randint(bounds.min_w, bounds.max_w)
    ns = ns or rng.randint(1, bounds.max_s)
    na = na or rng.randint(1, bounds.max_a)
    nc = rng.randint(1, bounds.max_c)
    memoryless = rng.random() < 0.5 if memoryless is None else memoryless
    den = bounds.max_den
    planted = nw >= 5 and rng.random() < bounds.gadget_rate
    nb = nw - 3 if planted else nw
    W = FiniteSpace("W", tuple(str(i + 1) for i in range(nw)))
    S = FiniteSpace("S", tuple(str(i) for i in range(ns)))
    C = FiniteSpace("C", tuple(f"c{i}" for i in range(nc)))
    A = FiniteSpace("A", tuple(f"a{i}" for i in range(na)))
    beta = _pooled_rows(rng, nb, ns, den)
    alpha = [[r for r in _pooled_rows(rng, nb, nb, den)] for _ in range(na)]
    if planted:
        _plant_gadget(rng, beta, alpha, ns, den)
    alpha = [r for rows in alpha for r in rows]
    if memoryless:
        per_s = [random_row(rng, nc, den) for _ in range(ns)]
        phi = [per_s[s] for s in range(ns) for _ in range(nc)]
    else:
        phi = [random_row(rng, nc, den) for _ in range(ns * nc)]
    pi = [random_row(rng, na, den) for _ in range(nc)]
    return LoopModel(
        W, S, C, A,
        alpha=Kernel((A, W), (W,), alpha),
        beta=Kernel((W,), (S,), beta),
        phi=Kernel((S, C), (C,), phi),
        pi=Kernel((C,), (A,), pi),
        memoryless=memoryless,
        arith=Arithmetic.rational(),
    )


def _plant_gadget(rng: random.Random, beta: list, alpha: list[list], ns: int, den: int) -> None:
    """Append states m, n, z (see module docstring) in place."""
    nb = len(beta)
    p, q = rng.sample(range(nb), 2)
    # a shared denominator d keeps the even mixture within 2d <= den
    d = rng.randint(1, max(1, den // 2))
    beta[p] = _row_over(rng, ns, d)
    beta[q] = _row_over(rng, ns, d)
    r = random_row(rng, ns, den)
    half = Fraction(1, 2)
    beta += [r, r, tuple(half * (x + y) for x, y in zip(beta[p], beta[q]))]
    n = nb + 3
    for rows in alpha:
        rows[q] = rows[p]
        rows[:] = [tuple(row) + (Fraction(0),) * 3 for row in rows]
        to_pq = [Fraction(0)] * n
        to_pq[p] += half
        to_pq[q] += half
        to_z = [Fraction(0)] * n
        to_z[nb + 2] = Fraction(1)
        rows += [tuple(to_pq), tuple(to_z), rows[p]]


def model_rng(seed: int, k: int) -> random.Random:
    return random.Random(f"umwelt-{seed}-{k}")


def random_partition(rng: random.Random, space: FiniteSpace) -> Partition:
    k = rng.randint(1, len(space))
    return Partition(space, tuple(rng.randrange(k) for _ in range(len(space))))
