"""Exhaustive reference computations, kept independent of the refinement code."""
from __future__ import annotations

from fractions import Fraction
from typing import Iterator

from .model import LoopModel


def set_partitions(n: int) -> Iterator[tuple[int, ...]]:
    """Restricted growth strings of length n (one per set partition)."""
    if n == 0:
        return
    a = [0] * n

    def rec(i: int, top: int):
        if i == n:
            yield tuple(a)
            return
        for b in range(top + 2):
            a[i] = b
            yield from rec(i + 1, max(top, b))

    yield from rec(1, 0)


def _respects_beta(model: LoopModel, labels) -> bool:
    first: dict[int, int] = {}
    for w, b in enumerate(labels):
        v = first.setdefault(b, w)
        if model.beta.rows[v] != model.beta.rows[w]:
            return False
    return True


def _stable(model: LoopModel, labels) -> bool:
    nw = model.n_world
    k = max(labels) + 1
    for a in range(len(model.A)):
        ref: dict[int, list] = {}
        for w in range(nw):
            row = model.alpha.rows[a * nw + w]
            mass = [Fraction(0)] * k
            for v in range(nw):
                mass[labels[v]] += row[v]
            if ref.setdefault(labels[w], mass) != mass:
                return False
    return True


def coarsest_stable_partition(model: LoopModel) -> tuple[tuple[int, ...], list[tuple[int, ...]]]:
    """Enumerate every partition of W; return the coarsest one that keeps beta rows
    constant on blocks and is alpha_a-stable for all a, plus all stable ones."""
    if not model.arith.exact:
        raise ValueError("oracle works in exact arithmetic only")
    stable = [p for p in set_partitions(model.n_world)
              if _respects_beta(model, p) and _stable(model, p)]
    best = min(stable, key=lambda p: max(p))
    return best, stable


def finer_or_equal(p, q) -> bool:
    """Label-vector refinement test (p's blocks inside q's)."""
    image: dict[int, int] = {}
    return all(image.setdefault(a, b) == b for a, b in zip(p, q))


def gamma_by_paths(model: LoopModel) -> list[list[Fraction]]:
    """gamma(w)(a) summed over every (s, c) path, reading phi at the first memory state."""
    nw, ns, nc, na = model.n_world, len(model.S), len(model.C), len(model.A)
    out = []
    for w in range(nw):
        row = [Fraction(0)] * na
        for s in range(ns):
            for c in range(nc):
                for a in range(na):
                    row[a] += model.beta.rows[w][s] * model.phi.rows[s * nc][c] * model.pi.rows[c][a]
        out.append(row)
    return out


def word_functional_rank(model: LoopModel, horizon: int) -> int:
    """Rank of all word functionals of length <= horizon, plus the constant one."""
    from sympy import Matrix

    nw = model.n_world
    vecs = [[Fraction(1)] * nw]
    level = [[model.beta.rows[w][s] for w in range(nw)] for s in range(len(model.S))]
    vecs += level
    for _ in range(horizon - 1):
        nxt = []
        for f in level:
            for a in range(len(model.A)):
                moved = [sum(model.alpha.rows[a * nw + w][v] * f[v] for v in range(nw)) for w in range(nw)]
                for s in range(len(model.S)):
                    nxt.append([model.beta.rows[w][s] * moved[w] for w in range(nw)])
        level = nxt
        vecs += level
    return Matrix(vecs).rank()
