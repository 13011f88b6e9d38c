"""Finite sensorimotor loops: spaces, Markov kernels, the loop model itself.

A loop has a world ``W``, sensor ``S``, memory ``C`` and actuator ``A`` space
and four kernels::

    alpha: A x W -> W     world update
    beta:  W -> S         sensor
    phi:   S x C -> C     memory update
    pi:    C -> A         policy

Kernels are row-stochastic matrices whose rows follow the lexicographic order of
the source label tuples (first space varies slowest).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .arith import Arithmetic, Scalar

DEFAULT_MAX_HORIZON = 12
DEFAULT_TABLE_CAP = 4 ** DEFAULT_MAX_HORIZON


class ModelError(ValueError):
    """Structurally malformed model data (shape or label errors)."""


class CapExceeded(RuntimeError):
    """A dense table or product space would exceed its configured size cap."""


@dataclass(frozen=True)
class FiniteSpace:
    name: str
    states: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(str(s) for s in self.states))
        if not self.states:
            raise ModelError(f"space {self.name!r} is empty")
        if len(set(self.states)) != len(self.states):
            raise ModelError(f"space {self.name!r} has duplicate labels")

    def __len__(self) -> int:
        return len(self.states)

    def index(self, label: str) -> int:
        try:
            return self.states.index(str(label))
        except ValueError:
            raise ModelError(f"{label!r} is not a state of {self.name!r}") from None


def product_space(spaces: Sequence[FiniteSpace], name: str | None = None, sep: str = ",") -> FiniteSpace:
    """Product of spaces with labels ``"x,y,..."`` in lexicographic order."""
    if len(spaces) == 1 and name is None:
        return spaces[0]
    labels = [sep.join(t) for t in itertools.product(*(s.states for s in spaces))]
    return FiniteSpace(name or "x".join(s.name for s in spaces), tuple(labels))


def _size(spaces: Sequence[FiniteSpace]) -> int:
    return math.prod(len(s) for s in spaces)


@dataclass(frozen=True)
class Kernel:
    """Row-stochastic map from a product of spaces to distributions over another."""

    source: tuple[FiniteSpace, ...]
    target: tuple[FiniteSpace, ...]
    rows: tuple[tuple[Scalar, ...], ...]

    def __post_init__(self):
        if isinstance(self.source, FiniteSpace):
            object.__setattr__(self, "source", (self.source,))
        if isinstance(self.target, FiniteSpace):
            object.__setattr__(self, "target", (self.target,))
        object.__setattr__(self, "source", tuple(self.source))
        object.__setattr__(self, "target", tuple(self.target))
        object.__setattr__(self, "rows", tuple(tuple(r) for r in self.rows))
        if len(self.rows) != self.n_source:
            raise ModelError(
                f"kernel {self.describe()} has {len(self.rows)} rows, expected {self.n_source}"
            )
        for i, r in enumerate(self.rows):
            if len(r) != self.n_target:
                raise ModelError(
                    f"kernel {self.describe()} row {i} has {len(r)} entries, expected {self.n_target}"
                )

    @property
    def n_source(self) -> int:
        return _size(self.source)

    @property
    def n_target(self) -> int:
        return _size(self.target)

    def describe(self) -> str:
        return f"{'x'.join(s.name for s in self.source)}->{'x'.join(t.name for t in self.target)}"

    def row_index(self, *idx: int) -> int:
        """Flat row for per-space source indices, e.g. ``alpha.row_index(a, w)``."""
        r = 0
        for space, i in zip(self.source, idx, strict=True):
            r = r * len(space) + i
        return r

    def row(self, *idx: int) -> tuple[Scalar, ...]:
        return self.rows[self.row_index(*idx)]

    def source_labels(self) -> list[tuple[str, ...]]:
        return list(itertools.product(*(s.states for s in self.source)))

    def target_labels(self) -> list[tuple[str, ...]]:
        return list(itertools.product(*(s.states for s in self.target)))

    def to_float(self) -> np.ndarray:
        return np.array([[float(x) for x in r] for r in self.rows], dtype=float)


def identity(space: FiniteSpace, arith: Arithmetic = Arithmetic()) -> Kernel:
    n = len(space)
    return Kernel((space,), (space,), tuple(
        tuple(arith.one if i == j else arith.zero for j in range(n)) for i in range(n)))


def constant(source: Sequence[FiniteSpace], target: Sequence[FiniteSpace], dist: Sequence[Scalar]) -> Kernel:
    return Kernel(tuple(source), tuple(target), tuple(tuple(dist) for _ in range(_size(source))))


def dirac(n: int, i: int, arith: Arithmetic = Arithmetic()) -> tuple[Scalar, ...]:
    return tuple(arith.one if j == i else arith.zero for j in range(n))


def compose(k1: Kernel, k2: Kernel) -> Kernel:
    """Chain ``k1`` then ``k2`` (matrix product)."""
    if k1.target != k2.source:
        raise ModelError(f"cannot compose {k1.describe()} with {k2.describe()}: space mismatch")
    rows = []
    for r in k1.rows:
        out = [r[0] * 0] * k2.n_target
        for j, p in enumerate(r):
            if p:
                for m, q in enumerate(k2.rows[j]):
                    out[m] += p * q
        rows.append(tuple(out))
    return Kernel(k1.source, k2.target, tuple(rows))


def _check_rows(name: str, k: Kernel, arith: Arithmetic) -> list[str]:
    out = []
    labels = k.source_labels()
    for i, r in enumerate(k.rows):
        where = f"{name} row {i} ({','.join(labels[i])})"
        neg = [j for j, x in enumerate(r) if x < (0 if arith.exact else -arith.eps)]
        if neg:
            out.append(f"{where}: negative entry at column {neg[0]}")
        total = sum(r, arith.zero)
        if not arith.eq(total, arith.one):
            out.append(f"{where}: row sums to {arith.fmt(total)}, not 1")
    return out


@dataclass(frozen=True)
class LoopModel:
    W: FiniteSpace
    S: FiniteSpace
    C: FiniteSpace
    A: FiniteSpace
    alpha: Kernel
    beta: Kernel
    phi: Kernel
    pi: Kernel
    initial: tuple[Scalar, ...] | None = None
    memoryless: bool = False
    arith: Arithmetic = field(default_factory=Arithmetic)

    @property
    def n_world(self) -> int:
        return len(self.W)

    def alpha_row(self, a: int, w: int) -> tuple[Scalar, ...]:
        return self.alpha.rows[a * len(self.W) + w]

    def beta_row(self, w: int) -> tuple[Scalar, ...]:
        return self.beta.rows[w]

    def initial_distribution(self) -> tuple[Scalar, ...]:
        """Distribution over W x S x C x A; uniform on W and Dirac elsewhere by default."""
        if self.initial is not None:
            return self.initial
        nw = len(self.W)
        rest = len(self.S) * len(self.C) * len(self.A)
        p = self.arith.one / nw if self.arith.exact else 1.0 / nw
        return tuple(p if j == 0 else self.arith.zero for _ in range(nw) for j in range(rest))

    def with_alpha(self, alpha: Kernel) -> "LoopModel":
        return LoopModel(self.W, self.S, self.C, self.A, alpha, self.beta, self.phi, self.pi,
                         self.initial, self.memoryless, self.arith)


def make_model(
    W: Sequence[str],
    S: Sequence[str],
    alpha: dict[str, Sequence[Sequence]] | Sequence[Sequence],
    beta: Sequence[Sequence],
    *,
    A: Sequence[str] = ("a",),
    C: Sequence[str] = ("c",),
    phi: Sequence[Sequence] | None = None,
    pi: Sequence[Sequence] | None = None,
    memoryless: bool | None = None,
    arith: Arithmetic = Arithmetic(),
) -> LoopModel:
    """Convenience constructor from nested lists of numbers or rational strings.

    ``alpha`` is either a mapping action -> |W| rows or the flat |A|*|W| rows.
    Missing ``phi``/``pi`` default to a memory that stays in its first state and
    a uniform policy.
    """
    Ws, Ss, As, Cs = (FiniteSpace(n, tuple(x)) for n, x in
                      (("W", W), ("S", S), ("A", A), ("C", C)))
    conv = lambda rows: tuple(tuple(arith.parse(x) if isinstance(x, str) else arith.coerce(x)
                                    for x in r) for r in rows)
    if isinstance(alpha, dict):
        flat = [r for a in As.states for r in alpha[a]]
    else:
        flat = list(alpha)
    if phi is None:
        phi = [dirac(len(Cs), 0, arith)] * (len(Ss) * len(Cs))
    if pi is None:
        u = arith.one / len(As) if arith.exact else 1.0 / len(As)
        pi = [[u] * len(As)] * len(Cs)
    k_phi = Kernel((Ss, Cs), (Cs,), conv(phi))
    if memoryless is None:
        memoryless = phi_is_memoryless(k_phi, arith)
    return LoopModel(
        Ws, Ss, Cs, As,
        alpha=Kernel((As, Ws), (Ws,), conv(flat)),
        beta=Kernel((Ws,), (Ss,), conv(beta)),
        phi=k_phi,
        pi=Kernel((Cs,), (As,), conv(pi)),
        memoryless=memoryless,
        arith=arith,
    )


def phi_is_memoryless(phi: Kernel, arith: Arithmetic) -> bool:
    nc = len(phi.source[1])
    for s in range(len(phi.source[0])):
        first = phi.rows[s * nc]
        if any(not arith.vec_eq(first, phi.rows[s * nc + c]) for c in range(1, nc)):
            return False
    return True


def validate(model: LoopModel) -> list[str]:
    """All violated model invariants, one message each; empty when valid."""
    out: list[str] = []
    W, S, C, A = model.W, model.S, model.C, model.A
    wiring = {
        "alpha": ((A, W), (W,)),
        "beta": ((W,), (S,)),
        "phi": ((S, C), (C,)),
        "pi": ((C,), (A,)),
    }
    for name, (src, tgt) in wiring.items():
        k: Kernel = getattr(model, name)
        if k.source != src or k.target != tgt:
            want = f"{'x'.join(s.name for s in src)}->{'x'.join(t.name for t in tgt)}"
            out.append(f"{name}: wired as {k.describe()}, expected {want}")
            continue
        out.extend(_check_rows(name, k, model.arith))
    if model.memoryless and model.phi.source == (S, C) and not phi_is_memoryless(model.phi, model.arith):
        out.append("phi: memoryless is set but phi rows depend on the previous memory state")
    if model.initial is not None:
        n = len(W) * len(S) * len(C) * len(A)
        if len(model.initial) != n:
            out.append(f"initial: has {len(model.initial)} entries, expected {n}")
        else:
            if any(x < 0 for x in model.initial):
                out.append("initial: negative entry")
            if not model.arith.eq(sum(model.initial, model.arith.zero), model.arith.one):
                out.append("initial: does not sum to 1")
    return out


def memory_sensor_kernel(model: LoopModel) -> Kernel:
    """phi read as S -> C, valid when the agent is memoryless."""
    nc = len(model.C)
    return Kernel((model.S,), (model.C,), tuple(model.phi.rows[s * nc] for s in range(len(model.S))))


def _require_memoryless(model: LoopModel) -> None:
    if not model.memoryless:
        raise ModelError("operation requires a memoryless agent (memoryless flag unset)")


def gamma(model: LoopModel) -> Kernel:
    """World state -> action distribution for a memoryless agent."""
    _require_memoryless(model)
    return compose(compose(model.beta, memory_sensor_kernel(model)), model.pi)


def kappa(model: LoopModel) -> Kernel:
    """W -> A x W kernel with kappa(w)(a, w') = gamma(w)(a) * alpha(a, w)(w')."""
    g = gamma(model)
    nw = len(model.W)
    rows = []
    for w in range(nw):
        rows.append(tuple(g.rows[w][a] * model.alpha_row(a, w)[v]
                          for a in range(len(model.A)) for v in range(nw)))
    return Kernel((model.W,), (model.A, model.W), tuple(rows))


@dataclass(frozen=True)
class SensorProcess:
    """Distribution of sensor words under a fixed open-loop action word."""

    action_word: tuple[str, ...]
    table: dict[tuple[str, ...], Scalar]

    def total(self):
        return sum(self.table.values())

    def tv_distance(self, other: "SensorProcess") -> float:
        keys = set(self.table) | set(other.table)
        return 0.5 * sum(abs(float(self.table.get(k, 0)) - float(other.table.get(k, 0))) for k in keys)


def _word_indices(space: FiniteSpace, word: Iterable[str]) -> list[int]:
    return [space.index(x) for x in word]


def sensor_process(model: LoopModel, w: str, word: Sequence[str], *, cap: int = DEFAULT_TABLE_CAP) -> SensorProcess:
    """Exact table of sensor words of length ``len(word)`` started in world state ``w``.

    The policy is overridden by the action word.  The n-th sensor value is read
    before the n-th action is applied, so the last action never affects the table.
    """
    n = len(word)
    if len(model.S) ** n > cap:
        raise CapExceeded(f"{len(model.S)}^{n} sensor words exceed table cap {cap}")
    acts = _word_indices(model.A, word)
    ar = model.arith
    nw = len(model.W)
    table: dict[tuple[str, ...], Scalar] = {}
    start = [ar.zero] * nw
    start[model.W.index(w)] = ar.one

    def walk(k: int, mass: list, prefix: tuple[str, ...]):
        # mass: unnormalised distribution of W_{k+1} jointly with the sensor prefix
        if k == n:
            table[prefix] = sum(mass, ar.zero)
            return
        for s, label in enumerate(model.S.states):
            seen = [m * model.beta.rows[v][s] for v, m in enumerate(mass)]
            if k + 1 == n:
                table[prefix + (label,)] = sum(seen, ar.zero)
                continue
            nxt = [ar.zero] * nw
            for v, m in enumerate(seen):
                if m:
                    row = model.alpha_row(acts[k], v)
                    for u in range(nw):
                        nxt[u] += m * row[u]
            walk(k + 1, nxt, prefix + (label,))

    walk(0, start, ())
    return SensorProcess(tuple(word), table)


def _cumulative(k: Kernel) -> np.ndarray:
    c = np.cumsum(k.to_float(), axis=1)
    c[:, -1] = np.inf
    return c


def _draw(cum: np.ndarray, rows: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    u = rng.random(len(rows))
    return (cum[rows] <= u[:, None]).sum(axis=1)


def simulate(model: LoopModel, w: str, word: Sequence[str], samples: int, seed: int = 0) -> SensorProcess:
    """Empirical sensor-word frequencies from ``samples`` seeded rollouts."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    acts = _word_indices(model.A, word)
    nw = len(model.W)
    cum_beta = _cumulative(model.beta)
    cum_alpha = _cumulative(model.alpha)
    state = np.full(samples, model.W.index(w), dtype=np.int64)
    sensed = np.zeros((samples, len(word)), dtype=np.int64)
    for k in range(len(word)):
        sensed[:, k] = _draw(cum_beta, state, rng)
        if k + 1 < len(word):
            state = _draw(cum_alpha, acts[k] * nw + state, rng)
    table: dict[tuple[str, ...], Scalar] = {}
    if len(word) == 0:
        table[()] = model.arith.one
    else:
        ns = len(model.S)
        codes = np.zeros(samples, dtype=np.int64)
        for k in range(len(word)):
            codes = codes * ns + sensed[:, k]
        counts = np.bincount(codes)
        for code in np.flatnonzero(counts):
            key = tuple(model.S.states[i] for i in np.unravel_index(code, (ns,) * len(word)))
            cnt = int(counts[code])
            table[key] = Fraction(cnt, samples) if model.arith.exact else cnt / samples
    return SensorProcess(tuple(word), table)


def rollout(model: LoopModel, steps: int, samples: int = 1, seed: int = 0) -> np.ndarray:
    """Closed-loop trajectories (policy and memory active) from the initial distribution.

    Returns an int array of shape ``(samples, steps, 4)`` holding the indices of
    ``(w, s, c, a)`` at each step.
    """
    rng = np.random.default_rng(seed)
    nw, ns, nc, na = len(model.W), len(model.S), len(model.C), len(model.A)
    init = np.array([float(x) for x in model.initial_distribution()])
    flat = rng.choice(len(init), size=samples, p=init / init.sum())
    w, rest = np.divmod(flat, ns * nc * na)
    s, rest = np.divmod(rest, nc * na)
    c, a = np.divmod(rest, na)
    cum_a, cum_b, cum_phi, cum_pi = map(_cumulative, (model.alpha, model.beta, model.phi, model.pi))
    out = np.zeros((samples, steps, 4), dtype=np.int64)
    for t in range(steps):
        if t > 0:
            w = _draw(cum_a, a * nw + w, rng)
            s = _draw(cum_b, w, rng)
            c = _draw(cum_phi, s * nc + c, rng)
            a = _draw(cum_pi, c, rng)
        out[:, t] = np.stack([w, s, c, a], axis=1)
    return out
