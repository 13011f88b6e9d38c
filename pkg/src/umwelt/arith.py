"""Scalar arithmetic for kernels: exact rationals or floats with a tolerance."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Sequence, Union

Scalar = Union[Fraction, float]


@dataclass(frozen=True)
class Arithmetic:
    """Model-wide arithmetic mode.

    ``eps`` is ignored in exact mode.  In float mode two scalars compare equal
    when they differ by at most ``eps``.
    """

    exact: bool = True
    eps: float = 0.0

    @classmethod
    def rational(cls) -> "Arithmetic":
        return cls(True, 0.0)

    @classmethod
    def floating(cls, eps: float = 1e-9) -> "Arithmetic":
        if eps <= 0:
            raise ValueError("float arithmetic needs a positive epsilon")
        return cls(False, float(eps))

    @property
    def zero(self) -> Scalar:
        return Fraction(0) if self.exact else 0.0

    @property
    def one(self) -> Scalar:
        return Fraction(1) if self.exact else 1.0

    def parse(self, text) -> Scalar:
        """Parse ``"1/2"``, ``"0.25"``, ints or floats into the mode's scalar type."""
        if isinstance(text, bool):
            raise ValueError(f"not a number: {text!r}")
        if self.exact:
            if isinstance(text, float):
                return Fraction(str(text))
            return Fraction(text.strip() if isinstance(text, str) else text)
        if isinstance(text, str):
            return float(Fraction(text.strip()))
        return float(text)

    def coerce(self, x) -> Scalar:
        if self.exact:
            return x if isinstance(x, Fraction) else Fraction(x)
        return float(x)

    def eq(self, x: Scalar, y: Scalar) -> bool:
        if self.exact:
            return x == y
        return abs(x - y) <= self.eps

    def is_zero(self, x: Scalar) -> bool:
        return self.eq(x, self.zero)

    def vec_eq(self, u: Sequence[Scalar], v: Sequence[Scalar]) -> bool:
        return len(u) == len(v) and all(self.eq(a, b) for a, b in zip(u, v))

    def group(self, keys: Sequence[Hashable]) -> list[int]:
        """Label positions so that equal keys share a label.

        Keys are scalars or (nested) tuples of scalars.  Exact mode hashes the
        keys.  Float mode sorts them and links neighbours whose entries all agree
        within ``eps`` (single linkage); this can depend on the sort order when
        values chain, so exact mode is the authoritative one.
        Labels are raw group numbers, not canonical block ids.
        """
        if self.exact:
            seen: dict = {}
            return [seen.setdefault(k, len(seen)) for k in keys]
        flat = [tuple(_flatten(k)) for k in keys]
        order = sorted(range(len(flat)), key=lambda i: flat[i])
        labels = [0] * len(flat)
        current = 0
        for pos, i in enumerate(order):
            if pos > 0 and not self.vec_eq(flat[order[pos - 1]], flat[i]):
                current += 1
            labels[i] = current
        return labels

    def to_json(self):
        return "rational" if self.exact else {"float": self.eps}

    def fmt(self, x: Scalar) -> str:
        if self.exact:
            return str(x)
        return repr(float(x))


def _flatten(k):
    if isinstance(k, tuple):
        for item in k:
            yield from _flatten(item)
    else:
        yield k
