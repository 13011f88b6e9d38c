"""Partitions of a finite space, standing in for finite sigma-algebras via their atoms."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable, Iterator, Sequence

from .model import FiniteSpace, ModelError


@dataclass(frozen=True)
class Partition:
    """Block id per state, canonical: ids appear in order of each block's least state.

    Equal partitions are therefore equal values.
    """

    space: FiniteSpace
    labels: tuple[int, ...]

    def __post_init__(self):
        if len(self.labels) != len(self.space):
            raise ModelError("partition labels do not cover the space")
        object.__setattr__(self, "labels", _canonical(self.labels))

    @classmethod
    def from_keys(cls, space: FiniteSpace, keys: Sequence[Hashable]) -> "Partition":
        return cls(space, tuple(keys))

    @classmethod
    def from_blocks(cls, space: FiniteSpace, blocks: Iterable[Iterable]) -> "Partition":
        """Blocks given as state labels or indices."""
        labels = [-1] * len(space)
        for b, block in enumerate(blocks):
            for x in block:
                i = x if isinstance(x, int) else space.index(x)
                if labels[i] != -1:
                    raise ModelError(f"state {space.states[i]!r} appears in two blocks")
                labels[i] = b
        if -1 in labels:
            raise ModelError("blocks do not cover the space")
        return cls(space, tuple(labels))

    @classmethod
    def discrete(cls, space: FiniteSpace) -> "Partition":
        return cls(space, tuple(range(len(space))))

    @classmethod
    def trivial(cls, space: FiniteSpace) -> "Partition":
        return cls(space, (0,) * len(space))

    @property
    def n_blocks(self) -> int:
        return max(self.labels) + 1

    @property
    def blocks(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in range(self.n_blocks)]
        for i, b in enumerate(self.labels):
            out[b].append(i)
        return tuple(tuple(b) for b in out)

    def block_labels(self) -> list[list[str]]:
        return [[self.space.states[i] for i in b] for b in self.blocks]

    def block_of(self, state) -> int:
        i = state if isinstance(state, int) else self.space.index(state)
        return self.labels[i]

    def is_trivial(self) -> bool:
        return self.n_blocks == 1

    def is_discrete(self) -> bool:
        return self.n_blocks == len(self.space)

    def refines(self, other: "Partition") -> bool:
        """True when every block of ``self`` sits inside a block of ``other``."""
        _same_space(self, other)
        image: dict[int, int] = {}
        return all(image.setdefault(a, b) == b for a, b in zip(self.labels, other.labels))

    def coarsens(self, other: "Partition") -> bool:
        return other.refines(self)

    # sigma-algebra view

    def contains(self, subset: Iterable) -> bool:
        """Whether ``subset`` is measurable, i.e. a union of blocks."""
        idx = {x if isinstance(x, int) else self.space.index(x) for x in subset}
        touched = {self.labels[i] for i in idx}
        return all((self.labels[i] in touched) == (i in idx) for i in range(len(self.space)))

    def events(self) -> Iterator[frozenset[int]]:
        """Every measurable set (2^blocks of them), as sets of state indices."""
        blocks = self.blocks
        for mask in range(1 << len(blocks)):
            yield frozenset(i for b, blk in enumerate(blocks) if mask >> b & 1 for i in blk)

    def atom(self, state) -> tuple[int, ...]:
        return self.blocks[self.block_of(state)]

    def to_json(self) -> dict:
        return {"space": self.space.name, "states": list(self.space.states), "blocks": self.block_labels()}

    def __str__(self) -> str:
        return "{" + ", ".join("{" + ",".join(b) + "}" for b in self.block_labels()) + "}"


def _canonical(labels: Sequence[Hashable]) -> tuple[int, ...]:
    seen: dict = {}
    return tuple(seen.setdefault(x, len(seen)) for x in labels)


def _same_space(p: Partition, q: Partition) -> None:
    if p.space != q.space:
        raise ModelError(f"partitions live on different spaces ({p.space.name} vs {q.space.name})")


def generated(space: FiniteSpace, subsets: Iterable[Iterable]) -> Partition:
    """Atoms of the sigma-algebra generated by a family of subsets."""
    member = [[] for _ in range(len(space))]
    for subset in subsets:
        idx = {x if isinstance(x, int) else space.index(x) for x in subset}
        for i in range(len(space)):
            member[i].append(i in idx)
    return Partition(space, tuple(tuple(m) for m in member))


def join(p: Partition, q: Partition) -> Partition:
    """Coarsest common refinement: the atoms of sigma(P u Q)."""
    _same_space(p, q)
    return Partition(p.space, tuple(zip(p.labels, q.labels)))


def meet(p: Partition, q: Partition) -> Partition:
    """Finest common coarsening: the atoms of the intersection of the two sigma-algebras.

    Blocks are connected components of the graph linking states that share a
    block of either partition.
    """
    _same_space(p, q)
    n = len(p.space)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for labels in (p.labels, q.labels):
        first: dict[int, int] = {}
        for i, b in enumerate(labels):
            j = first.setdefault(b, i)
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
    return Partition(p.space, tuple(find(i) for i in range(n)))


def all_partitions(space: FiniteSpace) -> Iterator[Partition]:
    """Every partition of the space, via restricted growth strings."""
    n = len(space)

    def rec(prefix: list[int], top: int):
        if len(prefix) == n:
            yield Partition(space, tuple(prefix))
            return
        for b in range(top + 2):
            prefix.append(b)
            yield from rec(prefix, max(top, b))
            prefix.pop()

    yield from rec([0], 0) if n else iter(())


def lift(p: Partition, product: FiniteSpace, project) -> Partition:
    """Cylinder partition on ``product``: state x goes to the block of ``project(x)``."""
    return Partition(product, tuple(p.labels[project(i)] for i in range(len(product))))

