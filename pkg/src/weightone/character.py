"""Characters of a finite abelian class group, as exponent vectors."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .classgroup import ClassGroup
from .cyclotomic import CyclotomicSum, RootOfUnity

__all__ = ["ClassCharacter", "RootOfUnity", "all_characters", "is_real", "conjugate_pairs"]


@dataclass(frozen=True, eq=False)
class ClassCharacter:
    """psi(x) = e(sum_i exponents[i] * x_i / d_i) on coordinates x of the class group."""

    group: ClassGroup
    exponents: tuple[int, ...]

    def __post_init__(self):
        if len(self.exponents) != len(self.group.structure):
            raise ValueError("one exponent per elementary divisor")
        exps = tuple(int(e) % d for e, d in zip(self.exponents, self.group.structure))
        object.__setattr__(self, "exponents", exps)

    def __eq__(self, other):
        return (
            isinstance(other, ClassCharacter)
            and other.group is self.group
            and other.exponents == self.exponents
        )

    def __hash__(self):
        return hash((id(self.group), self.exponents))

    def __repr__(self):
        return f"ClassCharacter(q={self.group.q}, exponents={self.exponents})"

    @property
    def order(self) -> int:
        out = 1
        for e, d in zip(self.exponents, self.group.structure):
            out = math.lcm(out, d // math.gcd(e, d))
        return out

    def exponent_values(self, classes=None) -> np.ndarray:
        """k with psi(class) = e(k / order), for class indices (default: all)."""
        G = self.group
        coords = G.coords if classes is None else G.coords[np.asarray(classes)]
        D = G.exponent
        k = np.zeros(coords.shape[:-1], dtype=np.int64)
        for i, (e, d) in enumerate(zip(self.exponents, G.structure)):
            k = k + coords[..., i] * (e * (D // d))
        k %= D
        return k // (D // self.order)

    def __call__(self, cls: int) -> RootOfUnity:
        return RootOfUnity(int(self.exponent_values([cls])[0]), self.order)

    def value(self, cls: int) -> CyclotomicSum:
        return CyclotomicSum.zeta(self.order, int(self.exponent_values([cls])[0]))

    def conjugate(self) -> ClassCharacter:
        return ClassCharacter(self.group, tuple(-e for e in self.exponents))

    def __mul__(self, other: ClassCharacter) -> ClassCharacter:
        return ClassCharacter(self.group, tuple(a + b for a, b in zip(self.exponents, other.exponents)))

    def is_trivial(self) -> bool:
        return not any(self.exponents)


def all_characters(G: ClassGroup) -> list[ClassCharacter]:
    """All h characters, lexicographic in exponent vectors (trivial first)."""
    return [ClassCharacter(G, e) for e in itertools.product(*(range(d) for d in G.structure))]


def is_real(psi: ClassCharacter) -> bool:
    return (psi * psi).is_trivial()


def conjugate_pairs(G: ClassGroup) -> list[tuple[ClassCharacter, ClassCharacter]]:
    """Pairs (psi, conj psi) of non-real characters, lexicographically smaller first."""
    pairs = []
    for psi in all_characters(G):
        if is_real(psi):
            continue
        bar = psi.conjugate()
        if psi.exponents < bar.exponents:
            pairs.append((psi, bar))
    return pairs
