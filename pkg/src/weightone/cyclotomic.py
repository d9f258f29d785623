"""Exact arithmetic in Z[zeta_d].

Elements are stored in the power basis 1, zeta, ..., zeta^(phi(d)-1) after
reduction modulo the d-th cyclotomic polynomial, so two elements of the same
modulus are equal iff their coefficient tuples are equal.  The ``*_array``
helpers do the same arithmetic on int64 arrays of shape (..., phi(d)).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np


def _poly_divexact(num: list[int], den: list[int]) -> list[int]:
    # coefficient lists, lowest degree first; den monic
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        coef = num[i + len(den) - 1]
        out[i] = coef
        if coef:
            for j, dj in enumerate(den):
                num[i + j] -= coef * dj
    if any(num[: len(den) - 1]):
        raise ArithmeticError("inexact polynomial division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(d: int) -> tuple[int, ...]:
    """Coefficients of Phi_d, lowest degree first."""
    if d < 1:
        raise ValueError("d must be >= 1")
    poly = [-1] + [0] * (d - 1) + [1]
    for e in range(1, d):
        if d % e == 0:
            poly = _poly_divexact(poly, list(cyclotomic_polynomial(e)))
    return tuple(poly)


def euler_phi(d: int) -> int:
    return len(cyclotomic_polynomial(d)) - 1


@lru_cache(maxsize=None)
def reduction_matrix(d: int) -> np.ndarray:
    """Row k holds zeta_d^k in the power basis (shape (d, phi(d)))."""
    phi = euler_phi(d)
    cyc = cyclotomic_polynomial(d)
    rows = np.zeros((d, phi), dtype=np.int64)
    cur = [0] * phi
    cur[0] = 1
    for k in range(d):
        rows[k] = cur
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            for j in range(phi):
                cur[j] -= top * cyc[j]
    rows.setflags(write=False)
    return rows


@lru_cache(maxsize=None)
def _ramanujan_traces(d: int) -> tuple[int, ...]:
    # Tr_{Q(zeta_d)/Q}(zeta_d^k) = mu(d/g) phi(d)/phi(d/g), g = gcd(k, d)
    out = []
    for k in range(euler_phi(d)):
        m = d // math.gcd(k, d)
        out.append(_mobius(m) * euler_phi(d) // euler_phi(m))
    return tuple(out)


def _mobius(n: int) -> int:
    result, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            result = -result
        p += 1
    return -result if n > 1 else result


@dataclass(frozen=True, order=True)
class RootOfUnity:
    """e(num/den) with 0 <= num < den and gcd(num, den) = 1."""

    num: int
    den: int

    def __post_init__(self):
        if self.den < 1:
            raise ValueError("denominator must be positive")
        g = math.gcd(self.num, self.den)
        object.__setattr__(self, "num", (self.num // g) % (self.den // g))
        object.__setattr__(self, "den", self.den // g)

    @classmethod
    def from_fraction(cls, t: Fraction) -> RootOfUnity:
        return cls(t.numerator, t.denominator)

    @property
    def order(self) -> int:
        return self.den

    def __mul__(self, other: RootOfUnity) -> RootOfUnity:
        den = self.den * other.den // math.gcd(self.den, other.den)
        return RootOfUnity(self.num * (den // self.den) + other.num * (den // other.den), den)

    def __truediv__(self, other: RootOfUnity) -> RootOfUnity:
        return self * other.conjugate()

    def __pow__(self, k: int) -> RootOfUnity:
        return RootOfUnity(self.num * k, self.den)

    def conjugate(self) -> RootOfUnity:
        return RootOfUnity(-self.num, self.den)

    def to_complex(self) -> complex:
        return cmath.exp(2j * math.pi * self.num / self.den)

    def to_cyclotomic(self, modulus: int | None = None) -> CyclotomicSum:
        d = modulus or self.den
        if d % self.den:
            raise ValueError(f"e({self.num}/{self.den}) does not live in Q(zeta_{d})")
        return CyclotomicSum.from_exponents(d, {self.num * (d // self.den): 1})


class CyclotomicSum:
    """An element of Z[zeta_d], canonical in the power basis."""

    __slots__ = ("modulus", "coeffs")

    def __init__(self, modulus: int, coeffs):
        coeffs = tuple(int(c) for c in coeffs)
        if len(coeffs) != euler_phi(modulus):
            raise ValueError(f"need {euler_phi(modulus)} power-basis coefficients for d={modulus}")
        object.__setattr__(self, "modulus", modulus)
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, name, value):
        raise AttributeError("CyclotomicSum is immutable")

    @classmethod
    def from_group_ring(cls, modulus: int, vector) -> CyclotomicSum:
        """Reduce a vector indexed by exponents mod d."""
        vec = np.asarray(vector, dtype=np.int64)
        if vec.shape != (modulus,):
            raise ValueError("group ring vector must have length d")
        return cls(modulus, vec @ reduction_matrix(modulus))

    @classmethod
    def from_exponents(cls, modulus: int, terms: dict[int, int]) -> CyclotomicSum:
        vec = np.zeros(modulus, dtype=np.int64)
        for k, c in terms.items():
            vec[k % modulus] += c
        return cls.from_group_ring(modulus, vec)

    @classmethod
    def integer(cls, n: int, modulus: int = 1) -> CyclotomicSum:
        return cls.from_exponents(modulus, {0: n})

    @classmethod
    def zeta(cls, modulus: int, k: int = 1) -> CyclotomicSum:
        return cls.from_exponents(modulus, {k: 1})

    def lift(self, modulus: int) -> CyclotomicSum:
        if modulus % self.modulus:
            raise ValueError(f"cannot lift from d={self.modulus} to d={modulus}")
        if modulus == self.modulus:
            return self
        step = modulus // self.modulus
        return CyclotomicSum.from_exponents(
            modulus, {k * step: c for k, c in enumerate(self.coeffs) if c}
        )

    def _common(self, other) -> tuple[CyclotomicSum, CyclotomicSum]:
        if isinstance(other, int):
            other = CyclotomicSum.integer(other, self.modulus)
        if not isinstance(other, CyclotomicSum):
            return NotImplemented
        if other.modulus == self.modulus:
            return self, other
        d = math.lcm(self.modulus, other.modulus)
        return self.lift(d), other.lift(d)

    def __add__(self, other):
        pair = self._common(other)
        if pair is NotImplemented:
            return NotImplemented
        a, b = pair
        return CyclotomicSum(a.modulus, (x + y for x, y in zip(a.coeffs, b.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicSum(self.modulus, (-x for x in self.coeffs))

    def __sub__(self, other):
        pair = self._common(other)
        if pair is NotImplemented:
            return NotImplemented
        a, b = pair
        return CyclotomicSum(a.modulus, (x - y for x, y in zip(a.coeffs, b.coeffs)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return CyclotomicSum(self.modulus, (other * x for x in self.coeffs))
        pair = self._common(other)
        if pair is NotImplemented:
            return NotImplemented
        a, b = pair
        prod = multiply_arrays(
            np.array(a.coeffs, dtype=np.int64), np.array(b.coeffs, dtype=np.int64), a.modulus
        )
        return CyclotomicSum(a.modulus, prod)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> CyclotomicSum:
        if k < 0:
            raise ValueError("negative powers are not supported")
        out = CyclotomicSum.integer(1, self.modulus)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self) -> CyclotomicSum:
        """Complex conjugation, k -> -k on exponents."""
        return CyclotomicSum.from_exponents(
            self.modulus, {-k: c for k, c in enumerate(self.coeffs) if c}
        )

    def galois_conjugate(self, a: int) -> CyclotomicSum:
        """The automorphism zeta -> zeta^a, gcd(a, d) = 1."""
        if math.gcd(a, self.modulus) != 1:
            raise ValueError("a must be a unit mod d")
        return CyclotomicSum.from_exponents(
            self.modulus, {a * k: c for k, c in enumerate(self.coeffs) if c}
        )

    def embeddings(self) -> list[complex]:
        d = self.modulus
        return [self.galois_conjugate(a).to_complex() for a in range(1, d + 1) if math.gcd(a, d) == 1]

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def to_complex(self) -> complex:
        d = self.modulus
        return sum(c * cmath.exp(2j * math.pi * k / d) for k, c in enumerate(self.coeffs) if c) + 0j

    def __complex__(self):
        return self.to_complex()

    def __abs__(self) -> float:
        return abs(self.to_complex())

    def trace(self) -> Fraction:
        """Normalized trace Tr(x)/phi(d); independent of the ambient modulus."""
        tr = sum(c * t for c, t in zip(self.coeffs, _ramanujan_traces(self.modulus)))
        return Fraction(tr, euler_phi(self.modulus))

    def exact_repr(self) -> str:
        """``exponent:coefficient`` pairs joined by ';' (``0:0`` for zero)."""
        parts = [f"{k}:{c}" for k, c in enumerate(self.coeffs) if c]
        return ";".join(parts) if parts else "0:0"

    def __eq__(self, other):
        pair = self._common(other)
        if pair is NotImplemented:
            return NotImplemented
        a, b = pair
        return a.coeffs == b.coeffs

    def __hash__(self):
        return hash(self.trace())

    def __repr__(self):
        return f"CyclotomicSum(d={self.modulus}, {self.exact_repr()})"


def multiply_arrays(a: np.ndarray, b: np.ndarray, modulus: int) -> np.ndarray:
    """Row-wise product of power-basis arrays of shape (..., phi(d))."""
    phi = a.shape[-1]
    if phi == 1:
        return a * b
    full = np.zeros(a.shape[:-1] + (2 * phi - 1,), dtype=np.int64)
    for i in range(phi):
        full[..., i : i + phi] += a[..., i : i + 1] * b
    red = reduction_matrix(modulus)[np.arange(2 * phi - 1) % modulus]
    return full @ red


def unit_array(count: int, modulus: int) -> np.ndarray:
    out = np.zeros((count, euler_phi(modulus)), dtype=np.int64)
    out[:, 0] = 1
    return out


def roots_array(exponents: np.ndarray, modulus: int) -> np.ndarray:
    """zeta_d^k for each k in ``exponents``."""
    return reduction_matrix(modulus)[np.asarray(exponents) % modulus]


@lru_cache(maxsize=None)
def embedding_vector(modulus: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(euler_phi(modulus)) / modulus)


def embed_array(values: np.ndarray, modulus: int) -> np.ndarray:
    """Complex embedding zeta_d -> e(1/d) of power-basis rows."""
    return values @ embedding_vector(modulus)


def row_to_sum(row, modulus: int) -> CyclotomicSum:
    return CyclotomicSum(modulus, row)
