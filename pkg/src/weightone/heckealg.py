"""Symbolic algebra of Hecke eigenvalue powers for forms with finite image.

At a good prime p the Hecke eigenvalues satisfy

    a_p * a_{p^k} = a_{p^{k+1}} + chi(p) a_{p^{k-1}},

so any polynomial in a_p can be rewritten as a linear combination of the
a_{p^k} with coefficients in Z[zeta][chi, chi^-1].  Here chi is kept formal
and is only specialized (to det of an eigenpair) on evaluation.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .cyclotomic import CyclotomicSum, RootOfUnity

MAX_DEGREE = 64

_ZERO = CyclotomicSum.integer(0)


class ChiPoly:
    """A Laurent polynomial in the formal nebentypus value chi."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[int, CyclotomicSum | int] | None = None):
        clean = {}
        for k, c in (terms or {}).items():
            c = c if isinstance(c, CyclotomicSum) else CyclotomicSum.integer(c)
            if not c.is_zero():
                clean[k] = c
        self.terms = clean

    @classmethod
    def constant(cls, c) -> ChiPoly:
        return cls({0: c})

    @classmethod
    def chi_power(cls, k: int, coeff=1) -> ChiPoly:
        return cls({k: coeff})

    def __add__(self, other: ChiPoly) -> ChiPoly:
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out[k] + c if k in out else c
        return ChiPoly(out)

    def __neg__(self) -> ChiPoly:
        return ChiPoly({k: -c for k, c in self.terms.items()})

    def __sub__(self, other: ChiPoly) -> ChiPoly:
        return self + (-other)

    def __mul__(self, other) -> ChiPoly:
        if not isinstance(other, ChiPoly):
            return ChiPoly({k: c * other for k, c in self.terms.items()})
        out: dict[int, CyclotomicSum] = {}
        for i, a in self.terms.items():
            for j, b in other.terms.items():
                out[i + j] = out[i + j] + a * b if i + j in out else a * b
        return ChiPoly(out)

    __rmul__ = __mul__

    def shift(self, k: int) -> ChiPoly:
        """Multiply by chi^k."""
        return ChiPoly({i + k: c for i, c in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def evaluate(self, chi: RootOfUnity) -> CyclotomicSum:
        total = _ZERO
        for k, c in self.terms.items():
            total = total + c * (chi**k).to_cyclotomic()
        return total

    def __eq__(self, other):
        if isinstance(other, int):
            other = ChiPoly.constant(other)
        return isinstance(other, ChiPoly) and self.terms == other.terms

    def to_json(self) -> dict[str, str]:
        return {str(k): c.exact_repr() + f"@{c.modulus}" for k, c in sorted(self.terms.items())}

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"({c.exact_repr()}@{c.modulus})chi^{k}" for k, c in sorted(self.terms.items()))


@dataclass(frozen=True)
class UnitEigenPair:
    """Eigenvalues (alpha, beta) of a Frobenius element with finite order."""

    alpha: RootOfUnity
    beta: RootOfUnity

    @property
    def ratio(self) -> RootOfUnity:
        return self.alpha / self.beta

    @property
    def det(self) -> RootOfUnity:
        return self.alpha * self.beta

    @property
    def trace(self) -> CyclotomicSum:
        return self.alpha.to_cyclotomic() + self.beta.to_cyclotomic()


def trace_power(pair: UnitEigenPair, k: int) -> CyclotomicSum:
    """a_{p^k} = sum over i + j = k of alpha^i beta^j."""
    if k < 0:
        raise ValueError("k must be non-negative")
    total = _ZERO
    for i in range(k + 1):
        total = total + (pair.alpha**i * pair.beta ** (k - i)).to_cyclotomic()
    return total


@dataclass
class HeckePowerExpression:
    """sum_m coeffs[m] * a_p^m with ChiPoly coefficients."""

    coeffs: list[ChiPoly]

    @classmethod
    def power(cls, m: int) -> HeckePowerExpression:
        return cls([ChiPoly()] * m + [ChiPoly.constant(1)])

    @classmethod
    def vanishing_on(cls, S: list[CyclotomicSum]) -> HeckePowerExpression:
        """prod_{s in S} (X - s)."""
        poly = [ChiPoly.constant(1)]
        for s in S:
            nxt = [ChiPoly() for _ in range(len(poly) + 1)]
            for m, c in enumerate(poly):
                nxt[m + 1] = nxt[m + 1] + c
                nxt[m] = nxt[m] - c * s
            poly = nxt
        return cls(poly)

    @property
    def degree(self) -> int:
        return max((m for m, c in enumerate(self.coeffs) if not c.is_zero()), default=0)

    def __add__(self, other) -> HeckePowerExpression:
        if isinstance(other, int):
            other = HeckePowerExpression([ChiPoly.constant(other)])
        n = max(len(self.coeffs), len(other.coeffs))
        mine = self.coeffs + [ChiPoly()] * (n - len(self.coeffs))
        theirs = other.coeffs + [ChiPoly()] * (n - len(other.coeffs))
        return HeckePowerExpression([a + b for a, b in zip(mine, theirs)])

    def evaluate(self, pair: UnitEigenPair) -> CyclotomicSum:
        a = pair.trace
        chi = pair.det
        total = _ZERO
        for m, c in enumerate(self.coeffs):
            if not c.is_zero():
                total = total + c.evaluate(chi) * a**m
        return total


@dataclass
class HeckeLinearForm:
    """sum_k terms[k] * a_{p^k}, with a_{p^0} = 1."""

    terms: dict[int, ChiPoly] = field(default_factory=dict)

    def evaluate(self, pair: UnitEigenPair) -> CyclotomicSum:
        chi = pair.det
        total = _ZERO
        for k, mu in self.terms.items():
            total = total + mu.evaluate(chi) * trace_power(pair, k)
        return total

    def __add__(self, other: HeckeLinearForm) -> HeckeLinearForm:
        out = dict(self.terms)
        for k, mu in other.terms.items():
            out[k] = out[k] + mu if k in out else mu
        return HeckeLinearForm({k: v for k, v in out.items() if not v.is_zero()})

    def scale(self, c: ChiPoly) -> HeckeLinearForm:
        return HeckeLinearForm({k: v * c for k, v in self.terms.items() if not (v * c).is_zero()})

    def times_ap(self) -> HeckeLinearForm:
        """Multiply by a_p using a_p a_{p^k} = a_{p^{k+1}} + chi a_{p^{k-1}}."""
        out: dict[int, ChiPoly] = {}
        for k, mu in self.terms.items():
            out[k + 1] = out.get(k + 1, ChiPoly()) + mu
            if k >= 1:
                out[k - 1] = out.get(k - 1, ChiPoly()) + mu.shift(1)
        return HeckeLinearForm({k: v for k, v in out.items() if not v.is_zero()})


def rewrite_to_linear(expr: HeckePowerExpression) -> HeckeLinearForm:
    if expr.degree > MAX_DEGREE:
        raise OverflowError(f"degree {expr.degree} exceeds the limit {MAX_DEGREE}")
    out = HeckeLinearForm()
    power = HeckeLinearForm({0: ChiPoly.constant(1)})
    for m, c in enumerate(expr.coeffs):
        if m:
            power = power.times_ap()
        if not c.is_zero():
            out = out + power.scale(c)
    return out


@dataclass
class HeckeLinearRelation:
    """sum_{k >= 1} mu_k(chi) a_{p^k} + mu_0(chi) = B."""

    terms: dict[int, ChiPoly]
    offset: ChiPoly
    constant: int | CyclotomicSum
    kind: str = "custom"

    @property
    def length(self) -> int:
        return len(self.terms)

    def lhs(self, pair: UnitEigenPair) -> CyclotomicSum:
        return HeckeLinearForm({**self.terms, 0: self.offset}).evaluate(pair)

    def holds_for(self, pair: UnitEigenPair) -> bool:
        return self.lhs(pair) == self.constant

    def to_json(self) -> str:
        const = self.constant
        const = const if isinstance(const, int) else const.exact_repr() + f"@{const.modulus}"
        terms = [{"k": k, "mu_exponents": self.terms[k].to_json()} for k in sorted(self.terms)]
        if not self.offset.is_zero():
            terms.insert(0, {"k": 0, "mu_exponents": self.offset.to_json()})
        return json.dumps({"type": self.kind, "terms": terms, "constant": const}, sort_keys=True)


def build_relation(S: list[CyclotomicSum], A: int) -> HeckeLinearRelation:
    """Linearize P(a_p) = A for P(X) = prod_{s in S}(X - s) + A."""
    if not S:
        raise ValueError("trace set S must be nonempty")
    if abs(A) < 1:
        raise ValueError(f"constant B = A = {A} has |B| < 1; minimal valid A is 1")
    expr = HeckePowerExpression.vanishing_on(list(S)) + A
    form = rewrite_to_linear(expr)
    offset = form.terms.pop(0, ChiPoly())
    return HeckeLinearRelation(form.terms, offset, A)


def icosahedral_relation() -> HeckeLinearRelation:
    """chibar^6 a_{p^12} - chibar^4 a_{p^8} - chibar a_{p^2} = 1."""
    terms = {
        12: ChiPoly.chi_power(-6),
        8: ChiPoly.chi_power(-4, -1),
        2: ChiPoly.chi_power(-1, -1),
    }
    return HeckeLinearRelation(terms, ChiPoly(), 1, kind="icosahedral")


def eigenpairs_with_ratio_order(order: int, det_modulus: int | None = None) -> list[UnitEigenPair]:
    """(zeta beta, beta) for every primitive zeta of the given order and beta in mu_M."""
    M = det_modulus or 4 * order
    out = []
    for j in range(order):
        if math.gcd(j, order) != 1:
            continue
        zeta = RootOfUnity(j, order)
        for b in range(M):
            beta = RootOfUnity(b, M)
            out.append(UnitEigenPair(zeta * beta, beta))
    return out


def verify_icosahedral_identity(zeta_order: int) -> bool:
    if zeta_order < 1:
        raise ValueError("order must be >= 1")
    rel = icosahedral_relation()
    return all(rel.holds_for(pair) for pair in eigenpairs_with_ratio_order(zeta_order))


def projective_trace_set(orders, det: RootOfUnity | None = None) -> list[CyclotomicSum]:
    """Traces of eigenpairs with det ``det`` (default 1) and ratio order in ``orders``.

    With det = delta^2 fixed, alpha = delta * w and beta = delta / w where
    w^2 = ratio; both square roots are included."""
    det = det or RootOfUnity(0, 1)
    half = RootOfUnity(det.num, 2 * det.den)
    seen = []
    for m in orders:
        for j in range(2 * m):
            w = RootOfUnity(j, 2 * m)
            if (w**2).order != m:
                continue
            pair = UnitEigenPair(half * w, half / w)
            t = pair.trace
            if t not in seen:
                seen.append(t)
    return seen
