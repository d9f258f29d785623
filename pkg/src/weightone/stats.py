"""Hecke eigenvalue statistics for dihedral forms.

Theoretical measures come from counting classes: a split prime whose
Frobenius lands in class c has a_p = psi(c) + psi(c)^-1, each class with
density 1/(2h), and inert primes (density 1/2) have a_p = 0.  An atom at
angle t sits at the value 2 cos(2 pi t).
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .arith import primes_up_to
from .character import ClassCharacter, conjugate_pairs, is_real
from .classgroup import class_number, enumerate_class_group, prime_splitting
from .cyclotomic import CyclotomicSum, embed_array
from .theta import EisensteinCaseError, ThetaSeries

_RATIONAL_COS = {
    Fraction(0): 2.0,
    Fraction(1, 6): 1.0,
    Fraction(1, 4): 0.0,
    Fraction(1, 3): -1.0,
    Fraction(1, 2): -2.0,
}


def two_cos(t: Fraction) -> float:
    """2 cos(2 pi t), exact where the value is rational."""
    t = t % 1
    t = min(t, 1 - t)
    if t in _RATIONAL_COS:
        return _RATIONAL_COS[t]
    return 2.0 * math.cos(2 * math.pi * t)


@dataclass(frozen=True)
class AtomicMeasure:
    """Finitely many atoms (value, weight) on [-2, 2]."""

    values: tuple[float, ...]
    weights: tuple

    @classmethod
    def from_angles(cls, masses: dict[Fraction, object]) -> AtomicMeasure:
        keys = sorted(masses, reverse=True)  # ascending values
        return cls(tuple(two_cos(t) for t in keys), tuple(masses[t] for t in keys))

    @classmethod
    def from_values(cls, masses: dict[float, object]) -> AtomicMeasure:
        keys = sorted(masses)
        return cls(tuple(keys), tuple(masses[v] for v in keys))

    def __len__(self):
        return len(self.values)

    def total(self):
        if all(isinstance(w, Fraction) for w in self.weights):
            return sum(self.weights, Fraction(0))
        return math.fsum(float(w) for w in self.weights)

    def moment(self, k: int) -> float:
        return math.fsum(float(w) * v**k for v, w in zip(self.values, self.weights))

    def weight_at(self, value: float, tol: float = 1e-9):
        return sum((w for v, w in zip(self.values, self.weights) if abs(v - value) <= tol), 0)

    def as_dict(self) -> dict[float, object]:
        return dict(zip(self.values, self.weights))


def total_variation(mu: AtomicMeasure, nu: AtomicMeasure, tol: float = 1e-9) -> float:
    support = sorted(set(mu.values) | set(nu.values))
    merged: list[float] = []
    for v in support:
        if not merged or abs(v - merged[-1]) > tol:
            merged.append(v)
    return 0.5 * sum(abs(float(mu.weight_at(v, tol)) - float(nu.weight_at(v, tol))) for v in merged)


def _check_nonreal(psi: ClassCharacter) -> None:
    if is_real(psi):
        raise EisensteinCaseError("real characters give Eisenstein series; no cusp form measure")


def _class_angles(psi: ClassCharacter) -> list[Fraction]:
    d = psi.order
    return [Fraction(int(k), d) for k in psi.exponent_values()]


def _canonical(t: Fraction) -> Fraction:
    t = t % 1
    return min(t, 1 - t)


def theoretical_mu(q: int, psi: ClassCharacter) -> AtomicMeasure:
    """Limit distribution of a_p for theta_psi, with exact rational weights."""
    if psi.group.q != q:
        raise ValueError(f"character belongs to q={psi.group.q}, not q={q}")
    _check_nonreal(psi)
    h = psi.group.h
    masses: dict[Fraction, Fraction] = defaultdict(Fraction)
    masses[Fraction(1, 4)] += Fraction(1, 2)
    for t in _class_angles(psi):
        masses[_canonical(t)] += Fraction(1, 2 * h)
    return AtomicMeasure.from_angles(dict(masses))


def exact_moment(psi: ClassCharacter, k: int) -> Fraction:
    """k-th moment of ``theoretical_mu`` computed in Z[zeta]: (1/2h) sum_c (psi(c) + psi(c)^-1)^k.

    The binomial expansion is accumulated in the group ring Z[C_d] and reduced once."""
    _check_nonreal(psi)
    if k < 0:
        raise ValueError("k must be non-negative")
    d = psi.order
    e = psi.exponent_values()
    vec = np.zeros(d, dtype=np.int64)
    for j in range(k + 1):
        np.add.at(vec, ((2 * j - k) * e) % d, math.comb(k, j))
    total = CyclotomicSum.from_group_ring(d, vec)
    if any(total.coeffs[1:]):
        raise ArithmeticError("class sum of a real-valued function is not rational")
    inert = Fraction(1, 2) if k == 0 else Fraction(0)
    return Fraction(int(total.coeffs[0]), 2 * psi.group.h) + inert


@dataclass(frozen=True)
class EmpiricalMeasure:
    """Histogram of the exact values c_p over good primes p <= N."""

    q: int
    psi: tuple[int, ...]
    N: int
    modulus: int
    counts: dict[tuple[int, ...], int]

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def value(self, key) -> CyclotomicSum:
        return CyclotomicSum(self.modulus, key)

    def to_atomic(self) -> AtomicMeasure:
        masses: dict[float, float] = defaultdict(float)
        for key, n in self.counts.items():
            masses[round(self.value(key).to_complex().real, 12) + 0.0] += n / self.total
        return AtomicMeasure.from_values(dict(masses))

    @property
    def weights(self) -> dict[float, float]:
        return self.to_atomic().as_dict()

    def moment(self, k: int) -> float:
        return self.to_atomic().moment(k)


def _good_prime_rows(theta: ThetaSeries, N: int | None):
    N = theta.N if N is None else N
    if N > theta.N:
        raise ValueError(f"N={N} exceeds the series length {theta.N}")
    mask = (theta.primes <= N) & (theta.chi != 0)
    return N, theta.prime_coefficients()[mask]


def empirical_mu(theta: ThetaSeries, N: int | None = None) -> EmpiricalMeasure:
    N, rows = _good_prime_rows(theta, N)
    uniq, cnt = np.unique(rows, axis=0, return_counts=True)
    counts = {tuple(int(x) for x in u): int(c) for u, c in zip(uniq, cnt)}
    return EmpiricalMeasure(theta.q, theta.psi.exponents, N, theta.modulus, counts)


def second_moment(theta: ThetaSeries, N: int | None = None) -> float:
    """(1/#good p <= N) sum |c_p|^2."""
    N, rows = _good_prime_rows(theta, N)
    z = embed_array(rows, theta.modulus)
    return float(np.mean(np.abs(z) ** 2))


@dataclass(frozen=True)
class DensityReport:
    q: int
    psi: tuple[int, ...]
    N: int
    beta_theory: Fraction
    beta_hat: float

    @property
    def gap(self) -> float:
        return abs(self.beta_hat - float(self.beta_theory))


def zero_trace_density(psi: ClassCharacter) -> Fraction:
    """1/2 + |{c : psi(c) = +-i}| / (2h)."""
    _check_nonreal(psi)
    hits = sum(1 for t in _class_angles(psi) if t in (Fraction(1, 4), Fraction(3, 4)))
    return Fraction(1, 2) + Fraction(hits, 2 * psi.group.h)


def zero_density(theta: ThetaSeries, N: int | None = None) -> DensityReport:
    N, rows = _good_prime_rows(theta, N)
    zeros = int(np.count_nonzero(~rows.any(axis=1)))
    return DensityReport(theta.q, theta.psi.exponents, N, zero_trace_density(theta.psi), zeros / len(rows))


@dataclass(frozen=True)
class WirsingResult:
    checkpoints: tuple[int, ...]
    counts: tuple[int, ...]
    beta_hat: float


def wirsing_fit(checkpoints, counts) -> float:
    """-slope of log(count/x) against log log x (unweighted least squares)."""
    x = np.asarray(checkpoints, dtype=float)
    c = np.asarray(counts, dtype=float)
    slope, _ = np.polyfit(np.log(np.log(x)), np.log(c / x), 1)
    return float(-slope)


WIRSING_MIN_LOG2 = 4


def wirsing_count(theta: ThetaSeries, N: int | None = None, min_log2: int = WIRSING_MIN_LOG2) -> WirsingResult:
    """Counts of n <= x with c_n != 0 at x = 2^j, j >= min_log2, and the fitted exponent."""
    N = theta.N if N is None else N
    if N > theta.N:
        raise ValueError(f"N={N} exceeds the series length {theta.N}")
    xs = [1 << j for j in range(min_log2, N.bit_length()) if (1 << j) <= N]
    counts = []
    running = 0
    pending = list(xs)
    for lo, rows in theta.iter_blocks():
        nz = rows.any(axis=1)
        csum = np.cumsum(nz)
        hi = lo + len(rows)
        while pending and pending[0] < hi:
            counts.append(running + int(csum[pending[0] - lo]))
            pending.pop(0)
        running += int(csum[-1]) if len(csum) else 0
        if not pending:
            break
    return WirsingResult(tuple(xs), tuple(counts), wirsing_fit(xs, counts))


def levels_up_to(Q_max: int, min_h: int = 1) -> list[int]:
    """Primes q = 3 (mod 4), q <= Q_max (with class number >= min_h)."""
    qs = [p for p in primes_up_to(Q_max) if p % 4 == 3]
    if min_h > 1:
        qs = [q for q in qs if class_number(q) >= min_h]
    return qs


def level_measure(q: int, N: int | None = None) -> dict[Fraction, float] | None:
    """Average of mu_f over the dihedral basis at level q, as {angle: weight}.

    Without ``N`` each class carries its limiting mass 1/(2h).  With ``N`` the
    masses are the observed Frobenius frequencies among good primes p <= N;
    since c_p = psi(Frob_p) + psi(Frob_p)^-1 exactly, this is the empirical
    histogram of c_p for every form at once."""
    G = enumerate_class_group(q)
    pairs = conjugate_pairs(G)
    if not pairs:
        return None
    if N is None:
        inert = 0.5
        class_mass = np.full(G.h, 1.0 / (2 * G.h))
    else:
        sp = prime_splitting(q, N)
        good = int(np.count_nonzero(sp.chi))
        inert = int(np.count_nonzero(sp.chi == -1)) / good
        class_mass = np.bincount(sp.cls[sp.chi == 1], minlength=G.h) / good
    out: dict = defaultdict(float)
    out[Fraction(1, 4)] += inert
    share = 1.0 / len(pairs)
    D = G.exponent
    E = np.array([psi.exponents for psi, _ in pairs], dtype=np.int64).reshape(len(pairs), -1)
    scale = np.array([D // d for d in G.structure], dtype=np.int64)
    K = (G.coords @ (E * scale).T) % D
    K = np.minimum(K, D - K)
    g = np.gcd(K, D)
    keys = (K // g) * (D + 1) + D // g
    mass = np.repeat(class_mass, len(pairs))
    uniq, inv = np.unique(keys.ravel(), return_inverse=True)
    sums = np.bincount(inv.ravel(), weights=mass)
    for key, w in zip(uniq.tolist(), sums.tolist()):
        out[Fraction(key // (D + 1), key % (D + 1))] += w * share
    return dict(out)


def averaged_measure(Q_max: int, N: int | None = None, executor=None) -> AtomicMeasure:
    """Mean over levels q <= Q_max of the per-level dihedral averages mu_q.

    Each level is normalized by its dihedral dimension (h-1)/2; levels without
    dihedral forms are skipped.  Exotic forms are not included."""
    if Q_max < 23:
        raise ValueError("Q_max must be >= 23")
    qs = levels_up_to(Q_max)
    mapper = executor.map if executor is not None else map
    total: dict = defaultdict(float)
    used = 0
    for m in mapper(lambda q: level_measure(q, N), qs):
        if m is None:
            continue
        used += 1
        for key, w in m.items():
            total[key] += w
    if not used:
        raise ValueError("no level with dihedral forms in range")
    return AtomicMeasure.from_angles({k: w / used for k, w in total.items()})


def limit_moment(k: int) -> float:
    """Moments of phi(0)/2 + (1/4pi) int phi(x) dx / sqrt(1 - x^2/4)."""
    if k == 0:
        return 1.0
    if k % 2:
        return 0.0
    return 0.5 * math.comb(k, k // 2)


def moment_row(measure: AtomicMeasure, ks=(0, 2, 4, 6)) -> dict[str, float]:
    return {f"m{k}": measure.moment(k) for k in ks}


@dataclass(frozen=True)
class DimensionScan:
    rows: tuple[tuple[int, int, int], ...]
    exponent: float


def dimension_scan(Q_max: int, executor=None) -> DimensionScan:
    """(q, h, (h-1)/2) for every level, and the slope of log h against log q."""
    if Q_max < 23:
        raise ValueError("Q_max must be >= 23")
    qs = levels_up_to(Q_max)
    mapper = executor.map if executor is not None else map
    hs = list(mapper(class_number, qs))
    rows = tuple((q, h, (h - 1) // 2) for q, h in zip(qs, hs))
    slope, _ = np.polyfit(np.log(qs), np.log(hs), 1)
    return DimensionScan(rows, float(slope))


@dataclass(frozen=True)
class FiniteValueReport:
    q: int
    psi: tuple[int, ...]
    M: float
    N: int
    value_count: int
    value_bound: int
    outside_density: float
    density_bound: float

    @property
    def ok(self) -> bool:
        if self.value_count > self.value_bound:
            return False
        return self.M < 2 or self.outside_density == 0.0


def finite_value_check(theta: ThetaSeries, M: float, N: int | None = None) -> FiniteValueReport:
    """Count distinct c_p and the density of p with some conjugate |sigma(c_p)| > M.

    For M >= 2 that density must vanish; below 2 it is only reported."""
    N, rows = _good_prime_rows(theta, N)
    uniq, cnt = np.unique(rows, axis=0, return_counts=True)
    outside = 0
    for u, c in zip(uniq, cnt):
        emb = CyclotomicSum(theta.modulus, u).embeddings()
        if max(abs(z) for z in emb) > M + 1e-9:
            outside += int(c)
    return FiniteValueReport(
        theta.q,
        theta.psi.exponents,
        M,
        N,
        len(uniq),
        theta.group.h + 1,
        outside / len(rows),
        1.0 / (M * M) if M > 0 else math.inf,
    )
