"""Theta series of class group characters and their Hecke structure.

For a non-real character psi of the class group of Q(sqrt(-q)),

    theta_psi = sum over nonzero ideals n of psi(n) e(N(n) z)

is a normalized newform of weight one, level q and nebentypus (-q/.).
Coefficients are exact elements of Z[zeta_d], d = ord(psi), held as int64
rows in the cyclotomic power basis.
"""
from __future__ import annotations

import csv
import itertools
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .arith import divisor_counts, factorize, is_prime, kronecker, smallest_prime_factors
from .character import ClassCharacter, conjugate_pairs, is_real
from .classgroup import (
    ClassGroup,
    QuadraticForm,
    compose,
    enumerate_class_group,
    prime_ideal_class,
    prime_splitting,
)
from .cyclotomic import (
    CyclotomicSum,
    embed_array,
    euler_phi,
    multiply_arrays,
    roots_array,
    unit_array,
)

ORACLE_LIMIT = 10**5
_BLOCK = 1 << 18


class EisensteinCaseError(ValueError):
    """Raised for real characters, whose theta series is an Eisenstein series."""


class ResourceLimitError(RuntimeError):
    pass


class ThetaSeries:
    """Coefficients c_1..c_N of theta_psi, materialized lazily in blocks."""

    def __init__(self, psi: ClassCharacter, N: int):
        if N < 1:
            raise ValueError("N must be >= 1")
        if is_real(psi):
            raise EisensteinCaseError(
                "real character: the theta series is a weight one Eisenstein series, not a cusp form"
            )
        self.psi = psi
        self.group: ClassGroup = psi.group
        self.q = self.group.q
        self.N = N
        self.modulus = psi.order
        self.phi = euler_phi(self.modulus)
        split = prime_splitting(self.q, max(N, 2))
        keep = split.primes <= N
        self.primes = split.primes[keep]
        self.chi = split.chi[keep]
        cls = split.cls[keep]
        d = self.modulus
        k = np.zeros(len(self.primes), dtype=np.int64)
        has_cls = cls >= 0
        k[has_cls] = psi.exponent_values(cls[has_cls])
        self.prime_exponents = k
        cp = np.zeros((len(self.primes), self.phi), dtype=np.int64)
        sp = self.chi == 1
        cp[sp] = roots_array(k[sp], d) + roots_array(-k[sp], d)
        ram = self.chi == 0
        cp[ram] = roots_array(k[ram], d)
        self._build_prime_powers(cp)
        self._coeffs: np.ndarray | None = None

    def _build_prime_powers(self, cp: np.ndarray) -> None:
        # c_{p^{e+1}} = c_p c_{p^e} - chi(p) c_{p^{e-1}}; chi(q) = 0 gives the bad-prime shift
        ns = [self.primes]
        vals = [cp]
        small = self.primes[self.primes * self.primes <= self.N]
        nsm = len(small)
        prev = unit_array(nsm, self.modulus)
        cps = cur = cp[:nsm]
        power = small.copy()
        chi = self.chi[:nsm]
        while len(small):
            power = power * small
            alive = power <= self.N
            if not alive.any():
                break
            small, power, chi = small[alive], power[alive], chi[alive]
            cps, cur, prev = cps[alive], cur[alive], prev[alive]
            nxt = multiply_arrays(cps, cur, self.modulus) - chi[:, None] * prev
            ns.append(power)
            vals.append(nxt)
            prev, cur = cur, nxt
        pp_n = np.concatenate(ns)
        order = np.argsort(pp_n)
        self.prime_power_n = pp_n[order]
        self.prime_power_values = np.concatenate(vals)[order]

    def __repr__(self):
        return f"ThetaSeries(q={self.q}, psi={self.psi.exponents}, N={self.N})"

    @property
    def nebentypus(self):
        """The Kronecker character n -> (-q/n)."""
        return lambda n: kronecker(-self.q, n)

    def prime_power_coefficient(self, p: int, e: int) -> np.ndarray:
        i = np.searchsorted(self.prime_power_n, p**e)
        return self.prime_power_values[i]

    def block(self, lo: int, hi: int) -> np.ndarray:
        """Rows c_n for lo <= n < hi (c_0 = 0)."""
        lo, hi = max(lo, 0), min(hi, self.N + 1)
        out = unit_array(hi - lo, self.modulus)
        spf = smallest_prime_factors(self.N) if self.N >= 2 else np.zeros(2, np.int32)
        rem = np.arange(lo, hi, dtype=np.int64)
        if lo == 0:
            out[0] = 0
            rem[0] = 1
        active = np.flatnonzero(rem > 1)
        first = True
        while len(active):
            r = rem[active]
            p = spf[r].astype(np.int64)
            pe = p.copy()
            r //= p
            more = r % p == 0
            while more.any():
                pe[more] *= p[more]
                r[more] //= p[more]
                more = r % p == 0
            rem[active] = r
            idx = np.searchsorted(self.prime_power_n, pe)
            if first:  # every row still holds 1
                out[active] = self.prime_power_values[idx]
                first = False
            else:
                out[active] = multiply_arrays(out[active], self.prime_power_values[idx], self.modulus)
            active = active[r > 1]
        return out

    def iter_blocks(self, size: int = _BLOCK):
        for lo in range(0, self.N + 1, size):
            hi = min(lo + size, self.N + 1)
            yield lo, self.block(lo, hi)

    @property
    def coefficients(self) -> np.ndarray:
        """All rows c_0..c_N as an (N+1, phi(d)) array (cached)."""
        if self._coeffs is None:
            self._coeffs = np.concatenate([b for _, b in self.iter_blocks()])
            self._coeffs.setflags(write=False)
        return self._coeffs

    def __getitem__(self, n: int) -> CyclotomicSum:
        if not 1 <= n <= self.N:
            raise IndexError(f"coefficient index {n} outside 1..{self.N}")
        row = self._coeffs[n] if self._coeffs is not None else self.block(n, n + 1)[0]
        return CyclotomicSum(self.modulus, row)

    def embedded(self) -> np.ndarray:
        return embed_array(self.coefficients, self.modulus)

    def prime_coefficients(self) -> np.ndarray:
        """Rows c_p for the primes p <= N, aligned with ``self.primes``."""
        idx = np.searchsorted(self.prime_power_n, self.primes)
        return self.prime_power_values[idx]

    def corrupted(self, n: int, delta: int = 1) -> ThetaSeries:
        """A copy with c_n shifted by ``delta`` (fault injection for verifiers)."""
        clone = object.__new__(ThetaSeries)
        clone.__dict__.update(self.__dict__)
        coeffs = self.coefficients.copy()
        coeffs[n, 0] += delta
        coeffs.setflags(write=False)
        clone._coeffs = coeffs
        return clone


def theta_coefficients(q: int, psi: ClassCharacter, N: int) -> ThetaSeries:
    if psi.group.q != q:
        raise ValueError(f"character belongs to q={psi.group.q}, not q={q}")
    return ThetaSeries(psi, N)


@lru_cache(maxsize=None)
def _prime_power_ideal_classes(q: int, p: int, e: int) -> tuple[QuadraticForm, ...]:
    G = enumerate_class_group(q)
    split = prime_ideal_class(p, G)
    one = QuadraticForm.principal(-q)

    def power(f, k):
        out = one
        for _ in range(k):
            out = compose(out, f)
        return out

    if split.kind == "inert":
        return (one,) if e % 2 == 0 else ()
    if split.kind == "ramified":
        return (power(split.classes[0], e),)
    P, Pbar = split.classes
    return tuple(compose(power(P, i), power(Pbar, e - i)) for i in range(e + 1))


def ideal_classes_of_norm(q: int, n: int) -> list[QuadraticForm]:
    """Classes of all ideals of norm n, one entry per ideal, by direct enumeration."""
    if n > ORACLE_LIMIT:
        raise ResourceLimitError(f"direct enumeration is limited to n <= {ORACLE_LIMIT}")
    out = [QuadraticForm.principal(-q)]
    for p, e in factorize(n):
        local = _prime_power_ideal_classes(q, p, e)
        out = [compose(f, g) for f, g in itertools.product(out, local)]
        if not out:
            break
    return out


def direct_coefficient_oracle(q: int, psi: ClassCharacter, n: int) -> CyclotomicSum:
    """c_n as sum of psi over the ideals of norm n, without any Hecke recursion."""
    G = psi.group
    total = CyclotomicSum.integer(0, psi.order)
    for f in ideal_classes_of_norm(q, n):
        total = total + psi.value(G.index(f))
    return total


@dataclass
class HeckeReport:
    q: int
    psi: tuple[int, ...]
    N: int
    multiplicative_checked: int = 0
    recursion_checked: int = 0
    failures: list[tuple[str, int, int]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def raise_if_failed(self) -> None:
        if self.failures:
            kind, x, y = self.failures[0]
            label = "(p, k)" if kind != "multiplicative" else "(m, n)"
            raise ArithmeticError(
                f"{len(self.failures)} Hecke identity failures for q={self.q}; first: {kind} at {label}={x, y}"
            )


def verify_hecke(theta: ThetaSeries) -> HeckeReport:
    """Check c_1 = 1, c_mn = c_m c_n for coprime m, n, and the prime power recursions."""
    c = theta.coefficients
    d, N = theta.modulus, theta.N
    report = HeckeReport(theta.q, theta.psi.exponents, N)
    one = unit_array(1, d)[0]
    if not np.array_equal(c[1], one):
        report.failures.append(("normalization", 1, 1))
    for m in range(2, math.isqrt(N) + 1):
        n = np.arange(m + 1, N // m + 1, dtype=np.int64)
        n = n[np.gcd(n, m) == 1]
        if not len(n):
            continue
        lhs = c[m * n]
        rhs = multiply_arrays(np.broadcast_to(c[m], (len(n), theta.phi)), c[n], d)
        bad = np.flatnonzero(np.any(lhs != rhs, axis=1))
        report.failures.extend(("multiplicative", m, int(n[i])) for i in bad)
        report.multiplicative_checked += len(n)
    primes = theta.primes[theta.primes * theta.primes <= N]
    chi = theta.chi[: len(primes)]
    prev = np.broadcast_to(one, (len(primes), theta.phi))
    cur = c[primes]
    cp = c[primes]
    power = primes.copy()
    k = 1
    while len(primes):
        nxt_power = power * primes
        alive = nxt_power <= N
        if not alive.any():
            break
        expect = multiply_arrays(cp[alive], cur[alive], d) - chi[alive, None] * prev[alive]
        got = c[nxt_power[alive]]
        bad = np.flatnonzero(np.any(got != expect, axis=1))
        label = np.where(chi[alive] == 0, "bad-prime", "recursion")
        report.failures.extend((str(label[i]), int(primes[alive][i]), k) for i in bad)
        report.recursion_checked += int(alive.sum())
        primes, chi, cp = primes[alive], chi[alive], cp[alive]
        prev, cur, power = cur[alive], got, nxt_power[alive]
        k += 1
    return report


@dataclass
class RamanujanReport:
    q: int
    psi: tuple[int, ...]
    N: int
    max_abs_prime: float
    witness_prime: int
    divisor_bound_limit: int
    divisor_bound_violations: list[int]
    tolerance: float = 1e-9

    @property
    def ok(self) -> bool:
        return self.max_abs_prime <= 2 + self.tolerance and not self.divisor_bound_violations


@lru_cache(maxsize=2)
def _tau(limit: int) -> np.ndarray:
    return divisor_counts(limit)


def ramanujan_check(theta: ThetaSeries, tau_limit: int | None = None, tolerance: float = 1e-9) -> RamanujanReport:
    """|c_p| <= 2 at good primes p <= N and |c_n| <= tau(n) for n <= tau_limit (default N)."""
    good = theta.chi != 0
    vals = np.abs(embed_array(theta.prime_coefficients()[good], theta.modulus))
    i = int(np.argmax(vals)) if len(vals) else 0
    max_abs = float(vals[i]) if len(vals) else 0.0
    witness = int(theta.primes[good][i]) if len(vals) else 0
    L = min(theta.N, tau_limit or theta.N)
    if theta._coeffs is not None or L == theta.N:
        rows = theta.coefficients[: L + 1]
    else:
        rows = theta.block(0, L + 1)
    absn = np.abs(embed_array(rows, theta.modulus))
    bad = np.flatnonzero(absn[1:] > _tau(L)[1:] + tolerance) + 1
    return RamanujanReport(theta.q, theta.psi.exponents, theta.N, max_abs, witness, L, bad.tolist(), tolerance)


def dihedral_basis(q: int, N: int) -> list[ThetaSeries]:
    """One theta series per conjugate pair of non-real characters; (h-1)/2 series."""
    G = enumerate_class_group(q)
    basis = [ThetaSeries(psi, N) for psi, _ in conjugate_pairs(G)]
    if basis:
        L = min(N, 10 * G.h)
        M = np.stack([embed_array(t.block(1, L + 1), t.modulus) for t in basis])
        rank = np.linalg.matrix_rank(M, tol=1e-8)
        if rank != len(basis):
            raise ArithmeticError(f"dihedral forms at q={q} are linearly dependent on n <= {L}")
    return basis


def write_coefficients_csv(theta: ThetaSeries, fh, config: dict | None = None) -> None:
    """CSV columns n, re, im, exact_repr; the run config goes in a leading comment."""
    header = dict(config or {})
    header.update(q=theta.q, psi=list(theta.psi.exponents), modulus=theta.modulus, N=theta.N)
    fh.write("# config: " + json.dumps(header, sort_keys=True) + "\n")
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["n", "re", "im", "exact_repr"])
    for lo, rows in theta.iter_blocks():
        z = embed_array(rows, theta.modulus)
        for j in range(len(rows)):
            n = lo + j
            if n == 0:
                continue
            s = CyclotomicSum(theta.modulus, rows[j])
            writer.writerow([n, _fmt(z[j].real), _fmt(z[j].imag), s.exact_repr()])


def _fmt(x: float) -> str:
    return repr(round(float(x), 12) + 0.0)


def is_level_in_scope(q: int) -> bool:
    return q % 4 == 3 and is_prime(q)
