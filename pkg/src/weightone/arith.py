"""Prime tables, factorization, quadratic symbols and square roots modulo primes."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

_SEGMENT = 1 << 20

# Deterministic Miller-Rabin witnesses for n < 3.3 * 10**24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


@dataclass(frozen=True)
class PrimeTable:
    """All primes up to ``limit``, ascending."""

    limit: int
    primes: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.primes)

    def __iter__(self):
        return iter(int(p) for p in self.primes)

    def __contains__(self, n) -> bool:
        i = np.searchsorted(self.primes, n)
        return bool(i < len(self.primes) and self.primes[i] == n)

    def count(self, x: int) -> int:
        """pi(x) for x <= limit."""
        if x > self.limit:
            raise ValueError(f"x={x} exceeds table limit {self.limit}")
        return int(np.searchsorted(self.primes, x, side="right"))

    def tolist(self) -> list[int]:
        return self.primes.tolist()


@dataclass(frozen=True)
class Factorization:
    n: int
    factors: dict[int, int]

    def value(self) -> int:
        out = 1
        for p, e in self.factors.items():
            out *= p**e
        return out

    def __iter__(self):
        return iter(sorted(self.factors.items()))


def _small_sieve(limit: int) -> np.ndarray:
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)


def primes_up_to(limit: int) -> PrimeTable:
    """Segmented sieve of Eratosthenes."""
    if limit < 1:
        raise ValueError("limit must be >= 1")
    base = _small_sieve(math.isqrt(limit))
    chunks = []
    for lo in range(0, limit + 1, _SEGMENT):
        hi = min(lo + _SEGMENT, limit + 1)
        flags = np.ones(hi - lo, dtype=bool)
        if lo == 0:
            flags[: min(2, hi)] = False
        for p in base:
            p = int(p)
            if p * p >= hi:
                break
            start = max(p * p, -(-lo // p) * p)
            flags[start - lo :: p] = False
        chunks.append(np.flatnonzero(flags) + lo)
    primes = np.concatenate(chunks).astype(np.int64) if chunks else np.zeros(0, np.int64)
    return PrimeTable(limit, primes)


@lru_cache(maxsize=2)
def smallest_prime_factors(limit: int) -> np.ndarray:
    """spf[n] for 0 <= n <= limit (spf[0] = spf[1] = 0), int32."""
    spf = np.zeros(limit + 1, dtype=np.int32)
    for p in _small_sieve(math.isqrt(limit)):
        p = int(p)
        window = spf[p * p :: p]
        window[window == 0] = p
    rest = np.flatnonzero(spf == 0)
    rest = rest[rest >= 2]
    spf[rest] = rest
    spf.setflags(write=False)
    return spf


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def factorize(n: int) -> Factorization:
    if n < 1:
        raise ValueError("factorize needs n >= 1")
    factors: dict[int, int] = {}
    m = n
    for p in _small_sieve(math.isqrt(n)):
        p = int(p)
        if p * p > m:
            break
        while m % p == 0:
            factors[p] = factors.get(p, 0) + 1
            m //= p
    if m > 1:
        factors[m] = factors.get(m, 0) + 1
    return Factorization(n, factors)


def divisor_counts(limit: int) -> np.ndarray:
    """tau(n) for 0 <= n <= limit (tau(0) = 0)."""
    tau = np.zeros(limit + 1, dtype=np.int64)
    for d in range(1, limit + 1):
        tau[d::d] += 1
    return tau


def kronecker(D: int, n: int) -> int:
    """Kronecker symbol (D/n) for a discriminant D (D = 0, 1 mod 4) and n >= 1."""
    if D % 4 not in (0, 1):
        raise ValueError(f"{D} is not a discriminant (must be 0 or 1 mod 4)")
    if n < 1:
        raise ValueError("kronecker needs n >= 1")
    result = 1
    while n % 2 == 0:
        n //= 2
        if D % 2 == 0:
            return 0
        if D % 8 in (3, 5):
            result = -result
    # Jacobi symbol (D/n) for odd n
    a = D % n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def sqrt_mod(a: int, p: int) -> int:
    """Tonelli-Shanks: some r with r*r = a (mod p), p an odd prime, a a residue."""
    a %= p
    if a == 0:
        return 0
    if pow(a, (p - 1) // 2, p) != 1:
        raise ValueError(f"{a} is not a square modulo {p}")
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


def _powmod(base: np.ndarray, exp: np.ndarray, mod: np.ndarray) -> np.ndarray:
    # int64 products are exact while mod < 3.03e9
    result = np.ones_like(base)
    base = base % mod
    exp = exp.copy()
    while exp.any():
        odd = (exp & 1).astype(bool)
        result[odd] = result[odd] * base[odd] % mod[odd]
        base = base * base % mod
        exp >>= 1
    return result


def sqrt_mod_many(a: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Vectorized Tonelli-Shanks over odd primes ``p`` with each a[i] a residue mod p[i]."""
    a = np.asarray(a, dtype=np.int64) % p
    p = np.asarray(p, dtype=np.int64)
    if np.any(p >= 3_000_000_000):
        raise ValueError("moduli too large for int64 arithmetic")
    q = p - 1
    s = np.zeros_like(p)
    even = q % 2 == 0
    while even.any():
        q[even] //= 2
        s[even] += 1
        even = q % 2 == 0
    half = (p - 1) // 2
    z = np.zeros_like(p)
    todo = np.ones(len(p), dtype=bool)
    cand = 2
    while todo.any():
        idx = np.flatnonzero(todo)
        hit = _powmod(np.full(len(idx), cand, dtype=np.int64), half[idx], p[idx]) == p[idx] - 1
        z[idx[hit]] = cand
        todo[idx[hit]] = False
        cand += 1
    m = s.copy()
    c = _powmod(z, q, p)
    t = _powmod(a, q, p)
    r = _powmod(a, (q + 1) // 2, p)
    active = (t != 1) & (t != 0)
    while active.any():
        idx = np.flatnonzero(active)
        pi, ti = p[idx], t[idx]
        i = np.zeros(len(idx), dtype=np.int64)
        t2 = ti.copy()
        pending = t2 != 1
        while pending.any():
            t2[pending] = t2[pending] * t2[pending] % pi[pending]
            i[pending] += 1
            pending = t2 != 1
        b = _powmod(c[idx], np.left_shift(1, m[idx] - i - 1), pi)
        m[idx] = i
        c[idx] = b * b % pi
        t[idx] = ti * c[idx] % pi
        r[idx] = r[idx] * b % pi
        active = (t != 1) & (t != 0)
    r[a == 0] = 0
    return r


def quadratic_residue_table(q: int) -> np.ndarray:
    """Legendre symbol (n/q) for n = 0..q-1, q an odd prime."""
    table = -np.ones(q, dtype=np.int64)
    table[(np.arange(1, q, dtype=np.int64) ** 2) % q] = 1
    table[0] = 0
    return table
