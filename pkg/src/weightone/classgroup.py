"""Class groups of Q(sqrt(-q)) for primes q = 3 (mod 4), via reduced binary quadratic forms."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Literal

import numpy as np

from .arith import is_prime, kronecker, primes_up_to, quadratic_residue_table, sqrt_mod, sqrt_mod_many


@dataclass(frozen=True)
class QuadraticForm:
    """The form a x^2 + b xy + c y^2; ``disc`` is checked against b^2 - 4ac."""

    a: int
    b: int
    c: int
    disc: int = None

    def __post_init__(self):
        d = self.b * self.b - 4 * self.a * self.c
        if self.disc is None:
            object.__setattr__(self, "disc", d)
        elif self.disc != d:
            raise ValueError(f"b^2 - 4ac = {d} does not match disc {self.disc}")

    @classmethod
    def from_ab(cls, a: int, b: int, disc: int) -> QuadraticForm:
        c, r = divmod(b * b - disc, 4 * a)
        if r:
            raise ValueError(f"no form ({a}, {b}, *) of discriminant {disc}")
        return cls(a, b, c, disc)

    @classmethod
    def principal(cls, disc: int) -> QuadraticForm:
        return cls.from_ab(1, disc % 2, disc)

    def __iter__(self):
        return iter((self.a, self.b, self.c))

    def __call__(self, x: int, y: int) -> int:
        return self.a * x * x + self.b * x * y + self.c * y * y

    def is_positive_definite(self) -> bool:
        return self.disc < 0 and self.a > 0

    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        if not (abs(b) <= a <= c):
            return False
        return b >= 0 if (abs(b) == a or a == c) else True

    def inverse(self) -> QuadraticForm:
        return reduce(QuadraticForm(self.a, -self.b, self.c, self.disc))

    def __repr__(self):
        return f"({self.a},{self.b},{self.c})"


def _reduce_abc(a: int, b: int, c: int) -> tuple[int, int, int]:
    while True:
        if not (-a < b <= a):
            r = (a - b) // (2 * a)
            b, c = b + 2 * r * a, a * r * r + b * r + c
        if a > c or (a == c and b < 0):
            a, b, c = c, -b, a
            continue
        return a, b, c


def reduce(f: QuadraticForm) -> QuadraticForm:
    """The reduced form properly equivalent to a positive definite ``f``."""
    if not f.is_positive_definite():
        raise ValueError(f"{f} is not positive definite")
    return QuadraticForm(*_reduce_abc(f.a, f.b, f.c), f.disc)


def reduce_many(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized reduction of positive definite forms (int64 arrays)."""
    a, b, c = (np.array(x, dtype=np.int64) for x in (a, b, c))
    if np.any(a <= 0):
        raise ValueError("forms must be positive definite")
    todo = np.ones(len(a), dtype=bool)
    while todo.any():
        i = np.flatnonzero(todo)
        ai, bi, ci = a[i], b[i], c[i]
        r = (ai - bi) // (2 * ai)
        bi, ci = bi + 2 * r * ai, ai * r * r + bi * r + ci
        swap = (ai > ci) | ((ai == ci) & (bi < 0))
        ai, bi, ci = np.where(swap, ci, ai), np.where(swap, -bi, bi), np.where(swap, ai, ci)
        a[i], b[i], c[i] = ai, bi, ci
        todo[i] = swap
    return a, b, c


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        k, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - k * x1
        y0, y1 = y1, y0 - k * y1
    return x0, y0, a


def compose(f: QuadraticForm, g: QuadraticForm) -> QuadraticForm:
    """Gauss composition followed by reduction."""
    if f.disc != g.disc:
        raise ValueError(f"discriminants differ: {f.disc} vs {g.disc}")
    disc = f.disc
    (a1, b1, c1), (a2, b2, c2) = f, g
    if a1 > a2:
        (a1, b1, c1), (a2, b2, c2) = (a2, b2, c2), (a1, b1, c1)
    s = (b1 + b2) // 2
    n = b2 - s
    if a2 % a1 == 0:
        y1, d = 0, a1
    else:
        u, _, d = _xgcd(a2, a1)
        y1 = u
    if s % d == 0:
        y2, x2, d1 = -1, 0, d
    else:
        x2, y2, d1 = _xgcd(s, d)
        y2 = -y2
    v1, v2 = a1 // d1, a2 // d1
    r = (y1 * y2 * n - x2 * c2) % v1
    b3 = b2 + 2 * v2 * r
    a3 = v1 * v2
    c3 = (b3 * b3 - disc) // (4 * a3)
    return QuadraticForm(*_reduce_abc(a3, b3, c3), disc)


def reduced_forms(disc: int) -> list[QuadraticForm]:
    """All reduced forms of a negative discriminant, sorted by (a, b)."""
    if disc >= 0 or disc % 4 not in (0, 1):
        raise ValueError(f"{disc} is not a negative discriminant")
    out = []
    amax = math.isqrt(-disc // 3)
    for a in range(1, amax + 1):
        for b in range(-a + 1, a + 1):
            if (b - disc) % 2:
                continue
            c, r = divmod(b * b - disc, 4 * a)
            if r or c < a or (a == c and b < 0):
                continue
            out.append(QuadraticForm(a, b, c, disc))
    return out


def count_reduced_forms(disc: int) -> int:
    """Number of reduced forms (primitive or not) of a negative discriminant."""
    amax = math.isqrt(-disc // 3)
    a = np.repeat(np.arange(1, amax + 1, dtype=np.int64), 2 * np.arange(1, amax + 1))
    start = np.concatenate(([0], np.cumsum(2 * np.arange(1, amax + 1))[:-1]))
    b = np.arange(len(a), dtype=np.int64) - np.repeat(start, 2 * np.arange(1, amax + 1)) - a + 1
    num = b * b - disc
    ok = (num % (4 * a) == 0) & ((b - disc) % 2 == 0)
    c = num // (4 * a)
    ok &= (c >= a) & ~((a == c) & (b < 0))
    return int(ok.sum())


def _smith(rel: list[list[int]]) -> tuple[list[int], list[list[int]]]:
    """Smith normal form U R V = diag(d); returns (d, V)."""
    k = len(rel)
    A = [row[:] for row in rel]
    V = [[int(i == j) for j in range(k)] for i in range(k)]

    def col_op(i, j, q):  # col_j -= q col_i
        for row in A:
            row[j] -= q * row[i]
        for row in V:
            row[j] -= q * row[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    for t in range(k):
        while True:
            entries = [(abs(A[i][j]), i, j) for i in range(t, k) for j in range(t, k) if A[i][j]]
            if not entries:
                return [A[i][i] for i in range(k)], V
            _, pi, pj = min(entries)
            A[t], A[pi] = A[pi], A[t]
            swap_cols(t, pj)
            piv = A[t][t]
            dirty = False
            for i in range(t + 1, k):
                q = A[i][t] // piv
                if q:
                    A[i] = [x - q * y for x, y in zip(A[i], A[t])]
                dirty |= A[i][t] != 0
            for j in range(t + 1, k):
                q = A[t][j] // piv
                if q:
                    col_op(t, j, q)
                dirty |= A[t][j] != 0
            if dirty:
                continue
            bad = [(i, j) for i in range(t + 1, k) for j in range(t + 1, k) if A[i][j] % piv]
            if bad:
                i, _ = bad[0]
                A[t] = [x + y for x, y in zip(A[t], A[i])]
                continue
            if piv < 0:
                A[t] = [-x for x in A[t]]
            break
    return [A[i][i] for i in range(k)], V


def _int_inverse(V: list[list[int]]) -> list[list[int]]:
    from fractions import Fraction

    k = len(V)
    M = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(k)] for i, row in enumerate(V)]
    for c in range(k):
        p = next(r for r in range(c, k) if M[r][c] != 0)
        M[c], M[p] = M[p], M[c]
        pv = M[c][c]
        M[c] = [x / pv for x in M[c]]
        for r in range(k):
            if r != c and M[r][c] != 0:
                f = M[r][c]
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    inv = [[x for x in row[k:]] for row in M]
    if any(x.denominator != 1 for row in inv for x in row):
        raise ArithmeticError("transformation is not unimodular")
    return [[int(x) for x in row] for row in inv]


@dataclass(frozen=True, eq=False)
class ClassGroup:
    """Reduced forms of discriminant -q with their coordinates in a basis of
    cyclic factors C(d_1) x ... x C(d_r), d_1 | d_2 | ... ."""

    disc: int
    reduced_forms: tuple[QuadraticForm, ...]
    structure: tuple[int, ...]
    generators: tuple[QuadraticForm, ...]
    coords: np.ndarray = field(repr=False)

    def __post_init__(self):
        index = {(f.a, f.b): i for i, f in enumerate(self.reduced_forms)}
        object.__setattr__(self, "_index", index)
        codes = self._encode(self.coords)
        lookup = np.full(max(self.h, 1), -1, dtype=np.int64)
        lookup[codes] = np.arange(self.h)
        object.__setattr__(self, "_by_code", lookup)

    @property
    def q(self) -> int:
        return -self.disc

    @property
    def h(self) -> int:
        return len(self.reduced_forms)

    @property
    def exponent(self) -> int:
        return self.structure[-1] if self.structure else 1

    @property
    def identity(self) -> int:
        return 0

    def structure_str(self) -> str:
        return " x ".join(f"C{d}" for d in self.structure) or "C1"

    def _encode(self, coords: np.ndarray) -> np.ndarray:
        code = np.zeros(coords.shape[:-1], dtype=np.int64)
        for i, d in enumerate(self.structure):
            code = code * d + coords[..., i] % d
        return code

    def index(self, f: QuadraticForm) -> int:
        f = f if f.is_reduced() else reduce(f)
        return self._index[(f.a, f.b)]

    def index_many(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        keys = np.array([f.a * (4 * self.q + 1) + f.b for f in self.reduced_forms], dtype=np.int64)
        order = np.argsort(keys)
        want = np.asarray(a, dtype=np.int64) * (4 * self.q + 1) + np.asarray(b, dtype=np.int64)
        pos = np.searchsorted(keys[order], want)
        pos = np.minimum(pos, len(keys) - 1)
        if np.any(keys[order][pos] != want):
            raise ValueError("input contains a form that is not reduced of this discriminant")
        return order[pos]

    def form(self, i: int) -> QuadraticForm:
        return self.reduced_forms[i]

    def multiply(self, i, j):
        """Product of class indices (scalars or arrays) via coordinates."""
        return self._by_code[self._encode(self.coords[i] + self.coords[j])]

    def inverse(self, i):
        return self._by_code[self._encode(-self.coords[i])]

    def power(self, i, k):
        return self._by_code[self._encode(self.coords[i] * k)]

    def order(self, i: int) -> int:
        out = 1
        for x, d in zip(self.coords[i], self.structure):
            out = math.lcm(out, d // math.gcd(int(x), d))
        return out


@lru_cache(maxsize=64)
def enumerate_class_group(q: int) -> ClassGroup:
    """The class group of discriminant -q for a prime q = 3 (mod 4)."""
    if q < 3 or q % 4 != 3 or not is_prime(q):
        raise ValueError(f"q={q} must be a prime congruent to 3 mod 4")
    disc = -q
    forms = reduced_forms(disc)
    index = {(f.a, f.b): i for i, f in enumerate(forms)}
    principal = QuadraticForm.principal(disc)
    if index[(principal.a, principal.b)] != 0:
        raise AssertionError("principal form should sort first")

    # grow the subgroup one generator at a time, recording relations
    coords: dict[int, list[int]] = {0: []}
    gens: list[QuadraticForm] = []
    relations: list[list[int]] = []
    for cand in forms:
        ci = index[(cand.a, cand.b)]
        if ci in coords:
            continue
        powers = [principal, cand]
        x, m = cand, 1
        while index[(x.a, x.b)] not in coords:
            x = compose(x, cand)
            powers.append(x)
            m += 1
        back = coords[index[(x.a, x.b)]]
        relations.append([-v for v in back] + [m])
        old = list(coords.items())
        for i in range(1, m):
            for hi, hc in old:
                y = compose(powers[i], forms[hi])
                coords[index[(y.a, y.b)]] = hc + [i]
        for hi, hc in old:
            coords[hi] = hc + [0]
        gens.append(cand)
    k = len(gens)
    if len(coords) != len(forms):
        raise AssertionError("generation did not cover the class group")
    rel = [row + [0] * (k - len(row)) for row in relations]
    diag, V = _smith(rel) if k else ([], [])
    keep = [i for i, d in enumerate(diag) if abs(d) > 1]
    perm = sorted(keep, key=lambda i: abs(diag[i]))
    structure = tuple(abs(diag[i]) for i in perm)
    X = np.array([coords[i] for i in range(len(forms))], dtype=np.int64).reshape(len(forms), k)
    Y = X @ np.array(V, dtype=np.int64).reshape(k, k) if k else X
    new_coords = np.stack([Y[:, i] % abs(diag[i]) for i in perm], axis=1) if perm else np.zeros((len(forms), 0), np.int64)
    Vinv = _int_inverse(V) if k else []
    new_gens = []
    for i in perm:
        g = principal
        for j, e in enumerate(Vinv[i]):
            e %= _order_of(gens[j], principal)
            for _ in range(e):
                g = compose(g, gens[j])
        new_gens.append(g)
    return ClassGroup(disc, tuple(forms), structure, tuple(new_gens), new_coords)


def _order_of(f: QuadraticForm, principal: QuadraticForm) -> int:
    x, m = f, 1
    while x != principal:
        x = compose(x, f)
        m += 1
    return m


def class_number(q: int) -> int:
    """h(-q) by counting reduced forms."""
    return count_reduced_forms(-q)


@dataclass(frozen=True)
class PrimeIdealClass:
    """How p decomposes in Q(sqrt(-q)) and the class(es) of the primes above it."""

    kind: Literal["split", "inert", "ramified"]
    classes: tuple[QuadraticForm, ...] = ()


def prime_ideal_class(p: int, G: ClassGroup) -> PrimeIdealClass:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    q = G.q
    chi = kronecker(-q, p)
    if chi == -1:
        return PrimeIdealClass("inert")
    if chi == 0:
        return PrimeIdealClass("ramified", (reduce(QuadraticForm.from_ab(q, q, -q)),))
    if p == 2:
        b = 1
    else:
        b = sqrt_mod(-q, p)
        if b % 2 == 0:
            b = p - b
    f = reduce(QuadraticForm.from_ab(p, b, -q))
    return PrimeIdealClass("split", (f, f.inverse()))


@dataclass(frozen=True, eq=False)
class PrimeSplitting:
    """Vectorized decomposition data for all primes up to ``limit``.

    ``chi[i]`` is the Kronecker symbol (-q/p_i); ``cls[i]`` is the class index of
    one prime above p_i (-1 when p_i is inert)."""

    group: ClassGroup
    limit: int
    primes: np.ndarray = field(repr=False)
    chi: np.ndarray = field(repr=False)
    cls: np.ndarray = field(repr=False)


@lru_cache(maxsize=4)
def prime_splitting(q: int, limit: int) -> PrimeSplitting:
    G = enumerate_class_group(q)
    primes = primes_up_to(limit).primes
    table = quadratic_residue_table(q)
    # (-q/p) = (p/q) for odd p by reciprocity, since q = 3 mod 4
    chi = table[primes % q]
    if len(primes):
        chi[0] = 1 if q % 8 == 7 else -1
    cls = np.full(len(primes), -1, dtype=np.int64)
    ram = primes == q
    cls[ram] = G.index(reduce(QuadraticForm.from_ab(q, q, -q)))
    split = np.flatnonzero(chi == 1)
    p = primes[split]
    odd = p != 2
    b = np.ones(len(p), dtype=np.int64)
    if odd.any():
        r = sqrt_mod_many(-q % p[odd], p[odd])
        b[odd] = np.where(r % 2 == 1, r, p[odd] - r)
    c = (b * b + q) // (4 * p)
    ra, rb, _ = reduce_many(p, b, c)
    cls[split] = G.index_many(ra, rb)
    return PrimeSplitting(G, limit, primes, chi, cls)
