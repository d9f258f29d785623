import cmath
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from weightone.cyclotomic import (
    CyclotomicSum,
    RootOfUnity,
    cyclotomic_polynomial,
    embed_array,
    euler_phi,
    multiply_arrays,
    roots_array,
)

MODULI = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 15, 20, 21, 30]


def zeta(d, k=1):
    return cmath.exp(2j * cmath.pi * k / d)


def numeric(terms, d):
    return sum(c * zeta(d, k) for k, c in terms.items())


exps = st.dictionaries(st.integers(0, 59), st.integers(-5, 5), max_size=6)


def test_cyclotomic_polynomials():
    assert cyclotomic_polynomial(1) == (-1, 1)
    assert cyclotomic_polynomial(3) == (1, 1, 1)
    assert cyclotomic_polynomial(12) == (1, 0, -1, 0, 1)
    assert [euler_phi(d) for d in (1, 2, 12, 30)] == [1, 1, 4, 8]


def test_sum_of_primitive_roots():
    # sum of all d-th roots vanishes for d > 1
    for d in MODULI[1:]:
        assert CyclotomicSum.from_exponents(d, {k: 1 for k in range(d)}).is_zero()


@given(st.sampled_from(MODULI), exps, exps)
def test_ring_operations_match_complex(d, a, b):
    x = CyclotomicSum.from_exponents(d, a)
    y = CyclotomicSum.from_exponents(d, b)
    assert abs((x * y).to_complex() - numeric(a, d) * numeric(b, d)) < 1e-8
    assert abs((x + y).to_complex() - numeric(a, d) - numeric(b, d)) < 1e-8
    assert abs(x.conjugate().to_complex() - numeric(a, d).conjugate()) < 1e-8


@given(st.sampled_from(MODULI), exps)
def test_equality_is_canonical_across_moduli(d, a):
    x = CyclotomicSum.from_exponents(d, a)
    y = x.lift(3 * d)
    assert x == y
    assert hash(x) == hash(y)


def test_exact_values():
    assert CyclotomicSum.zeta(3) + CyclotomicSum.zeta(3, 2) == -1
    assert CyclotomicSum.zeta(4) ** 2 == -1
    assert CyclotomicSum.zeta(6) - CyclotomicSum.zeta(3) == 1
    assert CyclotomicSum.integer(0).exact_repr() == "0:0"
    assert (CyclotomicSum.zeta(5) ** 5) == 1


def test_trace_and_embeddings():
    x = CyclotomicSum.zeta(5) + CyclotomicSum.zeta(5, 4)  # 2 cos(2pi/5)
    assert x.trace() == Fraction(-1, 2)
    emb = sorted(z.real for z in x.embeddings())
    assert emb[0] == pytest.approx(2 * np.cos(4 * np.pi / 5))
    assert emb[-1] == pytest.approx(2 * np.cos(2 * np.pi / 5))


def test_galois_conjugate():
    x = CyclotomicSum.zeta(7, 2)
    assert x.galois_conjugate(3) == CyclotomicSum.zeta(7, 6)


def test_root_of_unity_arithmetic():
    a = RootOfUnity(1, 3)
    b = RootOfUnity(1, 6)
    assert a * b == RootOfUnity(1, 2)
    assert (a**-1) == RootOfUnity(2, 3)
    assert RootOfUnity(4, 8) == RootOfUnity(1, 2)
    assert RootOfUnity(2, 6).order == 3
    assert a.to_cyclotomic() == CyclotomicSum.zeta(3)


@given(st.sampled_from(MODULI), st.lists(st.integers(0, 59), min_size=1, max_size=20), st.lists(st.integers(0, 59), min_size=1, max_size=20))
def test_vectorized_product(d, ka, kb):
    n = min(len(ka), len(kb))
    a = roots_array(np.array(ka[:n]), d) + 2
    b = roots_array(np.array(kb[:n]), d)
    got = embed_array(multiply_arrays(a, b, d), d)
    want = embed_array(a, d) * embed_array(b, d)
    assert np.allclose(got, want)
