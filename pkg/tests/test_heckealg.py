import json
import random

import numpy as np
import pytest

from conftest import SEED
from weightone.character import conjugate_pairs
from weightone.classgroup import enumerate_class_group
from weightone.cyclotomic import CyclotomicSum, RootOfUnity
from weightone.heckealg import (
    MAX_DEGREE,
    ChiPoly,
    HeckeLinearForm,
    HeckePowerExpression,
    UnitEigenPair,
    build_relation,
    eigenpairs_with_ratio_order,
    icosahedral_relation,
    projective_trace_set,
    rewrite_to_linear,
    trace_power,
    verify_icosahedral_identity,
)
from weightone.theta import ThetaSeries

DENOMS = (1, 2, 3, 4, 5, 6, 8, 10, 12, 15, 20, 24)


def random_pair(rng):
    d1, d2 = rng.choice(DENOMS), rng.choice(DENOMS)
    return UnitEigenPair(RootOfUnity(rng.randrange(d1), d1), RootOfUnity(rng.randrange(d2), d2))


def random_cyclotomic(rng):
    d = rng.choice((1, 3, 4, 5))
    return CyclotomicSum.from_exponents(d, {rng.randrange(d): rng.randint(-3, 3) for _ in range(2)})


def pair(a, b):
    return UnitEigenPair(RootOfUnity(*a), RootOfUnity(*b))


ONE, MINUS = (0, 1), (1, 2)


def test_trace_power_examples():
    p = pair(ONE, ONE)
    assert trace_power(p, 0) == 1
    assert trace_power(p, 12) == 13
    q = pair(ONE, MINUS)
    assert trace_power(q, 1) == 0
    assert trace_power(q, 2) == 1
    with pytest.raises(ValueError):
        trace_power(p, -1)


def test_trace_power_numeric():
    rng = random.Random(SEED)
    for _ in range(50):
        pr = random_pair(rng)
        a, b = pr.alpha.to_complex(), pr.beta.to_complex()
        for k in (0, 1, 5, 17):
            want = sum(a**i * b ** (k - i) for i in range(k + 1))
            assert abs(trace_power(pr, k).to_complex() - want) < 1e-9


def test_chebyshev_recursion():
    rng = random.Random(SEED)
    for _ in range(200):
        pr = random_pair(rng)
        t = [trace_power(pr, k) for k in range(MAX_DEGREE + 2)]
        a, det = pr.trace, pr.det.to_cyclotomic()
        for k in range(1, MAX_DEGREE + 1):
            assert t[k + 1] == a * t[k] - det * t[k - 1]


def test_rewrite_examples():
    sq = rewrite_to_linear(HeckePowerExpression.power(2))
    assert sq.terms == {2: ChiPoly.constant(1), 0: ChiPoly.chi_power(1)}
    assert rewrite_to_linear(HeckePowerExpression.power(1)).terms == {1: ChiPoly.constant(1)}
    cube = rewrite_to_linear(HeckePowerExpression.power(3))
    assert cube.terms == {3: ChiPoly.constant(1), 1: ChiPoly.chi_power(1, 2)}
    with pytest.raises(OverflowError):
        rewrite_to_linear(HeckePowerExpression.power(MAX_DEGREE + 1))


def test_rewriter_soundness():
    rng = random.Random(SEED + 1)
    for _ in range(200):
        deg = rng.randint(0, 8)
        coeffs = [
            ChiPoly({rng.randint(-2, 2): random_cyclotomic(rng)}) if rng.random() < 0.7 else ChiPoly()
            for _ in range(deg + 1)
        ]
        expr = HeckePowerExpression(coeffs)
        lin = rewrite_to_linear(expr)
        pr = random_pair(rng)
        assert lin.evaluate(pr) == expr.evaluate(pr)


def test_relation_single_zero_trace():
    rel = build_relation([CyclotomicSum.integer(0)], 1)
    assert rel.length == 1 and rel.constant == 1
    for pr in (pair(ONE, MINUS), pair((1, 4), (3, 4)), pair((1, 3), (5, 6))):
        assert pr.trace == 0 and rel.holds_for(pr)
    assert not rel.holds_for(pair(ONE, ONE))


def test_relation_three_traces():
    S = [CyclotomicSum.integer(v) for v in (2, -2, 0)]
    rel = build_relation(S, 5)
    assert rel.length <= 3 and rel.constant == 5
    for pr in (pair(ONE, ONE), pair(MINUS, MINUS), pair(ONE, MINUS)):
        assert rel.holds_for(pr)


def test_relation_rejects_bad_input():
    with pytest.raises(ValueError):
        build_relation([], 1)
    with pytest.raises(ValueError, match="minimal valid A is 1"):
        build_relation([CyclotomicSum.integer(0)], 0)


def test_a5_relation_on_all_ratio_orders():
    S = projective_trace_set((1, 2, 3, 5))
    assert len(S) == 9
    rel = build_relation(S, 1)
    assert rel.length <= len(S)
    half = RootOfUnity(0, 1)
    for m in (1, 2, 3, 5):
        for j in range(2 * m):
            w = RootOfUnity(j, 2 * m)
            if (w**2).order == m:
                assert rel.holds_for(UnitEigenPair(half * w, half / w))


def test_relation_on_random_sets_and_pairs():
    rng = random.Random(SEED + 2)
    for _ in range(20):
        pairs = [random_pair(rng) for _ in range(rng.randint(1, 6))]
        S = []
        for pr in pairs:
            if pr.trace not in S:
                S.append(pr.trace)
        rel = build_relation(S, rng.choice((1, -1, 2, 7)))
        for pr in pairs:
            assert rel.holds_for(pr)


def test_icosahedral_orders():
    assert [m for m in range(1, 13) if verify_icosahedral_identity(m)] == [1, 2, 3, 5, 6]
    with pytest.raises(ValueError):
        verify_icosahedral_identity(0)


def test_icosahedral_values():
    rel = icosahedral_relation()
    assert rel.lhs(pair(ONE, ONE)) == 1  # 13 - 9 - 3
    assert rel.lhs(pair((1, 4), ONE)) == -3
    # order 6: 1 - (-2) - 2 by summing consecutive powers of a primitive sixth root
    assert all(rel.lhs(p) == 1 for p in eigenpairs_with_ratio_order(6))


def test_icosahedral_is_determinant_free():
    rel = icosahedral_relation()
    for b in range(12):
        assert rel.lhs(UnitEigenPair(RootOfUnity(1, 5) * RootOfUnity(b, 12), RootOfUnity(b, 12))) == 1


def test_relation_json():
    data = json.loads(icosahedral_relation().to_json())
    assert data["type"] == "icosahedral" and data["constant"] == 1
    assert [t["k"] for t in data["terms"]] == [2, 8, 12]
    assert data["terms"][2]["mu_exponents"] == {"-6": "0:1@1"}


def test_linear_form_algebra():
    f = HeckeLinearForm({1: ChiPoly.constant(1)})
    g = f.times_ap()
    assert g.terms == {2: ChiPoly.constant(1), 0: ChiPoly.chi_power(1)}
    assert (g + g.scale(ChiPoly.constant(-1))).terms == {}


def test_dihedral_consistency_with_theta():
    for q in (23, 47, 3299):
        G = enumerate_class_group(q)
        for psi, _ in conjugate_pairs(G)[:3]:
            th = ThetaSeries(psi, 10**4)
            d = psi.order
            for i, p in enumerate(th.primes.tolist()):
                chi = int(th.chi[i])
                k = int(th.prime_exponents[i])
                if chi == 1:
                    pr = UnitEigenPair(RootOfUnity(k, d), RootOfUnity(-k, d))
                elif chi == 0:
                    pr = UnitEigenPair(RootOfUnity(k, d), RootOfUnity(0, 1))
                else:
                    for e in range(1, 5):
                        if p**e <= th.N:
                            assert th[p**e] == (0 if e % 2 else 1)
                    continue
                e = 1
                while p**e <= th.N:
                    if chi == 0:
                        # beta = 0 at the bad prime: c_{q^e} = alpha^e
                        assert th[p**e] == (pr.alpha**e).to_cyclotomic()
                    else:
                        assert th[p**e] == trace_power(pr, e)
                    e += 1


def test_chipoly_evaluate():
    c = ChiPoly({-1: 2, 2: CyclotomicSum.zeta(3)})
    v = c.evaluate(RootOfUnity(1, 4))
    z = 2 * np.exp(-2j * np.pi / 4) + np.exp(2j * np.pi / 3) * np.exp(4j * np.pi / 4)
    assert abs(v.to_complex() - z) < 1e-12
