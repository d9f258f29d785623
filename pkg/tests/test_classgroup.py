import itertools
import math

import numpy as np
import pytest

from weightone.arith import is_prime, kronecker, primes_up_to
from weightone.classgroup import (
    QuadraticForm,
    class_number,
    compose,
    count_reduced_forms,
    enumerate_class_group,
    prime_ideal_class,
    prime_splitting,
    reduce,
    reduce_many,
    reduced_forms,
)


def levels(lo, hi):
    return [q for q in primes_up_to(hi) if q >= lo and q % 4 == 3]


def class_number_oracle(q):
    """h(-q) = -(w / 2q) sum_{n<q} n (n/q), from the finite form of Dirichlet's formula."""
    sq = np.zeros(q, dtype=np.int64)
    sq[(np.arange(1, q, dtype=np.int64) ** 2) % q] = 1
    leg = np.where(sq == 1, 1, -1)
    leg[0] = 0
    w = 6 if q == 3 else 2
    s = int(np.dot(np.arange(q), leg))
    h, r = divmod(-w * s, 2 * q)
    assert r == 0
    return h


def reduce_by_words(f, depth=10):
    """Reduced representative found by searching words in S and T^(+-1)."""
    def S(g):
        return (g[2], -g[1], g[0])

    def T(g, s):
        a, b, c = g
        return (a, b + 2 * s * a, a * s * s + b * s + c)

    seen = {tuple(f)}
    frontier = [tuple(f)]
    for _ in range(depth):
        nxt = []
        for g in frontier:
            for h in (S(g), T(g, 1), T(g, -1)):
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
        frontier = nxt
    red = [g for g in seen if QuadraticForm(*g).is_reduced()]
    assert len(red) == 1
    return red[0]


def test_known_groups():
    assert enumerate_class_group(23).structure_str() == "C3"
    assert enumerate_class_group(47).structure_str() == "C5"
    assert enumerate_class_group(71).structure_str() == "C7"
    assert enumerate_class_group(3299).structure_str() == "C3 x C9"
    assert enumerate_class_group(4027).structure_str() == "C3 x C3"
    assert enumerate_class_group(3).h == 1
    assert [repr(f) for f in enumerate_class_group(23).reduced_forms] == ["(1,1,6)", "(2,-1,3)", "(2,1,3)"]


@pytest.mark.parametrize("q", [21, 4, 1, 13, -23, 2])
def test_rejects_bad_levels(q):
    with pytest.raises(ValueError):
        enumerate_class_group(q)


def test_reduce_examples():
    assert tuple(reduce(QuadraticForm(6, 1, 1))) == (1, 1, 6)
    assert tuple(compose(QuadraticForm(2, 1, 3), QuadraticForm(2, 1, 3))) == (2, -1, 3)
    with pytest.raises(ValueError):
        compose(QuadraticForm(2, 1, 3), QuadraticForm(1, 1, 2))


def test_form_rejects_wrong_disc():
    with pytest.raises(ValueError):
        QuadraticForm(2, 1, 3, disc=-31)


def test_reduce_matches_word_search():
    rng = np.random.default_rng(7)
    for f in enumerate_class_group(71).reduced_forms:
        for _ in range(5):
            # move f by a random unimodular substitution, then reduce back
            a, b, c = f
            # at most 8 letters, inside the search depth
            for _ in range(2):
                s = int(rng.integers(-2, 3))
                a, b, c = a, b + 2 * s * a, a * s * s + b * s + c
                a, b, c = c, -b, a
            g = QuadraticForm(a, b, c)
            assert tuple(reduce(g)) == tuple(f)
            assert tuple(reduce(g)) == reduce_by_words(g)


def test_reduce_many_matches_scalar():
    rng = np.random.default_rng(11)
    q = 199
    forms = []
    for _ in range(300):
        a = int(rng.integers(1, 400))
        b = int(rng.integers(-a, a + 1)) | 1
        if (b * b + q) % (4 * a):
            continue
        forms.append((a, b, (b * b + q) // (4 * a)))
    A, B, C = (np.array(x, dtype=np.int64) for x in zip(*forms))
    ra, rb, rc = reduce_many(A, B, C)
    for i, f in enumerate(forms):
        assert tuple(reduce(QuadraticForm(*f))) == (ra[i], rb[i], rc[i])


def test_reduced_forms_all_primitive_and_reduced():
    for q in levels(3, 2000):
        forms = reduced_forms(-q)
        assert all(f.is_reduced() and f.disc == -q for f in forms)
        assert all(math.gcd(f.a, f.b, f.c) == 1 for f in forms)
        assert len(forms) == count_reduced_forms(-q)


def test_class_number_oracle_to_2e4():
    for q in levels(3, 2 * 10**4):
        assert enumerate_class_group(q).h == class_number_oracle(q), q


@pytest.mark.slow
def test_class_number_oracle_to_1e5():
    for q in levels(2 * 10**4, 10**5):
        assert class_number(q) == class_number_oracle(q), q


def test_structure_invariants():
    for q in levels(3, 5000):
        G = enumerate_class_group(q)
        assert math.prod(G.structure) == G.h
        assert all(b % a == 0 for a, b in zip(G.structure, G.structure[1:]))
        assert all(d > 1 for d in G.structure)
        # generators have unit coordinate vectors
        for i, g in enumerate(G.generators):
            assert G.coords[G.index(g)].tolist() == [int(j == i) for j in range(len(G.structure))]


def test_group_laws_exhaustive():
    for q in levels(3, 3000):
        G = enumerate_class_group(q)
        if G.h > 50:
            continue
        idx = np.arange(G.h)
        I, J = np.meshgrid(idx, idx, indexing="ij")
        table = G.multiply(I, J)
        assert np.array_equal(table, table.T)
        assert np.array_equal(table[0], idx)
        for row in table:
            assert sorted(row.tolist()) == idx.tolist()
        for i, j, k in itertools.product(range(G.h), repeat=3):
            assert table[table[i, j], k] == table[i, table[j, k]]
        assert np.all(table[idx, G.inverse(idx)] == 0)


def test_coordinate_product_matches_composition():
    for q in (23, 47, 71, 199, 3299, 4027):
        G = enumerate_class_group(q)
        for i, f in enumerate(G.reduced_forms):
            for j, g in enumerate(G.reduced_forms):
                assert G.index(compose(f, g)) == G.multiply(i, j)
            assert G.index(f.inverse()) == G.inverse(i)


def test_prime_classes_examples():
    G = enumerate_class_group(23)
    assert prime_ideal_class(2, G).kind == "split"
    assert prime_ideal_class(5, G).kind == "inert"
    ram = prime_ideal_class(23, G)
    assert ram.kind == "ramified" and G.index(ram.classes[0]) == 0
    s59 = prime_ideal_class(59, G)
    assert s59.kind == "split" and G.index(s59.classes[0]) == 0


def test_split_iff_kronecker():
    G = enumerate_class_group(71)
    for p in primes_up_to(10**4):
        kind = prime_ideal_class(int(p), G).kind
        chi = kronecker(-71, int(p))
        assert kind == {1: "split", -1: "inert", 0: "ramified"}[chi]


def test_split_classes_mutually_inverse_and_represent_p():
    G = enumerate_class_group(199)
    for p in primes_up_to(3000):
        pc = prime_ideal_class(int(p), G)
        if pc.kind != "split":
            continue
        f, g = pc.classes
        assert G.index(compose(f, g)) == 0
        # p is represented by the class of a prime above it
        assert any(f(x, y) == p for x in range(-60, 61) for y in range(0, 61))


def test_vectorized_splitting_matches_scalar():
    for q in (23, 3299):
        sp = prime_splitting(q, 5000)
        G = sp.group
        for p, chi, cls in zip(sp.primes, sp.chi, sp.cls):
            pc = prime_ideal_class(int(p), G)
            assert chi == kronecker(-q, int(p))
            if pc.kind != "inert":
                assert cls in {G.index(f) for f in pc.classes}


def test_frobenius_classes_cover_group():
    for q in (23, 3299):
        sp = prime_splitting(q, 10**5)
        split = sp.cls[sp.chi == 1]
        assert set(split.tolist()) == set(range(sp.group.h))


def test_chebotarev_split_density():
    sp = prime_splitting(47, 10**6)
    good = sp.chi != 0
    frac = np.mean(sp.chi[good] == 1)
    assert abs(frac - 0.5) < 0.01
    counts = np.bincount(sp.cls[sp.chi == 1], minlength=5) / np.sum(sp.chi == 1)
    assert np.max(np.abs(counts - 0.2)) < 0.01


def test_is_prime_agrees_on_levels():
    assert all(is_prime(q) for q in levels(3, 1000))
