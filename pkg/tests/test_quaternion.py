import itertools
from fractions import Fraction as F

import numpy as np
import pytest

from thetachars.quaternion import (QuatAlgebra, dual_lattice, enumerate_by_norm, integer_norms, is_principal,
                                   is_ring, left_ideal_Dp, maximal_order, residue_map, sqrt_minus_l_times)
from thetachars.rho import phi_table
from thetachars.theta import moment_table, spherical_basis

PRIMES = [5, 11, 17, 23]


@pytest.fixture(scope="module", params=PRIMES)
def setup(request):
    A = QuatAlgebra(request.param)
    O = maximal_order(A)
    return A, O, left_ideal_Dp(A, O)


def test_algebra_relations():
    A = QuatAlgebra(11)
    assert A.mul(A.s, A.s) == (-11, 0, 0, 0)
    assert A.mul(A.u, A.u) == (F(-1, 3), 0, 0, 0)
    assert A.mul(A.u, A.s) == A.conj(A.mul(A.s, A.u))  # us = -su
    x, y = (1, 2, F(1, 2), -1), (F(3, 2), 0, 1, 1)
    assert A.norm(A.mul(x, y)) == A.norm(x) * A.norm(y)
    assert A.mul(x, A.conj(x)) == (A.norm(x), 0, 0, 0)
    for a, b, c in itertools.product([A.s, A.u, x], repeat=3):
        assert A.mul(A.mul(a, b), c) == A.mul(a, A.mul(b, c))


def test_algebra_rejects_bad_l():
    with pytest.raises(ValueError):
        QuatAlgebra(7)


def test_maximal_order(setup):
    A, O, _ = setup
    assert is_ring(O)
    assert O.det_gram == A.l ** 2
    assert O.rednorm == 1
    assert all(A.norm(b).denominator == 1 and A.trace(b).denominator == 1 for b in O.basis)


def test_Dp_ideal(setup):
    A, O, I = setup
    assert O.contains_lattice(I)
    assert I.index_in(O) == 9
    assert I.rednorm == 3
    assert I.det_gram == 81 * A.l ** 2


def test_principality():
    A = QuatAlgebra(17)
    O = maximal_order(A)
    assert is_principal(O)
    assert not is_principal(left_ideal_Dp(A, O))
    # the other prime above 3 gives O * 3u
    assert is_principal(left_ideal_Dp(A, O, sign=1))


def test_dual_of_scaled_ideal(setup):
    A, O, I = setup
    for L in (O, I):
        assert dual_lattice(sqrt_minus_l_times(L), L.rednorm * A.l) == L


def test_enumeration_matches_brute_force():
    A = QuatAlgebra(5)
    O = maximal_order(A)
    X = enumerate_by_norm(O, 6)
    got = {tuple(x) for x in X.tolist()}
    want = set()
    for x in itertools.product(range(-8, 9), repeat=4):
        if A.norm(O.element(x)) <= 6:
            want.add(x)
    assert got == want
    assert list(integer_norms(O, X)) == [int(A.norm(O.element(x))) for x in X]


def test_residue_map_properties(setup):
    A, O, I = setup
    for L in (O, I):
        P = residue_map(L)
        assert P(P.c0) == (1, 0)
        X = enumerate_by_norm(L, 3 * L.rednorm)
        img = P.images(X)
        assert np.array_equal(P.field.norms[img], integer_norms(L, X) % A.l)
        # sqrt(-l) L is the kernel
        for b in L.basis:
            assert P(A.mul(A.s, b)) == (0, 0)


def test_c0_rule_is_smallest_norm():
    A = QuatAlgebra(11)
    O = maximal_order(A)
    P = residue_map(O)
    assert A.norm(P.c0) == 1


def test_other_c0_is_a_twist():
    A = QuatAlgebra(5)
    O = maximal_order(A)
    P = residue_map(O)
    phi = phi_table(P.field)
    X = enumerate_by_norm(O, 12)
    m = integer_norms(O, X)
    cls = phi.classes[P.images(X)]
    pick = next(i for i in range(len(X)) if m[i] % 5 == 1 and cls[i] != 0)
    e0 = int(cls[pick])
    P2 = residue_map(O, c0=O.element(X[pick]))
    base = moment_table(O, P, phi, 2, 6)
    other = moment_table(O, P2, phi, 2, 6)
    differs = False
    for p in spherical_basis(A.gram, 2):
        assert other.series(p) == base.series(p, twist=e0)
        differs |= other.series(p) != base.series(p)
    assert differs
