import cmath
import itertools
from fractions import Fraction as F

import pytest

from thetachars.arith import Cyclo
from thetachars.weil import (NotProper, QuadraticModule, bilinear, cocycle, discriminant_module, gauss_sum,
                             is_proper, milgram_check, units, weil_operators)


def brute_gauss(orders, qform, a):
    total = 0j
    for x in itertools.product(*(range(n) for n in orders)):
        total += cmath.exp(2j * cmath.pi * a * float(qform(x)))
    return total


def cyclic(n, num=1):
    return QuadraticModule((n,), lambda x: F(num * x[0] ** 2 % n, n))


@pytest.mark.parametrize("n,num", [(5, 1), (5, 2), (7, 1), (11, 3)])
def test_gauss_sum_matches_brute_force(n, num):
    M = cyclic(n, num)
    for a in units(n):
        assert gauss_sum(M, a).to_complex() == pytest.approx(brute_gauss((n,), M.q, a), abs=1e-9)


def test_bilinear_is_polarization():
    M = QuadraticModule((5, 5), lambda x: F((x[0] ** 2 + 3 * x[1] ** 2) % 5, 5))
    x, y = (1, 2), (3, 4)
    s = ((x[0] + y[0]) % 5, (x[1] + y[1]) % 5)
    assert (bilinear(M, x, y) - (M.q(s) - M.q(x) - M.q(y))).denominator == 1


def test_cocycle_is_eighth_root_and_multiplicative():
    M = cyclic(7)
    for a in units(7):
        c = cocycle(M, a)
        assert c ** 8 == Cyclo.one(c.m)
    for a, b in itertools.product(units(7), repeat=2):
        assert cocycle(M, a).galois(b) * cocycle(M, b) == cocycle(M, (a * b) % 7)


def test_improper_module_rejected():
    # discriminant form of the lattice 2Z: odd signature, so only projective
    M = QuadraticModule((2,), lambda x: F(x[0] ** 2, 4))
    assert not is_proper(M)
    with pytest.raises(NotProper):
        weil_operators(M)


@pytest.mark.parametrize("l", [5, 11])
def test_weil_relations_two_dim_norm_form(l):
    M = QuadraticModule((l, l), lambda x: F((x[0] ** 2 + 3 * x[1] ** 2) % l, l))
    assert is_proper(M)
    W = weil_operators(M)
    S, T = W.opS, W.opT
    S2 = S @ S
    assert (S2 @ S2).is_identity()
    assert (S @ T) ** 3 == S2
    assert (T ** l).is_identity()


@pytest.mark.parametrize("gram", [
    [[2, -1], [-1, 2]],  # A2
    [[2, 0], [0, 2]],  # A1 + A1
    [[2, -1, 0, 0], [-1, 2, -1, -1], [0, -1, 2, 0], [0, -1, 0, 2]],  # D4
    [[2, 1], [1, 6]],
])
def test_milgram(gram):
    assert milgram_check(gram)


def test_discriminant_orders():
    assert len(discriminant_module([[2, -1], [-1, 2]])) == 3
    assert len(discriminant_module([[2, -1, 0, 0], [-1, 2, -1, -1], [0, -1, 2, 0], [0, -1, 0, 2]])) == 4


def test_odd_prime_rank_one_is_proper():
    assert is_proper(cyclic(5))
