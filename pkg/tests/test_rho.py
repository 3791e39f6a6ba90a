import cmath
import itertools

import numpy as np
import pytest

from thetachars.arith import Cyclo
from thetachars.rho import (Fl2, cubic_character, lambda_value, lambda_with_character, norm, phi_chi_matrix,
                            phi_table, rho_matrices)
from thetachars.weil import gauss_sum, weil_operators


@pytest.mark.parametrize("l", [5, 11, 17, 23])
def test_field_axioms(l):
    F = Fl2(l)
    w = (0, 1)
    assert F.mul(w, w) == (l - 3, 0)
    # every nonzero element is invertible: x^(l^2 - 1) = 1
    for i in range(1, F.size, max(1, F.size // 40)):
        assert F.pow(F.element(i), F.size - 1) == (1, 0)
    x, y = (2, 3), (4, 1)
    assert norm(F, F.mul(x, y)) == norm(F, x) * norm(F, y) % l


def test_field_rejects_bad_primes():
    with pytest.raises(ValueError):
        Fl2(7)
    with pytest.raises(ValueError):
        Fl2(9)


@pytest.mark.parametrize("l", [5, 11, 17, 23])
def test_gauss_sum_of_norm_form(l):
    assert gauss_sum(Fl2(l).quadratic_module(), 1) == Cyclo.rational(l, -l)


@pytest.mark.parametrize("l", [5, 11])
def test_cubic_character_multiplicative(l):
    F = Fl2(l)
    chi = cubic_character(F)
    elems = [F.element(i) for i in range(1, F.size, 3)]
    for x, y in itertools.product(elems[:15], repeat=2):
        assert chi(F.mul(x, y)) == chi(x) * chi(y)
    assert chi((1, 0)) == Cyclo.one(3)
    with pytest.raises(ValueError):
        chi((0, 0))


@pytest.mark.parametrize("l", [5, 11])
def test_lambda_real_and_generator_independent(l):
    F = Fl2(l)
    other = cubic_character(F, skip=3)
    for r in range(1, l):
        lam = lambda_value(F, r)
        assert lam == lam.conj()
        assert lam.embed(3 * l) == lambda_with_character(F, other, r) or \
            lam.embed(3 * l) == lambda_with_character(F, other.conjugate(), r)


def brute_lambda(l, r):
    F = Fl2(l)
    chi = cubic_character(F)
    total = 0j
    for x in F:
        if norm(F, x) == r:
            total += chi(x).to_complex() * cmath.exp(2j * cmath.pi * F.trace(x) / l)
    return -total / l


@pytest.mark.parametrize("l", [5, 11])
def test_lambda_brute_force(l):
    for r in range(1, l):
        assert lambda_value(Fl2(l), r).to_complex() == pytest.approx(brute_lambda(l, r).real, abs=1e-9)


@pytest.mark.parametrize("l", [5, 11, 17])
def test_rho_relations(l):
    R = rho_matrices(l)
    S, T = R.matS, R.matT
    S2 = S @ S
    assert S == S.transpose()
    assert S == S.conj()
    assert S2.is_identity()
    assert (T ** l).is_identity()
    assert (S @ T) ** 3 == S2


def test_rho_numeric_unitary():
    S = rho_matrices(11).matS.to_complex()
    assert np.allclose(S @ S.conj().T, np.eye(10))


def test_phi_intertwines_weil_l5():
    F = Fl2(5)
    W = weil_operators(F.quadratic_module())
    R = rho_matrices(5)
    chi = cubic_character(F)
    P = phi_chi_matrix(F, chi).embed(15)
    assert P @ W.opT.embed(15) == R.matT.embed(15) @ P
    assert P @ W.opS.embed(15) == R.matS.embed(15) @ P


def test_phi_table_weights():
    F = Fl2(11)
    phi = phi_table(F)
    assert set(np.unique(phi.value)) == {-1, 0, 2}
    assert np.all(phi.index == F.norms)
    M = phi.matrix()
    assert M.shape == (10, 121)
    # chi + chi-bar sums to zero over each norm fibre (each fibre is a coset of the norm-one group)
    assert np.all(M.sum(axis=1) == 0)
