from fractions import Fraction as F

import numpy as np
import pytest

from thetachars.arith import QExp, VectorQExp
from thetachars.quaternion import QuatAlgebra, enumerate_by_norm, integer_norms, maximal_order, residue_map
from thetachars.rho import phi_table
from thetachars import pipeline
from thetachars.models import get_model
from thetachars.theta import (NoSolution, ZeroSeries, corrupt, cusp_solve, linear_combination, monomials,
                              moment_table, normalize_integral, spherical_basis, t_check)


@pytest.mark.parametrize("nu", [0, 1, 2, 4, 8])
def test_spherical_dimension_and_harmonic(nu):
    gram = QuatAlgebra(11).gram
    basis = spherical_basis(gram, nu)
    assert len(basis) == (nu + 1) ** 2
    assert all(p.is_spherical(gram) for p in basis)
    assert all(len(p.coeffs) == len(monomials(nu)) for p in basis)


def brute_theta(l, nu, p, N, twist=0):
    A = QuatAlgebra(l)
    O = maximal_order(A)
    P = residue_map(O)
    phi = phi_table(P.field)
    X = enumerate_by_norm(O, l * (N + 1) - 1)
    m = integer_norms(O, X)
    cls = phi.classes[P.images(X)]
    coeff = [F(0)] * (l * (N + 1))
    for x, mi, ci in zip(X, m, cls):
        if ci < 0:
            continue
        w = 2 if ci == twist else -1
        coeff[int(mi)] += w * p(O.element(x))
    return VectorQExp(QExp(F(r, l), tuple(coeff[j * l + r] for j in range(N + 1))) for r in range(1, l))


@pytest.mark.parametrize("l,nu,twist", [(5, 2, 0), (5, 2, 1), (11, 4, 0)])
def test_moment_series_matches_direct_sum(l, nu, twist):
    A = QuatAlgebra(l)
    O = maximal_order(A)
    P = residue_map(O)
    phi = phi_table(P.field)
    N = 3
    table = moment_table(O, P, phi, nu, N)
    for p in spherical_basis(A.gram, nu)[:4]:
        assert table.series(p, twist=twist) == brute_theta(l, nu, p, N, twist)


def test_threads_do_not_change_table():
    A = QuatAlgebra(5)
    O = maximal_order(A)
    P = residue_map(O)
    phi = phi_table(P.field)
    a = moment_table(O, P, phi, 2, 8, threads=1)
    b = moment_table(O, P, phi, 2, 8, threads=3)
    assert a.points == b.points
    assert np.array_equal(a.table, b.table)


def test_normalize_integral():
    k, v = normalize_integral([F(-1, 2), F(3, 4), 0])
    assert k == -4 and v == [2, -3, 0]
    k, q = normalize_integral(QExp(F(1, 3), (F(0), F(2, 3), F(4, 3))))
    assert k == F(3, 2) and list(q.coeffs) == [0, 1, 2]
    with pytest.raises(ZeroSeries):
        normalize_integral([0, 0])


def test_cusp_solve_vanishes_to_delta():
    model = get_model("WG2")
    basis, rank = pipeline.theta_basis(model, 10)
    assert rank == len(basis) == model.dim_table
    coeffs = cusp_solve(basis, model.delta)
    assert all(isinstance(c, int) for c in coeffs)
    theta = linear_combination(basis, coeffs)
    assert t_check(theta)
    for r, comp in enumerate(theta.series, start=1):
        v = comp.valuation()
        assert v is None or comp.offset + v >= model.delta
    with pytest.raises(NoSolution):
        cusp_solve(basis, 5)


def test_corrupt_changes_leading_term():
    theta = pipeline.solve("WG2", 10).theta
    bad = corrupt(theta)
    diff = [(a, b) for ca, cb in zip(theta.series, bad.series) for a, b in zip(ca.coeffs, cb.coeffs) if a != b]
    assert len(diff) == 1 and diff[0][1] == 2 * diff[0][0]
