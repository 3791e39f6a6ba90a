import cmath
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thetachars.arith import Cyclo, QExp, as_fraction, eta_power, fmt_rational, frac_mod1, qexp_mul


def partitions(n):
    p = [1] + [0] * n
    for k in range(1, n + 1):
        for i in range(k, n + 1):
            p[i] += p[i - k]
    return p


def pentagonal(n):
    """Coefficients of prod (1 - q^k) by Euler's pentagonal theorem."""
    c = [0] * (n + 1)
    k = 0
    while True:
        hit = False
        for j in ((k * (3 * k - 1)) // 2, (k * (3 * k + 1)) // 2):
            if j <= n:
                c[j] = (-1) ** k
                hit = True
        if not hit and k > 0:
            break
        k += 1
    return c


def test_fmt_rational():
    assert fmt_rational(F(3, 1)) == "3"
    assert fmt_rational(F(-6, 4)) == "-3/2"
    assert fmt_rational(0) == "0"


def test_frac_mod1():
    assert frac_mod1(F(-1, 3)) == F(2, 3)
    assert frac_mod1(F(7, 3)) == F(1, 3)


def test_as_fraction_rejects_float():
    with pytest.raises(TypeError):
        as_fraction(0.5)


@pytest.mark.parametrize("m", [3, 5, 15, 23])
def test_zeta_order(m):
    z = Cyclo.zeta(m)
    assert z ** m == Cyclo.one(m)
    assert z ** (m - 1) == z.inverse()


@pytest.mark.parametrize("m", [5, 12, 15])
def test_sum_of_roots_vanishes(m):
    total = Cyclo.zero(m)
    for j in range(m):
        total = total + Cyclo.zeta(m, j)
    assert total == Cyclo.zero(m)


def test_cyclo_complex_embedding():
    x = Cyclo.zeta(7, 2) * 3 + Cyclo.rational(7, F(1, 2))
    assert abs(x.to_complex() - (3 * cmath.exp(4j * cmath.pi / 7) + 0.5)) < 1e-12


def test_cyclo_conj_and_embed():
    x = Cyclo.zeta(5, 1) + Cyclo.zeta(5, 4)
    assert x == x.conj()
    assert x.embed(15).to_complex() == pytest.approx(x.to_complex())


@given(st.lists(st.integers(-5, 5), min_size=4, max_size=4), st.lists(st.integers(-5, 5), min_size=4, max_size=4))
def test_cyclo_field_ops(a, b):
    x, y = Cyclo.from_lift(5, a), Cyclo.from_lift(5, b)
    assert (x * y).to_complex() == pytest.approx(x.to_complex() * y.to_complex(), abs=1e-9)
    assert x + y - y == x
    if y:
        assert (x / y) * y == x


def test_eta_power_pentagonal():
    eta = eta_power(1, 60)
    assert eta.offset == F(1, 24)
    assert list(eta.coeffs) == pentagonal(60)


def test_inverse_eta_partitions():
    inv = eta_power(-1, 50)
    assert inv.offset == F(-1, 24)
    assert list(inv.coeffs) == partitions(50)


def test_eta_powers_compose():
    assert eta_power(3, 30) * eta_power(-5, 30) == eta_power(-2, 30)


qexps = st.builds(
    lambda off, cs: QExp(F(off, 6), tuple(F(c) for c in cs)),
    st.integers(-6, 6),
    st.lists(st.integers(-4, 4), min_size=5, max_size=5),
)


@settings(max_examples=50)
@given(qexps, qexps, qexps)
def test_qexp_ring_laws(a, b, c):
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert qexp_mul(a, b) == a * b


@given(st.lists(st.integers(-4, 4), min_size=6, max_size=6))
def test_qexp_inverse(cs):
    cs[0] = 1
    a = QExp(F(1, 3), tuple(F(c) for c in cs))
    one = a * a.inverse()
    assert one.offset == 0
    assert list(one.coeffs) == [1, 0, 0, 0, 0, 0]


def test_qexp_realign_and_coefficient():
    a = QExp(F(1, 2), (F(0), F(0), F(3), F(1)))
    b = a.realign(F(5, 2))
    assert b.coeffs[0] == 3
    assert a.coefficient_at(F(5, 2)) == 3
    assert a.valuation() == 2 and a.leading_exponent() == F(5, 2)
    with pytest.raises(ValueError):
        a.realign(F(1, 3))


def test_qexp_trunc_shrinks():
    a = QExp(F(0), (F(1),) * 10)
    b = QExp(F(0), (F(1),) * 4)
    assert (a * b).trunc == 3
    with pytest.raises(ValueError):
        b.truncate(8)
