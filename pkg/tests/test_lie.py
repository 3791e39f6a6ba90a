import itertools
from fractions import Fraction as F

import numpy as np
import pytest

from thetachars.lie import (MinimalModelParams, build_root_system, composite_central_charge,
                            fkw_central_charge, fkw_character, fkw_characters, fkw_data, km_level1_char,
                            lie_characters, virasoro_char, weyl_dim)
from thetachars.models import ModelNotSupported, get_model

DATA = {"B2": (10, 8, 4, 3), "G2": (14, 12, 6, 4), "F4": (52, 1152, 12, 9)}


@pytest.mark.parametrize("name", DATA)
def test_root_data(name):
    rs = build_root_system(name)
    dim, order, h, hv = DATA[name]
    assert rs.dimension == dim
    assert len(rs.weyl_group) == order
    assert rs.coxeter_number == h and rs.dual_coxeter_number == hv
    assert rs.norm2(rs.highest_root) == 2
    half = tuple(sum(r[k] for r in rs.positive_roots) / 2 for k in range(rs.rank))
    assert half == rs.rho


@pytest.mark.parametrize("name", ["B2", "G2"])
def test_weyl_group_closed_with_determinant_signs(name):
    rs = build_root_system(name)
    W = {w.tobytes() for w in rs.weyl_group}
    for a, b in itertools.product(rs.weyl_group[:6], repeat=2):
        assert (a @ b).tobytes() in W
    for w, eps in zip(rs.weyl_group, rs.weyl_signs):
        assert eps == round(np.linalg.det(w.astype(float)))
        # isometry
        x = rs.rho
        assert rs.norm2(rs.act(w, x)) == rs.norm2(x)


def test_weyl_dim():
    g2 = build_root_system("G2")
    assert weyl_dim(g2, g2.rho) == 1
    assert weyl_dim(g2, tuple(a + b for a, b in zip(g2.rho, g2.level_one_weight()))) == 7
    f4 = build_root_system("F4")
    assert weyl_dim(f4, tuple(a + b for a, b in zip(f4.rho, f4.level_one_weight()))) == 26
    # anti-invariance under reflections
    v = tuple(a + b for a, b in zip(g2.rho, (F(1), F(2))))
    assert weyl_dim(g2, g2.reflect(v, 0)) == -weyl_dim(g2, v)


def test_central_charges():
    assert fkw_central_charge(build_root_system("B2"), 11, 6) == get_model("W24").c
    assert fkw_central_charge(build_root_system("G2"), 17, 12) == get_model("W26").c
    assert composite_central_charge("G2") == get_model("WG2").c
    assert composite_central_charge("F4") == get_model("WF4").c


def test_virasoro_characters():
    assert list(virasoro_char(0, 6).coeffs) == [1, 0, 1, 1, 1, 1, 2]
    assert list(virasoro_char(F(-1, 5), 4).coeffs) == [1, 1, 1, 1, 2]
    with pytest.raises(ValueError):
        virasoro_char(F(1, 2), 4)


@pytest.mark.parametrize("name,dim,h1,d1", [("G2", 14, F(2, 5), 7), ("F4", 52, F(3, 5), 26)])
def test_level_one_km(name, dim, h1, d1):
    c, h, chi = km_level1_char(name, None, 4)
    assert h == 0 and chi.offset == -c / 24
    assert list(chi.coeffs[:2]) == [1, dim]
    rs = build_root_system(name)
    c, h, chi = km_level1_char(name, rs.level_one_weight(), 3)
    assert h == h1 and chi.offset == h1 - c / 24
    assert chi.coeffs[0] == d1


def test_fkw_leading_exponent():
    rs = build_root_system("B2")
    model = get_model("W24")
    chars, picks = fkw_characters(rs, 11, 6, model.H, 10)
    assert set(chars) == set(model.H)
    for h, ch in chars.items():
        assert ch.leading_exponent() == model.h_offset(h)
        assert picks[h].pairs >= 1
        assert all(x.denominator == 1 for x in ch.coeffs)


def test_fkw_vacuum_is_trivial_pair():
    rs = build_root_system("B2")
    mm = MinimalModelParams(rs, 11, 6, (0, 0), (0, 0))
    c, h = fkw_data(mm)
    assert h == 0
    ch = fkw_character(mm, 8)
    assert ch.offset == -c / 24
    # W(2,4): one generator each at weights 2 and 4
    assert list(ch.coeffs[:5]) == [1, 0, 1, 1, 3]


def test_fkw_b2_root_and_coweight_agree():
    rs = build_root_system("B2")
    a = fkw_character(MinimalModelParams(rs, 11, 6, lattice="root"), 12)
    b = fkw_character(MinimalModelParams(rs, 11, 6, lattice="coweight"), 12)
    assert a == b


def test_fkw_g2_lattice_choice_matters():
    rs = build_root_system("G2")
    root = fkw_character(MinimalModelParams(rs, 17, 12, lattice="root"), 12)
    cow = fkw_character(MinimalModelParams(rs, 17, 12, lattice="coweight"), 12)
    assert root.coeffs[12] == 32 and cow.coeffs[12] == 33


def test_params_validation():
    rs = build_root_system("B2")
    with pytest.raises(ValueError):
        MinimalModelParams(rs, 12, 6)


def test_lie_characters_w28_not_supported():
    with pytest.raises(ModelNotSupported):
        lie_characters("W28", 5)

