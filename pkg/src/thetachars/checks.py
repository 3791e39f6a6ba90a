"""Verification suites shared by the CLI and the test-suite."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import pipeline
from .arith import Cyclo, fmt_rational
from .lie import build_root_system, composite_central_charge, fkw_central_charge, km_conformal_weight, \
    lie_characters, weyl_dim
from .models import MODELS, ModelSpec, get_model
from .quaternion import dual_lattice, is_principal, sqrt_minus_l_times
from .rho import Fl2, cubic_character, phi_chi_matrix, rho_matrices
from .theta import (UnstableRank, assign_components, corrupt, numeric_transform_check, vanishing_dimension)
from .weil import gauss_sum, is_proper, milgram_check, weil_operators

PRIMES = (5, 11, 17, 23)
ORACLE_MODELS = ("WG2", "WF4", "W24", "W26")
ORACLE_TERMS = 60
NUMERIC_TERMS = 60
RESIDUAL_MAX = 1e-8
CORRUPTION_MIN = 1e-3


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    expected: str
    actual: str
    passed: bool

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"[{flag}] {self.suite}/{self.name}: expected {self.expected}, got {self.actual}"


def _check(suite, name, expected, actual, passed=None) -> Check:
    if passed is None:
        passed = expected == actual
    return Check(suite, name, str(expected), str(actual), bool(passed))


def _models(models) -> list[ModelSpec]:
    if models is None:
        return list(MODELS.values())
    return [get_model(m) if isinstance(m, str) else m for m in models]


# ---------------------------------------------------------------------------
# algebraic
# ---------------------------------------------------------------------------

def gauss_check(l: int) -> Check:
    g = gauss_sum(Fl2(l).quadratic_module(), 1)
    ok = g == Cyclo.rational(l, -l)
    return _check("algebraic", f"gauss_sum l={l}", -l, fmt_rational(g.rational_value()) if g.is_rational() else g, ok)


def rho_relation_checks(l: int) -> list[Check]:
    R = rho_matrices(l)
    S, T = R.matS, R.matT
    S2 = S @ S
    rels = {
        "S symmetric": S == S.transpose(),
        "S real": S == S.conj(),
        "S^2 = 1": S2.is_identity(),
        f"T^{l} = 1": (T ** l).is_identity(),
        "(ST)^3 = S^2": (S @ T) ** 3 == S2,
    }
    return [_check("algebraic", f"rho l={l} {k}", True, v) for k, v in rels.items()]


def weil_intertwining_checks(l: int = 5) -> list[Check]:
    """Phi_chi o omega(A) = rho(A) o Phi_chi on the l^2-dimensional Weil representation."""
    F = Fl2(l)
    M = F.quadratic_module()
    W = weil_operators(M)
    R = rho_matrices(l)
    m = 3 * l
    out = [_check("algebraic", f"weil l={l} proper", True, is_proper(M))]
    for chi_name, chi in (("chi", cubic_character(F)), ("chi-bar", cubic_character(F).conjugate())):
        P = phi_chi_matrix(F, chi).embed(m)
        for name, op, mat in (("T", W.opT, R.matT), ("S", W.opS, R.matS)):
            ok = (P @ op.embed(m)) == (mat.embed(m) @ P)
            out.append(_check("algebraic", f"weil l={l} {chi_name} intertwines {name} ({len(M)}-dim)", True, ok))
    return out


def lattice_checks(l: int) -> list[Check]:
    O = pipeline.ideal(l, "O")
    Op = pipeline.ideal(l, "Op")
    out = [_check("algebraic", f"det gram(O) l={l}", l * l, O.det_gram)]
    for tag, I in (("O", O), ("Op", Op)):
        dual = dual_lattice(sqrt_minus_l_times(I), I.rednorm * l)
        out.append(_check("algebraic", f"dual of sqrt(-l)I {tag} l={l}", True, dual == I))
        out.append(_check("algebraic", f"milgram {tag} l={l}", True, milgram_check(I, I.rednorm)))
    if l == 17:  # the only level whose theta span needs the second ideal class
        out.append(_check("algebraic", f"Op non-principal l={l}", False, is_principal(Op)))
    return out


def algebraic_suite(primes=PRIMES) -> list[Check]:
    out = []
    for l in primes:
        out.append(gauss_check(l))
        out += rho_relation_checks(l)
        out += lattice_checks(l)
    out += weil_intertwining_checks(5)
    return out


def calibration_suite() -> list[Check]:
    B2, G2, F4 = (build_root_system(n) for n in ("B2", "G2", "F4"))
    s = "calibration"
    out = [
        _check(s, "c(11,6) B2", Fraction(-444, 11), fkw_central_charge(B2, 11, 6)),
        _check(s, "c(17,12) G2", Fraction(-1420, 17), fkw_central_charge(G2, 17, 12)),
        _check(s, "c_vir + c_G2(1)", Fraction(-8, 5), composite_central_charge("G2")),
        _check(s, "c_vir + c_F4(1)", Fraction(4, 5), composite_central_charge("F4")),
    ]
    for rs, h, d in ((G2, Fraction(2, 5), 7), (F4, Fraction(3, 5), 26)):
        lam = rs.level_one_weight()
        out.append(_check(s, f"h_lambda1 {rs.name}", h, km_conformal_weight(rs, lam)))
        mu = tuple(a + b for a, b in zip(rs.rho, lam))
        out.append(_check(s, f"weyl_dim(rho+lambda1) {rs.name}", d, weyl_dim(rs, mu)))
    return out


# ---------------------------------------------------------------------------
# theta side
# ---------------------------------------------------------------------------

def dims_suite(models=None, threads: int = 1) -> list[Check]:
    out = []
    for m in _models(models):
        try:
            _, r = pipeline.theta_basis(m, pipeline.RANK_TERMS, threads)
            actual = r
        except UnstableRank as exc:
            actual = f"unstable ({exc})"
        out.append(_check("dims", f"{m.name} (l={m.l}, k={m.k})", m.dim_table, actual))
    return out


def character_suite(models=None, N: int = 100, threads: int = 1) -> list[Check]:
    s = "characters"
    out = []
    for m in _models(models):
        solved = pipeline.solve(m, N, threads)
        out.append(_check(s, f"{m.name} O(q^{m.delta}) dimension", 1, vanishing_dimension(solved.basis, m.delta)))
        assign = assign_components(m, m.l, m.k)
        out.append(_check(s, f"{m.name} components -> H_c bijection", sorted(m.H), sorted(assign),
                          sorted(assign.values()) == list(range(1, m.l))))
        cs = pipeline.characters(m, N, threads)
        coeffs = [c for ch in cs.characters.values() for c in ch.coeffs[:N + 1]]
        bad_int = sum(c.denominator != 1 for c in coeffs)
        bad_neg = sum(c < 0 for c in coeffs)
        out.append(_check(s, f"{m.name} integral through N={N}", 0, bad_int))
        out.append(_check(s, f"{m.name} non-negative through N={N}", 0, bad_neg))
        leads = sum(ch.leading_exponent() == m.h_offset(h) for h, ch in cs.characters.items())
        out.append(_check(s, f"{m.name} leading exponents h - c/24", len(m.H), leads))
    return out


def proportionality(a, b, N: int) -> Fraction | None:
    """The constant r with b = r * a through N terms, or None."""
    if a.offset != b.offset:
        return None
    ca, cb = a.coeffs[:N + 1], b.coeffs[:N + 1]
    if len(ca) < N + 1 or len(cb) < N + 1:
        raise ValueError("series shorter than the comparison range")
    i = next((j for j, x in enumerate(ca) if x), None)
    if i is None:
        return None
    r = Fraction(cb[i]) / Fraction(ca[i])
    return r if all(r * x == y for x, y in zip(ca, cb)) else None


def oracle_suite(models=ORACLE_MODELS, N: int = ORACLE_TERMS, threads: int = 1) -> list[Check]:
    out = []
    for m in _models(models):
        theta = pipeline.characters(m, N, threads)
        lie = lie_characters(m, N)
        out.append(_check("oracle", f"{m.name} central charge ({lie.source})", m.c, lie.c))
        for h in sorted(m.H):
            r = proportionality(theta.characters[h], lie.characters[h], N) if h in lie.characters else None
            out.append(_check("oracle", f"{m.name} h={fmt_rational(h)} through N={N}", "positive constant",
                              "none" if r is None else fmt_rational(r), r is not None and r > 0))
    return out


def numeric_suite(models=None, N: int = NUMERIC_TERMS, tau0: complex = 1j, threads: int = 1) -> list[Check]:
    out = []
    for m in _models(models):
        t = pipeline.solve(m, N, threads).theta
        rho = pipeline.rho(m.l)
        res = numeric_transform_check(t, rho, tau0, N)
        bad = numeric_transform_check(corrupt(t), rho, tau0, N)
        out.append(_check("numeric", f"{m.name} S residual at tau0={tau0}", f"< {RESIDUAL_MAX:g}", f"{res:.3g}",
                          res < RESIDUAL_MAX))
        out.append(_check("numeric", f"{m.name} corrupted residual", f"> {CORRUPTION_MIN:g}", f"{bad:.3g}",
                          bad > CORRUPTION_MIN))
    return out


SUITES = ("algebraic", "calibration", "dims", "characters", "oracle", "numeric")


def run_suite(name: str, models=None, N: int | None = None, tau0: complex = 1j, threads: int = 1) -> list[Check]:
    if name == "algebraic":
        return algebraic_suite()
    if name == "calibration":
        return calibration_suite()
    if name == "dims":
        return dims_suite(models, threads)
    if name == "characters":
        return character_suite(models, N or 100, threads)
    if name == "oracle":
        if models is not None:
            models = [m for m in _models(models) if m.lie is not None]
        return oracle_suite(models or ORACLE_MODELS, N or ORACLE_TERMS, threads)
    if name == "numeric":
        return numeric_suite(models, N or NUMERIC_TERMS, tau0, threads)
    raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")

