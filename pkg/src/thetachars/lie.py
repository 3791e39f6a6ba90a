"""Lie-theoretic character formulas used as independent oracles.

Vectors live in simple-root coordinates; the inner product is given by the Gram
matrix of the simple roots with long roots of squared length 2.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Sequence

import numpy as np

from .arith import QExp, as_fraction, eta_power
from .linalg import inverse, iter_ellipsoid
from .models import ModelNotSupported, get_model
from .theta import CharacterSet, normalize_integral

F = Fraction


class TruncationUnstable(ArithmeticError):
    """Enlarging the lattice-sum bound changed a reported coefficient."""


GRAMS = {
    "B2": [[2, -1], [-1, 1]],
    "G2": [[F(2, 3), -1], [-1, 2]],
    "F4": [[2, -1, 0, 0], [-1, 2, -1, 0], [0, -1, 1, F(-1, 2)], [0, 0, F(-1, 2), 1]],
}


def _vec(x) -> tuple:
    return tuple(as_fraction(t) for t in x)


class RootSystem:
    def __init__(self, name: str):
        if name not in GRAMS:
            raise ValueError(f"unsupported root system {name!r}")
        self.name = name
        self.gram = [[as_fraction(x) for x in row] for row in GRAMS[name]]
        self.rank = len(self.gram)
        n = self.rank
        self.cartan = [[int(2 * self.gram[i][j] / self.gram[j][j]) for j in range(n)] for i in range(n)]
        self.positive_roots = self._positive_roots()
        self.dimension = n + 2 * len(self.positive_roots)
        ginv = inverse(self.gram)
        # (omega_i, alpha_j) = delta_ij |alpha_i|^2/2 and (omega-check_i, alpha_j) = delta_ij
        self.fundamental_weights = [tuple(self.gram[i][i] / 2 * ginv[i][k] for k in range(n)) for i in range(n)]
        self.fundamental_coweights = [tuple(ginv[i][k] for k in range(n)) for i in range(n)]
        self.simple_coroots = [tuple(F(2) / self.gram[i][i] * (i == k) for k in range(n)) for i in range(n)]
        self.rho = tuple(sum(w[k] for w in self.fundamental_weights) for k in range(n))
        self.rho_check = tuple(sum(w[k] for w in self.fundamental_coweights) for k in range(n))
        self.highest_root = max(self.positive_roots, key=sum)

    def __repr__(self):
        return f"RootSystem({self.name})"

    def ip(self, x, y) -> Fraction:
        g = self.gram
        return sum((as_fraction(x[i]) * g[i][j] * as_fraction(y[j])
                    for i in range(self.rank) for j in range(self.rank) if x[i] and y[j]), F(0))

    def norm2(self, x) -> Fraction:
        return self.ip(x, x)

    def reflect(self, x, i: int) -> tuple:
        c = 2 * self.ip(x, [int(k == i) for k in range(self.rank)]) / self.gram[i][i]
        return tuple(as_fraction(x[k]) - (c if k == i else 0) for k in range(self.rank))

    def _positive_roots(self) -> list[tuple]:
        n = self.rank
        simple = [tuple(F(int(i == k)) for k in range(n)) for i in range(n)]
        seen = set(simple)
        frontier = list(simple)
        while frontier:
            nxt = []
            for r in frontier:
                for i in range(n):
                    s = self.reflect(r, i)
                    if all(t >= 0 for t in s) and s not in seen:
                        seen.add(s)
                        nxt.append(s)
            frontier = nxt
        return sorted(seen, key=lambda r: (sum(r), r))

    @property
    def coxeter_number(self) -> int:
        return int(sum(self.highest_root)) + 1

    @property
    def dual_coxeter_number(self) -> int:
        psi = self.highest_root
        return 1 + int(sum(psi[i] * self.gram[i][i] / 2 for i in range(self.rank)))

    @cached_property
    def weyl_group(self) -> list[np.ndarray]:
        """All elements as integer matrices acting on root coordinates (column vectors)."""
        n = self.rank
        gens = []
        for i in range(n):
            m = np.eye(n, dtype=np.int64)
            m[i, :] -= np.array([self.cartan[j][i] for j in range(n)], dtype=np.int64)
            gens.append(m)
        ident = np.eye(n, dtype=np.int64)
        seen = {ident.tobytes(): ident}
        frontier = [ident]
        while frontier:
            nxt = []
            for w in frontier:
                for g in gens:
                    x = g @ w
                    key = x.tobytes()
                    if key not in seen:
                        seen[key] = x
                        nxt.append(x)
            frontier = nxt
        return list(seen.values())

    @cached_property
    def weyl_signs(self) -> list[int]:
        return [int(round(np.linalg.det(w))) for w in self.weyl_group]

    def act(self, w: np.ndarray, x) -> tuple:
        x = [as_fraction(t) for t in x]
        return tuple(sum((int(w[i, j]) * x[j] for j in range(self.rank)), F(0)) for i in range(self.rank))

    def lattice_basis(self, kind: str) -> list[tuple]:
        if kind == "coweight":
            return self.fundamental_coweights
        if kind == "coroot":
            return self.simple_coroots
        if kind == "weight":
            return self.fundamental_weights
        if kind == "root":
            return [tuple(F(int(i == k)) for k in range(self.rank)) for i in range(self.rank)]
        raise ValueError(kind)

    def weight(self, coeffs: Sequence[int], kind: str = "weight") -> tuple:
        basis = self.lattice_basis(kind)
        return tuple(sum((c * b[k] for c, b in zip(coeffs, basis)), F(0)) for k in range(self.rank))

    def level_one_weight(self) -> tuple:
        """The fundamental weight omega with (omega, psi) = 1 (unique for G2, F4)."""
        ws = [w for w in self.fundamental_weights if self.ip(w, self.highest_root) == 1]
        if len(ws) != 1:
            raise ValueError(f"{self.name} has {len(ws)} level-one fundamental weights")
        return ws[0]


@lru_cache(maxsize=None)
def build_root_system(name: str) -> RootSystem:
    return RootSystem(name)


def weyl_dim(rs: RootSystem, mu) -> Fraction:
    """Weyl dimension polynomial prod_{alpha > 0} (mu, alpha)/(rho, alpha)."""
    out = F(1)
    for a in rs.positive_roots:
        out *= rs.ip(mu, a) / rs.ip(rs.rho, a)
    return out


# ---------------------------------------------------------------------------
# FKW minimal models
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MinimalModelParams:
    rs: RootSystem
    p: int
    q: int
    lam: tuple = ()
    nu_check: tuple = ()
    lattice: str = "root"  # translation lattice of the t-sum

    def __post_init__(self):
        if math.gcd(self.p, self.q) != 1:
            raise ValueError("p and q must be coprime")
        if self.p < self.rs.dual_coxeter_number or self.q < self.rs.coxeter_number:
            raise ValueError("need h-check <= p and h <= q")
        n = self.rs.rank
        if not self.lam:
            object.__setattr__(self, "lam", (F(0),) * n)
        if not self.nu_check:
            object.__setattr__(self, "nu_check", (F(0),) * n)
        object.__setattr__(self, "lam", _vec(self.lam))
        object.__setattr__(self, "nu_check", _vec(self.nu_check))


def fkw_central_charge(rs: RootSystem, p: int, q: int) -> Fraction:
    v = tuple(q * a - p * b for a, b in zip(rs.rho, rs.rho_check))
    return rs.rank - F(12, p * q) * rs.norm2(v)


def fkw_data(mm: MinimalModelParams) -> tuple[Fraction, Fraction]:
    rs, p, q = mm.rs, mm.p, mm.q
    base = tuple(q * a - p * b for a, b in zip(rs.rho, rs.rho_check))
    shifted = tuple(q * (r + l) - p * (rc + n) for r, l, rc, n in zip(rs.rho, mm.lam, rs.rho_check, mm.nu_check))
    h = (rs.norm2(shifted) - rs.norm2(base)) / (2 * p * q)
    return fkw_central_charge(rs, p, q), h


def _ellipsoid_terms(rs: RootSystem, basis, a, s: Fraction, bound: Fraction):
    """Vectors v = a + s*t (t over the lattice with the given basis) with |v|^2 <= bound."""
    n = rs.rank
    G = [[rs.ip(bi, bj) for bj in basis] for bi in basis]
    Binv = inverse([list(b) for b in basis])
    # a = s * (c . basis) => c = a Binv / s
    c = [sum((as_fraction(a[k]) * Binv[k][j] for k in range(n)), F(0)) / s for j in range(n)]
    center = [-x for x in c]
    for block in iter_ellipsoid(G, bound / (s * s), center=center):
        for t in block.tolist():
            yield tuple(as_fraction(a[k]) + s * sum((t[j] * basis[j][k] for j in range(n)), F(0))
                        for k in range(n))


def fkw_terms(mm: MinimalModelParams, emax: Fraction) -> dict:
    """{exponent: coefficient} of the W x lattice sum, before division by eta^rank."""
    rs, p, q = mm.rs, mm.p, mm.q
    basis = rs.lattice_basis(mm.lattice)
    lr = tuple(a + b for a, b in zip(mm.lam, rs.rho))
    nr = tuple(a + b for a, b in zip(mm.nu_check, rs.rho_check))
    out: dict = {}
    for w, eps in zip(rs.weyl_group, rs.weyl_signs):
        wl = rs.act(w, lr)
        a = tuple(q * x - p * y for x, y in zip(wl, nr))
        for v in _ellipsoid_terms(rs, basis, a, F(p * q), 2 * p * q * emax):
            e = rs.norm2(v) / (2 * p * q)
            out[e] = out.get(e, 0) + eps
    return {e: c for e, c in out.items() if c}


def _terms_to_qexp(terms: dict, lead, N: int) -> QExp:
    lead = as_fraction(lead)
    coeffs = [0] * (N + 1)
    for e, c in terms.items():
        d = e - lead
        if d < 0 or d.denominator != 1:
            raise ArithmeticError(f"term q^{e} is off the grid q^({lead} + n)")
        if d <= N:
            coeffs[int(d)] += c
    return QExp(lead, tuple(F(x) for x in coeffs))


def fkw_character(mm: MinimalModelParams, N: int, check: bool = True) -> QExp:
    """eta^-rank * sum_w sum_t eps(w) q^(|q w(lam+rho) - p(nu+rho-check) + pq t|^2 / 2pq).

    The expansion starts at the smallest exponent present, which is h - c/24
    when (lam, nu-check) is a reduced pair; otherwise it may start lower.
    """
    rs = mm.rs
    c, h = fkw_data(mm)
    lead = h - c / 24 + F(rs.rank, 24)
    terms = fkw_terms(mm, lead + N)
    if not terms:
        return QExp(h - c / 24, (F(0),) * (N + 1))
    start = min(terms)
    series = _terms_to_qexp(terms, start, N)
    if check:
        wider = fkw_terms(mm, lead + N + 1)
        if _terms_to_qexp(wider, start, N) != series:
            raise TruncationUnstable("FKW lattice sum changed under a larger bound")
    return series * eta_power(-rs.rank, N)


def fkw_pairs(rs: RootSystem, p: int, q: int, H, box: int | None = None) -> dict:
    """h -> [(lam, nu-check)] for dominant pairs with coefficients below ``box`` and h in H.

    Pairs are given by their coefficients on fundamental weights and coweights.
    """
    H = set(as_fraction(h) for h in H)
    box = box or max(p, q)
    n = rs.rank
    base = rs.norm2(tuple(q * a - p * b for a, b in zip(rs.rho, rs.rho_check)))
    lams = {a: tuple(q * x for x in rs.weight(a, "weight")) for a in itertools.product(range(box), repeat=n)}
    nus = {b: tuple(p * x for x in rs.weight(b, "coweight")) for b in itertools.product(range(box), repeat=n)}
    v0 = tuple(q * a - p * b for a, b in zip(rs.rho, rs.rho_check))
    out: dict = {}
    for a, ql in lams.items():
        for b, pn in nus.items():
            v = tuple(x + y - z for x, y, z in zip(v0, ql, pn))
            h = (rs.norm2(v) - base) / (2 * p * q)
            if h in H:
                out.setdefault(h, []).append((a, b))
    return out


@dataclass(frozen=True)
class FKWSelection:
    h: Fraction
    pair: tuple  # (lam coefficients, nu-check coefficients)
    pairs: int  # pairs at this h whose series starts at h - c/24


def fkw_characters(rs: RootSystem, p: int, q: int, H, N: int, lattice: str = "root",
                   probe: int = 8) -> tuple[dict, dict]:
    """One character per h in H from the pairs found by ``fkw_pairs``.

    A pair counts only if its series is nonzero and starts at h - c/24. All counted
    pairs for one h must agree on ``probe`` coefficients up to a constant; otherwise
    the choice is ambiguous and LookupError is raised.
    Returns (h -> QExp, h -> FKWSelection).
    """
    c = fkw_central_charge(rs, p, q)
    pairs = fkw_pairs(rs, p, q, H)
    chars, picks = {}, {}
    for h in sorted(set(as_fraction(x) for x in H)):
        found: dict = {}
        count = 0
        for a, b in sorted(pairs.get(h, ()), key=lambda ab: (sum(ab[0]) + sum(ab[1]), ab)):
            mm = MinimalModelParams(rs, p, q, rs.weight(a), rs.weight(b, "coweight"), lattice)
            ch = fkw_character(mm, probe, check=False)
            if ch.leading_exponent() != h - c / 24:
                continue
            count += 1
            found.setdefault(normalize_integral(ch)[1], (a, b))
        if not found:
            raise LookupError(f"no pair yields a character at h={h}")
        if len(found) > 1:
            raise LookupError(f"{len(found)} distinct characters share h={h}")
        a, b = next(iter(found.values()))
        mm = MinimalModelParams(rs, p, q, rs.weight(a), rs.weight(b, "coweight"), lattice)
        chars[h] = fkw_character(mm, N)
        picks[h] = FKWSelection(h, (a, b), count)
    return chars, picks


# ---------------------------------------------------------------------------
# Virasoro c = -22/5 and level-one Kac-Moody characters
# ---------------------------------------------------------------------------

def _product_inverse(residues: set, mod: int, N: int) -> list[int]:
    c = [0] * (N + 1)
    c[0] = 1
    for n in range(1, N + 1):
        if n % mod in residues:
            for i in range(n, N + 1):
                c[i] += c[i - n]
    return c


def virasoro_char(h, N: int) -> QExp:
    h = as_fraction(h)
    if h == 0:
        return QExp(F(11, 60), tuple(_product_inverse({2, 3}, 5, N)))
    if h == F(-1, 5):
        return QExp(F(-1, 60), tuple(_product_inverse({1, 4}, 5, N)))
    raise ValueError("the c = -22/5 model has h in {0, -1/5}")


VIRASORO_C = F(-22, 5)


def km_central_charge(rs: RootSystem, k: int = 1) -> Fraction:
    hv = rs.dual_coxeter_number
    return F(12 * k, hv * (hv + k)) * rs.norm2(rs.rho)


def km_conformal_weight(rs: RootSystem, lam, k: int = 1) -> Fraction:
    hv = rs.dual_coxeter_number
    lr = tuple(a + b for a, b in zip(rs.rho, lam))
    return (rs.norm2(lr) - rs.norm2(rs.rho)) / (2 * (hv + k))


def _km_terms(rs: RootSystem, lam, k: int, emax: Fraction) -> dict:
    hv = rs.dual_coxeter_number
    s = F(hv + k)
    a = tuple(x + y for x, y in zip(rs.rho, lam))
    rho2 = rs.norm2(rs.rho)
    out: dict = {}
    bound = 2 * s * emax + rho2
    for v in _ellipsoid_terms(rs, rs.lattice_basis("coweight"), a, s, bound):
        d = weyl_dim(rs, v)
        if d:
            e = (rs.norm2(v) - rho2) / (2 * s)
            out[e] = out.get(e, 0) + d
    return {e: c for e, c in out.items() if c}


def km_level1_char(name: str, lam=None, N: int = 100, check: bool = True) -> tuple[Fraction, Fraction, QExp]:
    """(c, h, chi) for the level-one Kac-Moody model; lam is 0 or the level-one weight."""
    rs = build_root_system(name)
    if lam is None or lam == 0:
        lam = (F(0),) * rs.rank
    lam = _vec(lam)
    if rs.ip(lam, rs.highest_root) > 1:
        raise ValueError("level-one weights need (lam, psi) <= 1")
    c = km_central_charge(rs, 1)
    h = km_conformal_weight(rs, lam, 1)
    terms = _km_terms(rs, lam, 1, h + N)
    series = _terms_to_qexp(terms, h, N)
    if check:
        if _terms_to_qexp(_km_terms(rs, lam, 1, h + N + 1), h, N) != series:
            raise TruncationUnstable("Kac-Moody lattice sum changed under a larger bound")
    # eta^-n q^((n - c)/24): the net leading exponent is h - c/24
    n = rs.dimension
    chi = series * eta_power(-n, N)
    return c, h, chi.shift(F(n, 24) - c / 24)


def composite_chars(name: str, N: int):
    """Characters chi^Vir_a * chi^K_b labelled by h = a + b (h in {0, -1/5, h1, h1 - 1/5})."""
    rs = build_root_system(name)
    _, _, k0 = km_level1_char(name, None, N)
    _, h1, k1 = km_level1_char(name, rs.level_one_weight(), N)
    v0, v1 = virasoro_char(0, N), virasoro_char(F(-1, 5), N)
    chars = {F(0): v0 * k0, F(-1, 5): v1 * k0, h1: v0 * k1, h1 - F(1, 5): v1 * k1}
    return CharacterSet(f"composite:{name}", chars, F(1))


def composite_central_charge(name: str) -> Fraction:
    return VIRASORO_C + km_central_charge(build_root_system(name), 1)


E7_REASON = ("the only Lie-side formula for W28 runs over the E7 Weyl group (order 2903040) "
             "and a rank-7 lattice, which is impractical for explicit expansion")


@dataclass(frozen=True)
class LieCharacters:
    c: Fraction
    characters: dict  # h -> QExp
    source: str


def lie_characters(model, N: int) -> LieCharacters:
    """Lie-side characters of a catalog model, computed without the theta pipeline."""
    model = get_model(model) if isinstance(model, str) else model
    if model.lie is None:
        raise ModelNotSupported(f"{model.name}: {E7_REASON}")
    kind, name, *pq = model.lie.split(":")
    if kind == "composite":
        return LieCharacters(composite_central_charge(name), composite_chars(name, N).characters, model.lie)
    if kind == "fkw":
        p, q = map(int, pq)
        rs = build_root_system(name)
        chars, _ = fkw_characters(rs, p, q, model.H, N)
        return LieCharacters(fkw_central_charge(rs, p, q), chars, model.lie)
    raise ValueError(f"unknown Lie-side recipe {model.lie!r}")
