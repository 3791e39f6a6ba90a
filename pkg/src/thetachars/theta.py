"""Vector-valued theta series over quaternion ideals and the characters they carry.

A theta series for the ideal I, the residue map pi and a spherical polynomial p
has r-th component

    sum over c in I with n(c)/n(I) = r (mod l) of Phi_r(pi(c)) p(c) q^(n(c)/(n(I) l)).

All series for one (I, degree) pair come from a single "moment table"
S[m, e] = sum_{n(c)/n(I) = m} Phi(pi(c)) x(c)^e, where x(c) are the coordinates
of c in an LLL-reduced basis of I and e runs over the degree-nu monomials.
A polynomial p then gives its series as one matrix-vector product.
"""
from __future__ import annotations

import cmath
import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from .arith import QExp, VectorQExp, as_fraction, eta_power, frac_mod1, lcm
from .linalg import (Echelon, ellipsoid_outer_range, inverse, iter_ellipsoid, nullspace,
                     primitive_integer)
from .quaternion import IdealLattice, ResidueMap, reduction
from .rho import PhiTable, RhoRep


class UnstableRank(ArithmeticError):
    """The rank of a theta family changed between two truncation orders."""


class NoSolution(ArithmeticError):
    """No nonzero combination vanishes to the requested order."""


class SolutionSpaceTooBig(ArithmeticError):
    """More than one independent combination vanishes to the requested order."""


class ZeroSeries(ValueError):
    """A series with no nonzero coefficient cannot be normalized."""


class IndexMismatch(ValueError):
    """Theta components do not match the conformal dimensions of the model."""


# ---------------------------------------------------------------------------
# spherical polynomials
# ---------------------------------------------------------------------------

def monomials(nu: int, n: int = 4) -> list[tuple[int, ...]]:
    """Exponent vectors of degree nu in n variables, lexicographically descending."""
    out = []
    for combo in itertools.combinations_with_replacement(range(n), nu):
        e = [0] * n
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return out


@dataclass(frozen=True)
class SphericalPoly:
    degree: int
    coeffs: tuple  # aligned with monomials(degree)

    @property
    def terms(self) -> dict:
        return {e: c for e, c in zip(monomials(self.degree), self.coeffs) if c}

    def __call__(self, x) -> Fraction:
        x = [as_fraction(t) for t in x]
        total = Fraction(0)
        for e, c in self.terms.items():
            t = Fraction(c)
            for xi, k in zip(x, e):
                if k:
                    t *= xi ** k
            total += t
        return total

    def laplacian(self, gram) -> dict:
        """sum_jk (G^-1)_jk d_j d_k p, as a monomial dictionary."""
        Ginv = inverse(gram)
        out: dict = {}
        for e, c in self.terms.items():
            for j in range(4):
                for k in range(4):
                    g = Ginv[j][k]
                    if not g:
                        continue
                    f = list(e)
                    coef = Fraction(c) * g
                    coef *= f[j]
                    f[j] -= 1
                    if f[j] < 0:
                        continue
                    coef *= f[k]
                    f[k] -= 1
                    if f[k] < 0 or not coef:
                        continue
                    key = tuple(f)
                    out[key] = out.get(key, Fraction(0)) + coef
        return {e: v for e, v in out.items() if v}

    def is_spherical(self, gram) -> bool:
        return not self.laplacian(gram)


def _laplacian_matrix(gram, nu: int) -> list[list[Fraction]]:
    Ginv = inverse(gram)
    src = monomials(nu)
    dst = {e: i for i, e in enumerate(monomials(nu - 2))}
    M = [[Fraction(0)] * len(src) for _ in dst]
    for col, e in enumerate(src):
        for j in range(4):
            for k in range(4):
                g = Ginv[j][k]
                if not g:
                    continue
                f = list(e)
                coef = g * f[j]
                f[j] -= 1
                if f[j] < 0:
                    continue
                coef *= f[k]
                f[k] -= 1
                if f[k] < 0 or not coef:
                    continue
                M[dst[tuple(f)]][col] += coef
    return M


def spherical_basis(gram, nu: int) -> list[SphericalPoly]:
    """Q-basis of the homogeneous degree-nu polynomials killed by grad G^-1 grad'."""
    n = len(monomials(nu))
    if nu < 2:
        return [SphericalPoly(nu, tuple(int(i == j) for j in range(n))) for i in range(n)]
    basis = nullspace(_laplacian_matrix(gram, nu), n)
    return [SphericalPoly(nu, tuple(primitive_integer(v))) for v in basis]


# ---------------------------------------------------------------------------
# moment tables
# ---------------------------------------------------------------------------

_INT64_SAFE = 2 ** 62
_CHUNK = 1 << 15


def _half_mask(X: np.ndarray) -> np.ndarray:
    """Points whose last nonzero coordinate (scanning from the end) is positive."""
    keep = np.zeros(len(X), dtype=bool)
    undecided = np.ones(len(X), dtype=bool)
    for j in range(X.shape[1] - 1, -1, -1):
        col = X[:, j]
        keep |= undecided & (col > 0)
        undecided &= col == 0
    return keep


def _monomial_values(X: np.ndarray, nu: int, dtype) -> np.ndarray:
    """Matrix (points x monomials(nu)) of x^e, built degree by degree."""
    Xd = X.astype(dtype)
    vals = {(0, 0, 0, 0): np.ones(len(X), dtype=dtype)}
    for d in range(1, nu + 1):
        nxt = {}
        for e in monomials(d):
            i = next(k for k in range(4) if e[k])
            parent = list(e)
            parent[i] -= 1
            nxt[e] = vals[tuple(parent)] * Xd[:, i]
        vals = nxt
    mons = monomials(nu)
    return np.stack([vals[e] for e in mons], axis=1) if mons else np.ones((len(X), 1), dtype=dtype)


@dataclass
class MomentTable:
    """S[m, e] for m = 0..mmax, with reduced-basis substitution data."""

    ideal: IdealLattice
    rmap: ResidueMap
    nu: int
    N: int
    table: np.ndarray  # (l*(N+1)) x len(monomials(nu)), int64 or object
    points: int

    @property
    def l(self) -> int:
        return self.ideal.algebra.l

    @cached_property
    def substitution(self) -> tuple[np.ndarray, int]:
        """(M, D): p(x Bred) = (p @ M)(x) / D for V-coordinate polynomials p."""
        red = reduction(self.ideal)
        B = self.ideal.basis
        U = red.U.tolist()
        Bred = [[sum((U[i][a] * B[a][k] for a in range(4)), Fraction(0)) for k in range(4)] for i in range(4)]
        den = lcm(*(x.denominator for row in Bred for x in row))
        L = [[int(Bred[i][k] * den) for i in range(4)] for k in range(4)]  # xi_k = sum_i L[k][i] x_i / den
        mons = monomials(self.nu)
        index = {e: j for j, e in enumerate(mons)}
        powers = []
        for k in range(4):
            pw = [{(0, 0, 0, 0): 1}]
            for _ in range(self.nu):
                pw.append(_poly_mul(pw[-1], {tuple(int(i == j) for j in range(4)): L[k][i] for i in range(4)
                                             if L[k][i]}))
            powers.append(pw)
        M = np.zeros((len(mons), len(mons)), dtype=object)
        M[:] = 0
        for row, e in enumerate(mons):
            prod = powers[0][e[0]]
            for k in range(1, 4):
                prod = _poly_mul(prod, powers[k][e[k]])
            for f, c in prod.items():
                M[row, index[f]] = c
        return M, den ** self.nu

    def reduced_poly(self, p: SphericalPoly) -> tuple[np.ndarray, int]:
        M, D = self.substitution
        vec = np.array([int(c) for c in p.coeffs], dtype=object)
        if any(Fraction(c).denominator != 1 for c in p.coeffs):
            raise ValueError("spherical polynomials are expected with integer coefficients")
        return vec.dot(M), D

    def raw_values(self, p: SphericalPoly, N: int | None = None, twist: int = 0) -> np.ndarray:
        """Integers (D/2) * (coefficient of q^(m/l)) for m = 0..l(N+1)-1.

        ``twist`` a means the residue map is divided by some mu with chi(mu) = zeta_3^a,
        i.e. the series for a different admissible choice of c0.
        """
        N = self.N if N is None else N
        if N > self.N:
            raise ValueError(f"moment table only valid through N={self.N}")
        vec, _ = self.reduced_poly(p)
        n = self.l * (N + 1)
        t = [self.table[(e + twist) % 3::3][:n].astype(object).dot(vec) for e in range(3)]
        return 2 * t[0] - t[1] - t[2]

    def series(self, p: SphericalPoly, N: int | None = None, twist: int = 0) -> VectorQExp:
        N = self.N if N is None else N
        l = self.l
        _, D = self.reduced_poly(p)
        raw = self.raw_values(p, N, twist)
        scale = Fraction(2, D)  # two points c, -c per stored point
        comps = []
        for r in range(1, l):
            comps.append(QExp(Fraction(r, l), tuple(Fraction(int(raw[j * l + r])) * scale for j in range(N + 1))))
        return VectorQExp(comps)


def _poly_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = (ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2], ea[3] + eb[3])
            out[e] = out.get(e, 0) + ca * cb
    return {e: c for e, c in out.items() if c}


def _partition_moments(I, rmap, phi, nu, mmax, gint, Pred, outer, lat_form):
    l = I.algebra.l
    nmon = len(monomials(nu))
    acc = np.zeros((3 * (mmax + 1), nmon), dtype=np.int64)
    bound = np.zeros(3 * (mmax + 1))
    use_object = False
    count = 0
    buf: list = []
    buffered = 0

    def flush():
        nonlocal acc, use_object, count, buf, buffered
        X = np.concatenate(buf)
        buf, buffered = [], 0
        X = X[_half_mask(X)]
        if not len(X):
            return
        m = np.einsum("ij,jk,ik->i", X, gint, X) // 2
        img = (X @ Pred.T) % l
        idx = img[:, 0] * l + img[:, 1]
        if np.any(phi.index[idx] != m % l):
            raise ArithmeticError("residue norms disagree with lattice norms")
        live = phi.index[idx] != 0
        X, m, idx = X[live], m[live], idx[live]
        count += len(X)
        if not len(X):
            return
        key = 3 * m + phi.classes[idx]
        order = np.argsort(key, kind="stable")
        X, key = X[order], key[order]
        starts = np.flatnonzero(np.r_[True, key[1:] != key[:-1]])
        ks = key[starts]
        # crude magnitude bound per row: sum of max|x|^nu
        per = np.abs(X).max(axis=1).astype(float) ** nu
        bound[ks] += np.add.reduceat(per, starts)
        if not use_object and bound.max() >= _INT64_SAFE:
            use_object = True
            acc = acc.astype(object)
        V = _monomial_values(X, nu, object if use_object else np.int64)
        acc[ks] += np.add.reduceat(V, starts, axis=0)

    for block in iter_ellipsoid(lat_form, Fraction(mmax) * I.rednorm, outer=outer):
        buf.append(block)
        buffered += len(block)
        if buffered >= _CHUNK:
            flush()
    if buf:
        flush()
    return acc, count


def moment_table(I: IdealLattice, rmap: ResidueMap, phi: PhiTable, nu: int, N: int,
                 threads: int = 1) -> MomentTable:
    """Moments for all c in I with n(c)/n(I) < l(N+1), split into independent partitions."""
    if phi.classes is None:
        raise ValueError("phi table carries no character classes")
    l = I.algebra.l
    red = reduction(I)
    mmax = l * (N + 1) - 1
    n_I = I.rednorm
    gint_f = [[2 * a / n_I for a in row] for row in red.form]
    if any(x.denominator != 1 for row in gint_f for x in row):
        raise ArithmeticError("norm form is not integral on the ideal")
    gint = np.array([[int(x) for x in row] for row in gint_f], dtype=np.int64)
    Pred = (rmap.matrix @ red.U.T) % l
    lo, hi = ellipsoid_outer_range(red.form, Fraction(mmax) * n_I)
    lo = max(lo, 0)  # c and -c: the half-space filter keeps one of each pair
    parts = max(1, int(threads))
    edges = np.linspace(lo, hi + 1, parts + 1).round().astype(int)
    ranges = [(int(a), int(b) - 1) for a, b in zip(edges[:-1], edges[1:]) if b - 1 >= a]
    args = [(I, rmap, phi, nu, mmax, gint, Pred, rg, red.form) for rg in ranges]
    if parts == 1:
        results = [_partition_moments(*a) for a in args]
    else:
        with ThreadPoolExecutor(max_workers=parts) as ex:
            results = list(ex.map(lambda a: _partition_moments(*a), args))
    table = None
    total = 0
    for acc, cnt in results:
        total += cnt
        if table is None:
            table = acc
        else:
            if table.dtype != acc.dtype:
                table, acc = table.astype(object), acc.astype(object)
            table = table + acc
    return MomentTable(I, rmap, nu, N, table, total)


# ---------------------------------------------------------------------------
# theta series
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ThetaSeries:
    ideal: IdealLattice
    poly: SphericalPoly | None
    series: VectorQExp
    weight: int
    twist: int = 0

    @property
    def l(self) -> int:
        return self.series.l

    @property
    def trunc(self) -> int:
        return self.series.trunc

    def flat(self, N: int | None = None) -> list[Fraction]:
        N = self.trunc if N is None else N
        return [c[j] for c in self.series for j in range(N + 1)]


def theta_series(I: IdealLattice, P: ResidueMap, phi: PhiTable, p: SphericalPoly, N: int,
                 threads: int = 1, twist: int = 0) -> ThetaSeries:
    table = moment_table(I, P, phi, p.degree, N, threads)
    return ThetaSeries(I, p, table.series(p, twist=twist), 2 + p.degree, twist)


def linear_combination(thetas: Sequence[ThetaSeries], coeffs: Sequence) -> ThetaSeries:
    coeffs = [as_fraction(c) for c in coeffs]
    l = thetas[0].l
    N = min(t.trunc for t in thetas)
    comps = []
    for r in range(1, l):
        vals = [Fraction(0)] * (N + 1)
        for t, a in zip(thetas, coeffs):
            if a:
                comp = t.series.component(r)
                for j in range(N + 1):
                    vals[j] += a * comp[j]
        comps.append(QExp(Fraction(r, l), tuple(vals)))
    return ThetaSeries(thetas[0].ideal, None, VectorQExp(comps), thetas[0].weight)


def _integer_rows(thetas: Sequence[ThetaSeries], N: int) -> list[list[int]]:
    rows = []
    for t in thetas:
        flat = t.flat(N)
        d = lcm(*(x.denominator for x in flat))
        rows.append([int(x * d) for x in flat])
    return rows


def independent_subset(thetas: Sequence[ThetaSeries], N: int) -> list[int]:
    ech = Echelon()
    for i, row in enumerate(_integer_rows(thetas, N)):
        ech.add(row, tag=i)
    return ech.accepted


def span_rank(thetas: Sequence[ThetaSeries], N: int, step: int = 10) -> int:
    """Rank of the stacked coefficients through N, required to agree with N + step."""
    if any(t.trunc < N + step for t in thetas):
        raise ValueError(f"series must be valid through {N + step}")
    r1 = len(independent_subset(thetas, N))
    r2 = len(independent_subset(thetas, N + step))
    if r1 != r2:
        raise UnstableRank(f"rank {r1} at N={N} but {r2} at N={N + step}")
    return r1


def vanishing_conditions(thetas: Sequence[ThetaSeries], delta) -> list[list[Fraction]]:
    """One row per (r, j) with exponent j + r/l < delta; columns are the thetas."""
    delta = as_fraction(delta)
    l = thetas[0].l
    rows = []
    for r in range(1, l):
        j = 0
        while Fraction(r, l) + j < delta:
            if any(t.series.component(r).trunc < j for t in thetas):
                raise ValueError("series too short for the vanishing conditions")
            rows.append([t.series.component(r)[j] for t in thetas])
            j += 1
    return rows


def cusp_solve(thetas: Sequence[ThetaSeries], delta) -> list[int]:
    """The unique (up to scaling) combination of the thetas that is O(q^delta)."""
    rows = vanishing_conditions(thetas, delta)
    sol = nullspace(rows, len(thetas))
    if not sol:
        raise NoSolution(f"no combination vanishes below q^{delta}")
    if len(sol) > 1:
        raise SolutionSpaceTooBig(f"{len(sol)}-dimensional space vanishes below q^{delta}")
    return primitive_integer(sol[0])


def vanishing_dimension(thetas: Sequence[ThetaSeries], delta) -> int:
    return len(nullspace(vanishing_conditions(thetas, delta), len(thetas)))


def normalize_integral(series) -> tuple[Fraction, object]:
    """(kappa, kappa * series) with coprime integer coefficients and positive leading term.

    Accepts a QExp, a VectorQExp, a ThetaSeries or a plain sequence of rationals.
    The leading term of a vector is the one of smallest exponent (ties: smallest r).
    """
    if isinstance(series, ThetaSeries):
        kappa, vec = normalize_integral(series.series)
        return kappa, ThetaSeries(series.ideal, series.poly, vec, series.weight)
    if isinstance(series, QExp):
        items = [(series.offset + j, c) for j, c in enumerate(series.coeffs)]
    elif isinstance(series, VectorQExp):
        items = [(comp.offset + j, c) for comp in series for j, c in enumerate(comp.coeffs)]
    else:
        items = [(j, as_fraction(c)) for j, c in enumerate(series)]
    nz = [(e, c) for e, c in items if c]
    if not nz:
        raise ZeroSeries("cannot normalize an all-zero series")
    d = lcm(*(c.denominator for _, c in nz))
    g = 0
    for _, c in nz:
        g = math.gcd(g, int(c * d))
    kappa = Fraction(d, g)
    lead = min(nz, key=lambda t: t[0])[1]  # min is stable, so ties keep the first
    if lead < 0:
        kappa = -kappa
    if isinstance(series, QExp):
        return kappa, series * kappa
    if isinstance(series, VectorQExp):
        return kappa, VectorQExp(c * kappa for c in series)
    return kappa, [as_fraction(c) * kappa for c in series]


# ---------------------------------------------------------------------------
# characters
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CharacterSet:
    model: object  # ModelSpec
    characters: dict  # h -> QExp (primitive integral, positive leading coefficient)
    kappa: Fraction  # normalization of the solved theta series
    scales: dict = field(default_factory=dict)  # h -> factor applied to kappa * component
    components: dict = field(default_factory=dict)  # h -> r

    def ordered(self) -> list:
        return sorted(self.characters.items(), key=lambda kv: self.components.get(kv[0], 0))


def assign_components(model, l: int, k: int) -> dict:
    """h -> r with r/l - k/12 = h - c/24 (mod 1); must be a bijection."""
    by_class: dict = {}
    for h in model.H:
        key = frac_mod1(h - model.c / 24)
        by_class.setdefault(key, []).append(h)
    out = {}
    for r in range(1, l):
        key = frac_mod1(Fraction(r, l) - Fraction(k, 12))
        hs = by_class.get(key, [])
        if len(hs) != 1:
            raise IndexMismatch(f"component r={r} matches {len(hs)} conformal dimensions")
        out[hs[0]] = r
    if len(out) != len(model.H):
        raise IndexMismatch("component assignment is not a bijection onto H_c")
    return out


def component_shifts(model, l: int, k: int) -> dict:
    """h -> integer m_r with r/l - k/12 = h - c/24 - m_r."""
    assign = assign_components(model, l, k)
    return {h: int(model.h_offset(h) - (Fraction(r, l) - Fraction(k, 12))) for h, r in assign.items()}


def extract_characters(model, solved: ThetaSeries, N: int) -> CharacterSet:
    l, k = model.l, model.k
    kappa, normed = normalize_integral(solved)
    shifts = component_shifts(model, l, k)
    assign = assign_components(model, l, k)
    need = N + max(shifts.values())
    if normed.trunc < need:
        raise ValueError(f"theta series valid through {normed.trunc}, need {need}")
    eta = eta_power(-2 * k, need)
    chars, scales = {}, {}
    for h, r in assign.items():
        comp = normed.series.component(r).truncate(need)
        xi = comp * eta
        try:
            ch = xi.realign(model.h_offset(h))
        except ValueError as exc:
            raise IndexMismatch(f"component r={r} has terms below q^(h - c/24) for h={h}") from exc
        ch = ch.truncate(N)
        s, ch = normalize_integral(ch)
        chars[h] = ch
        scales[h] = s
    return CharacterSet(model, chars, kappa, scales, assign)


# ---------------------------------------------------------------------------
# numeric checks
# ---------------------------------------------------------------------------

def evaluate(series: VectorQExp, tau: complex) -> np.ndarray:
    out = np.zeros(len(series), dtype=complex)
    for i, comp in enumerate(series):
        q0 = cmath.exp(2j * cmath.pi * tau * float(comp.offset))
        q = cmath.exp(2j * cmath.pi * tau)
        total = 0j
        qn = 1 + 0j
        for c in comp.coeffs:
            if c:
                total += float(c) * qn
            qn *= q
        out[i] = q0 * total
    return out


def numeric_transform_check(t, rho: RhoRep, tau0: complex = 1j, N: int | None = None,
                            weight: int | None = None) -> float:
    """Relative residual of tau^-k theta(-1/tau) against rho(S) theta(tau)."""
    series = t.series if isinstance(t, ThetaSeries) else t
    k = weight if weight is not None else t.weight
    if N is not None:
        series = VectorQExp(c.truncate(N) for c in series)
    if tau0.imag <= 0:
        raise ValueError("tau0 must lie in the upper half plane")
    v0 = evaluate(series, tau0)
    if not np.any(v0):
        raise ZeroSeries("theta vanishes identically at tau0")
    v1 = evaluate(series, -1 / tau0)
    S = rho.matS.to_complex()
    lhs = tau0 ** (-k) * v1
    rhs = S @ v0
    return float(np.linalg.norm(lhs - rhs) / np.linalg.norm(v0))


def t_check(t) -> bool:
    """Every nonzero term of component r sits at an exponent = r/l (mod 1)."""
    series = t.series if isinstance(t, ThetaSeries) else t
    l = series.l
    for r, comp in enumerate(series, start=1):
        if frac_mod1(comp.offset) != Fraction(r, l):
            return False
    return True


def corrupt(t: ThetaSeries, factor: int = 2) -> ThetaSeries:
    """Copy with the lowest-exponent nonzero coefficient multiplied by ``factor``."""
    comps = list(t.series)
    best = None
    for i, comp in enumerate(comps):
        v = comp.valuation()
        if v is not None and (best is None or comp.offset + v < best[0]):
            best = (comp.offset + v, i, v)
    if best is None:
        raise ZeroSeries("nothing to corrupt")
    _, i, v = best
    coeffs = list(comps[i].coeffs)
    coeffs[v] *= factor
    comps[i] = QExp(comps[i].offset, tuple(coeffs))
    return ThetaSeries(t.ideal, t.poly, VectorQExp(comps), t.weight, t.twist)
