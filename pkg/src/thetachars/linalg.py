"""Exact linear algebra over Z, Q and Z/p, plus bounded lattice enumeration.

Lattice enumeration is a Fincke-Pohst search driven by an exact rational
LDL^T decomposition of the Gram matrix; the innermost coordinate of every
search node is emitted as one numpy block, which keeps the Python-level work
proportional to the number of nodes one level up.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np
from sympy import Matrix, QQ
from sympy.matrices.normalforms import hermite_normal_form
from sympy.polys.matrices import DomainMatrix

from .arith import as_fraction, lcm

Vector = Sequence[Fraction]


def frac_matrix(rows) -> list[list[Fraction]]:
    return [[as_fraction(x) for x in row] for row in rows]


def mat_mul(a, b):
    return [[sum((a[i][k] * b[k][j] for k in range(len(b))), Fraction(0)) for j in range(len(b[0]))]
            for i in range(len(a))]


def transpose(a):
    return [list(r) for r in zip(*a)]


def det(a) -> Fraction:
    M = Matrix(frac_matrix(a))
    d = M.det()
    return Fraction(int(d.p), int(d.q))


def inverse(a) -> list[list[Fraction]]:
    M = Matrix(frac_matrix(a)).inv()
    return [[Fraction(int(M[i, j].p), int(M[i, j].q)) for j in range(M.cols)] for i in range(M.rows)]


def nullspace(rows: Sequence[Sequence], ncols: int | None = None) -> list[list[Fraction]]:
    """Basis of {v : rows @ v = 0} over Q, from the reduced row echelon form."""
    rows = [list(r) for r in rows]
    if not rows:
        n = ncols or 0
        return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    n = len(rows[0])
    dm = DomainMatrix([[QQ(as_fraction(x).numerator, as_fraction(x).denominator) for x in r] for r in rows],
                      (len(rows), n), QQ)
    ns = dm.nullspace().to_Matrix()
    out = []
    for i in range(ns.rows):
        out.append([Fraction(int(ns[i, j].p), int(ns[i, j].q)) for j in range(n)])
    return out


def primitive_integer(v: Sequence) -> list[int]:
    """Scale a rational vector to coprime integers, first nonzero entry positive."""
    v = [as_fraction(x) for x in v]
    d = lcm(*(x.denominator for x in v))
    ints = [int(x * d) for x in v]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    if g == 0:
        return ints
    ints = [x // g for x in ints]
    for x in ints:
        if x:
            if x < 0:
                ints = [-y for y in ints]
            break
    return ints


class Echelon:
    """Incremental fraction-free row echelon form over Z (rank and membership).

    Rows are reduced against the stored pivots with integer cross-multiplication
    and divided by their content, so entries stay as small as the data allows.
    """

    def __init__(self):
        self.rows: list[list[int]] = []
        self.pivots: list[int] = []
        self.accepted: list[int] = []

    def _reduce(self, row: list[int]) -> list[int]:
        row = list(row)
        for piv, b in zip(self.pivots, self.rows):
            x = row[piv]
            if x:
                p = b[piv]
                g = math.gcd(x, p)
                fa, fb = p // g, x // g
                row = [fa * r - fb * s for r, s in zip(row, b)]
                c = 0
                for v in row:
                    if v:
                        c = math.gcd(c, v)
                        if c == 1:
                            break
                if c > 1:
                    row = [v // c for v in row]
        return row

    def add(self, row: Sequence[int], tag: int | None = None) -> bool:
        row = self._reduce([int(x) for x in row])
        for j, v in enumerate(row):
            if v:
                self.rows.append(row)
                self.pivots.append(j)
                if tag is not None:
                    self.accepted.append(tag)
                return True
        return False

    @property
    def rank(self) -> int:
        return len(self.rows)


def rank(rows: Sequence[Sequence[int]]) -> int:
    e = Echelon()
    for r in rows:
        e.add(r)
    return e.rank


def hnf_rows(rows: Sequence[Sequence]) -> list[list[Fraction]]:
    """Canonical (Hermite) basis of the Z-span of rational row vectors."""
    rows = frac_matrix(rows)
    d = lcm(*(x.denominator for r in rows for x in r))
    ints = Matrix([[int(x * d) for x in r] for r in rows])
    H = hermite_normal_form(ints.T)
    out = []
    for j in range(H.cols):
        col = [Fraction(int(H[i, j]), d) for i in range(H.rows)]
        if any(col):
            out.append(col)
    return out


# ---------------------------------------------------------------------------
# arithmetic mod p
# ---------------------------------------------------------------------------

def rref_mod_p(rows: Sequence[Sequence[int]], p: int) -> tuple[list[list[int]], list[int]]:
    a = [[int(x) % p for x in r] for r in rows]
    piv = []
    r = 0
    ncols = len(a[0]) if a else 0
    for c in range(ncols):
        k = next((i for i in range(r, len(a)) if a[i][c]), None)
        if k is None:
            continue
        a[r], a[k] = a[k], a[r]
        inv = pow(a[r][c], -1, p)
        a[r] = [(x * inv) % p for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[r])]
        piv.append(c)
        r += 1
    return a[:r], piv


def nullspace_mod_p(rows: Sequence[Sequence[int]], p: int) -> list[list[int]]:
    ncols = len(rows[0])
    red, piv = rref_mod_p(rows, p)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for row, c in zip(red, piv):
            v[c] = (-row[f]) % p
        basis.append(v)
    return basis


def inverse_mod_p(a: Sequence[Sequence[int]], p: int) -> list[list[int]]:
    n = len(a)
    aug = [list(r) + [int(i == j) for j in range(n)] for i, r in enumerate(a)]
    red, piv = rref_mod_p(aug, p)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular mod p")
    return [r[n:] for r in red]


# ---------------------------------------------------------------------------
# Gram matrices: LDL^T, LLL, ellipsoid enumeration
# ---------------------------------------------------------------------------

def ldl(gram) -> tuple[list[Fraction], list[list[Fraction]]]:
    """x^T A x = sum_i d_i (x_i + sum_{j>i} mu_ij x_j)^2, exact."""
    a = frac_matrix(gram)
    n = len(a)
    d = []
    mu = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        piv = a[i][i]
        if piv <= 0:
            raise ValueError("matrix is not positive definite")
        d.append(piv)
        for j in range(i + 1, n):
            mu[i][j] = a[i][j] / piv
        for j in range(i + 1, n):
            for k in range(i + 1, n):
                a[j][k] -= a[i][j] * a[i][k] / piv
    return d, mu


def is_positive_definite(gram) -> bool:
    try:
        ldl(gram)
    except ValueError:
        return False
    return True


def _gso(g):
    n = len(g)
    mu = [[Fraction(0)] * n for _ in range(n)]
    bn = [Fraction(0)] * n
    for i in range(n):
        for j in range(i):
            s = g[i][j] - sum((mu[j][k] * mu[i][k] * bn[k] for k in range(j)), Fraction(0))
            mu[i][j] = s / bn[j]
        bn[i] = g[i][i] - sum((mu[i][k] ** 2 * bn[k] for k in range(i)), Fraction(0))
    return mu, bn


def lll_gram(gram, delta=Fraction(3, 4)) -> list[list[int]]:
    """Unimodular U such that the rows of U times the basis are LLL reduced."""
    g0 = frac_matrix(gram)
    n = len(g0)
    U = [[int(i == j) for j in range(n)] for i in range(n)]

    def gram_of(U):
        return [[sum(U[i][a] * g0[a][b] * U[j][b] for a in range(n) for b in range(n)) for j in range(n)]
                for i in range(n)]

    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            mu, _ = _gso(gram_of(U))
            q = round(mu[k][j])
            if q:
                U[k] = [x - q * y for x, y in zip(U[k], U[j])]
        mu, bn = _gso(gram_of(U))
        if bn[k] >= (delta - mu[k][k - 1] ** 2) * bn[k - 1]:
            k += 1
        else:
            U[k], U[k - 1] = U[k - 1], U[k]
            k = max(k - 1, 1)
    return U


def _interval(center: Fraction, rad: Fraction) -> tuple[int, int]:
    """All integers z with (z - center)^2 <= rad, as an inclusive range."""
    if rad < 0:
        return 1, 0
    p, q = center.numerator, center.denominator
    a, b = rad.numerator, rad.denominator

    def inside(z):
        t = z * q - p
        return b * t * t <= a * q * q

    s = math.sqrt(float(rad))
    c = p / q
    lo = math.ceil(c - s)
    hi = math.floor(c + s)
    while inside(lo - 1):
        lo -= 1
    while lo <= hi and not inside(lo):
        lo += 1
    while inside(hi + 1):
        hi += 1
    while hi >= lo and not inside(hi):
        hi -= 1
    return lo, hi


def iter_ellipsoid(gram, bound, center: Vector | None = None,
                   outer: tuple[int, int] | None = None) -> Iterator[np.ndarray]:
    """Yield int64 blocks of all x in Z^n with (x-c)^T A (x-c) <= bound.

    Blocks share their coordinates 1..n-1; coordinate 0 varies inside a block.
    ``outer`` restricts the last coordinate to an inclusive range, which lets
    callers split one search into independent partitions.
    """
    d, mu = ldl(gram)
    n = len(d)
    bound = as_fraction(bound)
    c = [Fraction(0)] * n if center is None else [as_fraction(x) for x in center]
    x = [0] * n

    def rec(i: int, used: Fraction):
        # center of coordinate i given x_{i+1..}
        ci = c[i] - sum((mu[i][j] * (x[j] - c[j]) for j in range(i + 1, n)), Fraction(0))
        lo, hi = _interval(ci, (bound - used) / d[i])
        if i == n - 1 and outer is not None:
            lo, hi = max(lo, outer[0]), min(hi, outer[1])
        if lo > hi:
            return
        if i == 0:
            block = np.empty((hi - lo + 1, n), dtype=np.int64)
            block[:, 0] = np.arange(lo, hi + 1)
            for j in range(1, n):
                block[:, j] = x[j]
            yield block
            return
        for z in range(lo, hi + 1):
            x[i] = z
            t = z - ci
            yield from rec(i - 1, used + d[i] * t * t)
        x[i] = 0

    yield from rec(n - 1, Fraction(0))


def ellipsoid_outer_range(gram, bound, center: Vector | None = None) -> tuple[int, int]:
    d, _ = ldl(gram)
    n = len(d)
    c = Fraction(0) if center is None else as_fraction(center[n - 1])
    return _interval(c, as_fraction(bound) / d[n - 1])


def enumerate_ellipsoid(gram, bound, center: Vector | None = None) -> np.ndarray:
    blocks = list(iter_ellipsoid(gram, bound, center))
    n = len(gram)
    if not blocks:
        return np.zeros((0, n), dtype=np.int64)
    return np.concatenate(blocks)
