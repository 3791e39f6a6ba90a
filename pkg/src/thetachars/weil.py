"""Finite quadratic modules, Gauss sums and Weil representation operators.

A quadratic module is a finite abelian group ``M = Z/d_1 x ... x Z/d_n`` with a
non-degenerate Q/Z-valued quadratic form.  Elements are tuples of residues and
are also addressed by a flat mixed-radix index (last coordinate fastest), which
is the row/column order of every operator matrix built here.

Weil operators act on row vectors of function values from the right:
``f | omega(A) = f @ W(A)``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Callable, Sequence

import numpy as np
from sympy import Matrix
from sympy.matrices.normalforms import smith_normal_decomp

from .arith import Cyclo, CycloMatrix, as_fraction, frac_mod1, lcm


class NotProper(ValueError):
    """The Gauss-sum cocycle is not +-1 valued, so omega is only projective."""


class QuadraticModule:
    def __init__(self, orders: Sequence[int], qform: Callable[[tuple], Fraction] | dict,
                 check: bool = True):
        self.orders = tuple(int(o) for o in orders)
        self.elements = list(itertools.product(*(range(o) for o in self.orders)))
        get = qform.__getitem__ if isinstance(qform, dict) else qform
        qvals = [frac_mod1(as_fraction(get(x))) for x in self.elements]
        self.level = lcm(*(q.denominator for q in qvals)) if qvals else 1
        self.qnum = np.array([int(q * self.level) for q in qvals], dtype=np.int64)
        self._coords = np.array(self.elements, dtype=np.int64).reshape(len(self.elements), len(self.orders))
        strides = []
        s = 1
        for o in reversed(self.orders):
            strides.append(s)
            s *= o
        self._strides = np.array(list(reversed(strides)), dtype=np.int64)
        self._bnum = None
        if check:
            self._check()

    def __len__(self):
        return len(self.elements)

    def index(self, x: Sequence[int]) -> int:
        return int(sum((int(a) % o) * s for a, o, s in zip(x, self.orders, self._strides)))

    def q(self, x) -> Fraction:
        return Fraction(int(self.qnum[self.index(x)]), self.level)

    def _index_array(self, coords: np.ndarray) -> np.ndarray:
        return ((coords % np.array(self.orders)) * self._strides).sum(axis=-1)

    @property
    def bilinear_matrix(self) -> np.ndarray:
        """Integer matrix level * B(x, y) mod level over all pairs of elements."""
        if self._bnum is None:
            c = self._coords
            s = self._index_array(c[:, None, :] + c[None, :, :])
            q = self.qnum
            self._bnum = (q[s] - q[:, None] - q[None, :]) % self.level
        return self._bnum

    def _check(self):
        neg = self._index_array(-self._coords)
        if not np.array_equal(self.qnum[neg], self.qnum):
            raise ValueError("quadratic form is not even: Q(-x) != Q(x)")
        b = self.bilinear_matrix
        gens = [self.index(tuple(1 if i == j else 0 for i in range(len(self.orders))))
                for j in range(len(self.orders))]
        if gens:
            bg = b[:, gens]  # B(x, e_j)
            lin = (self._coords @ bg.T) % self.level  # sum_j y_j B(x, e_j) indexed [y, x]
            if not np.array_equal(lin.T, b):
                raise ValueError("associated bilinear form is not Z-bilinear")
        nz = b.any(axis=1)
        nz[0] = True
        if not nz.all():
            raise ValueError("quadratic module is degenerate")


def bilinear(M: QuadraticModule, x, y) -> Fraction:
    xy = tuple(a + b for a, b in zip(x, y))
    return frac_mod1(M.q(xy) - M.q(x) - M.q(y))


def gauss_sum(M: QuadraticModule, a: int) -> Cyclo:
    counts = np.bincount((a * M.qnum) % M.level, minlength=M.level)
    return Cyclo.from_lift(M.level, [int(c) for c in counts])


def cocycle(M: QuadraticModule, a: int) -> Cyclo:
    if gcd(a, M.level) != 1:
        raise ValueError(f"{a} is not coprime to the level {M.level}")
    return gauss_sum(M, a) / gauss_sum(M, 1)


def units(n: int) -> list[int]:
    return [a for a in range(1, max(n, 2)) if gcd(a, n) == 1]


def is_proper(M: QuadraticModule) -> bool:
    one, minus = Cyclo.one(M.level), -Cyclo.one(M.level)
    return all(cocycle(M, a) in (one, minus) for a in units(M.level))


@dataclass(frozen=True)
class WeilOperators:
    dim: int
    opT: CycloMatrix
    opS: CycloMatrix
    proper: bool


def weil_operators(M: QuadraticModule) -> WeilOperators:
    if not is_proper(M):
        raise NotProper("the Weil representation of this module is only projective")
    m = M.level
    n = len(M)
    diag = np.zeros((n, n), dtype=np.int64)
    weights = np.zeros((n, n), dtype=np.int64)
    idx = np.arange(n)
    diag[idx, idx] = M.qnum
    weights[idx, idx] = 1
    opT = CycloMatrix.from_root_exponents(m, diag, weights)
    # W(S)[y, x] = gamma(1)^-1 e(-B(x, y)); B is symmetric
    opS = CycloMatrix.from_root_exponents(m, -M.bilinear_matrix).scale(gauss_sum(M, 1).inverse())
    return WeilOperators(n, opT, opS, True)


def discriminant_module(gram) -> QuadraticModule:
    """Discriminant form L#/L of an even lattice with Gram matrix ``gram`` of B."""
    G = Matrix([[as_fraction(x) for x in row] for row in gram])
    if any(x.q != 1 for x in G) or any(G[i, i] % 2 for i in range(G.rows)):
        raise ValueError("Gram matrix must be integral with even diagonal")
    D, U, V = smith_normal_decomp(G)
    if U * G * V != D:
        raise AssertionError("unexpected Smith normal form convention")
    diag = [abs(int(D[i, i])) for i in range(D.rows)]
    if 0 in diag:
        raise ValueError("Gram matrix is singular")
    keep = [i for i, d in enumerate(diag) if d > 1]
    Uinv = U.inv()
    Ginv = G.inv()

    def qform(k):
        vec = [0] * G.rows
        for i, r in zip(keep, k):
            vec[i] = r
        z = Uinv * Matrix(vec)
        val = (z.T * Ginv * z)[0, 0] / 2
        return Fraction(int(val.p), int(val.q))

    return QuadraticModule([diag[i] for i in keep], qform)


def milgram_sum(gram) -> tuple[Cyclo, int, int]:
    """Return (gamma(1) of L#/L, |L#/L|, rank) for an even Gram matrix."""
    M = discriminant_module(gram)
    return gauss_sum(M, 1), len(M), len(gram)


def milgram_check(L, scale=1) -> bool:
    """Exact check of sum_{L#/L} e(Q(x)) = i^r sqrt([L#:L]) through its square.

    ``L`` is a Gram matrix or any object with a ``gram`` attribute; the form
    used is ``gram / scale``.
    """
    gram = getattr(L, "gram", L)
    scale = as_fraction(scale)
    g = [[as_fraction(x) / scale for x in row] for row in gram]
    if len(g) % 2:
        raise ValueError("rank must be even")
    gamma, order, rank = milgram_sum(g)
    r = rank // 2
    m = gamma.m
    target = Cyclo.rational(m, (-1) ** r * order)
    return gamma * gamma == target
