"""The definite quaternion algebra V = K + Ku, K = Q(sqrt(-l)), u^2 = -1/3.

Elements are rational coordinate vectors on the basis {1, s, u, su} with
s = sqrt(-l).  Lattices are stored by a Z-basis in these coordinates; their
Gram matrix is that of the trace form tr(x y-bar) = 2 * (polarised norm).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterator

import numpy as np
import sympy

from .arith import as_fraction, lcm
from .linalg import det, hnf_rows, inverse, inverse_mod_p, iter_ellipsoid, lll_gram, nullspace_mod_p
from .rho import Fl2

Quat = tuple  # 4 Fractions


class RingClosureFailure(ArithmeticError):
    """A candidate order basis is not closed under multiplication."""


class NoC0Found(LookupError):
    """No element with n(c0)/n(I) = 1 (mod l) within the search bound."""


def _q(x) -> Quat:
    return tuple(as_fraction(t) for t in x)


class QuatAlgebra:
    def __init__(self, l: int):
        if not sympy.isprime(l) or l % 3 != 2:
            raise ValueError(f"need a prime l = 2 mod 3, got {l}")
        self.l = l
        F = Fraction
        third = F(1, 3)
        # table[i][j] = (coefficient, basis index) of e_i * e_j
        self._table = [
            [(F(1), 0), (F(1), 1), (F(1), 2), (F(1), 3)],
            [(F(1), 1), (F(-l), 0), (F(1), 3), (F(-l), 2)],
            [(F(1), 2), (F(-1), 3), (-third, 0), (third, 1)],
            [(F(1), 3), (F(l), 2), (-third, 1), (-l * third, 0)],
        ]
        self.gram = [[F(0)] * 4 for _ in range(4)]
        for i, g in enumerate((2, 2 * l, F(2, 3), F(2 * l, 3))):
            self.gram[i][i] = F(g)

    def __repr__(self):
        return f"QuatAlgebra({self.l})"

    one = property(lambda self: _q((1, 0, 0, 0)))
    s = property(lambda self: _q((0, 1, 0, 0)))
    u = property(lambda self: _q((0, 0, 1, 0)))

    def mul(self, x, y) -> Quat:
        out = [Fraction(0)] * 4
        for i, xi in enumerate(x):
            if xi:
                for j, yj in enumerate(y):
                    if yj:
                        c, k = self._table[i][j]
                        out[k] += c * xi * yj
        return tuple(out)

    def conj(self, x) -> Quat:
        x = _q(x)
        return (x[0], -x[1], -x[2], -x[3])

    def norm(self, x) -> Fraction:
        x = _q(x)
        l = self.l
        return x[0] ** 2 + l * x[1] ** 2 + (x[2] ** 2 + l * x[3] ** 2) / 3

    def trace(self, x) -> Fraction:
        return 2 * as_fraction(x[0])

    def bilinear(self, x, y) -> Fraction:
        """tr(x y-bar)."""
        return sum((self.gram[i][i] * as_fraction(x[i]) * as_fraction(y[i]) for i in range(4)), Fraction(0))


def build_algebra(l: int) -> QuatAlgebra:
    return QuatAlgebra(l)


def _rational_gcd(values) -> Fraction:
    values = [as_fraction(v) for v in values if v]
    if not values:
        return Fraction(0)
    d = lcm(*(v.denominator for v in values))
    g = 0
    for v in values:
        g = math.gcd(g, int(v * d))
    return Fraction(g, d)


@dataclass(frozen=True, eq=False)
class IdealLattice:
    algebra: QuatAlgebra
    basis: tuple  # rows of 4 Fractions, in Hermite form

    @classmethod
    def from_generators(cls, algebra: QuatAlgebra, gens) -> "IdealLattice":
        basis = hnf_rows(gens)
        if len(basis) != 4:
            raise ValueError(f"generators span a rank {len(basis)} lattice, expected 4")
        return cls(algebra, tuple(tuple(b) for b in basis))

    @cached_property
    def gram(self) -> list[list[Fraction]]:
        A = self.algebra
        return [[A.bilinear(a, b) for b in self.basis] for a in self.basis]

    @cached_property
    def norm_form(self) -> list[list[Fraction]]:
        """Matrix of n in lattice coordinates: n(x B) = x A x^T."""
        return [[g / 2 for g in row] for row in self.gram]

    @cached_property
    def det_gram(self) -> Fraction:
        return det(self.gram)

    @cached_property
    def rednorm(self) -> Fraction:
        A = self.algebra
        vals = [A.norm(b) for b in self.basis]
        vals += [self.gram[i][j] for i in range(4) for j in range(i + 1, 4)]
        return _rational_gcd(vals)

    @cached_property
    def _inv(self):
        return inverse(self.basis)

    def coords(self, c) -> list[Fraction]:
        c = _q(c)
        inv = self._inv
        return [sum((c[k] * inv[k][j] for k in range(4)), Fraction(0)) for j in range(4)]

    def element(self, x) -> Quat:
        return tuple(sum((as_fraction(x[i]) * self.basis[i][k] for i in range(4)), Fraction(0))
                     for k in range(4))

    def contains(self, c) -> bool:
        return all(t.denominator == 1 for t in self.coords(c))

    def contains_lattice(self, other: "IdealLattice") -> bool:
        return all(self.contains(b) for b in other.basis)

    def index_in(self, other: "IdealLattice") -> Fraction:
        """[other : self] as a ratio of covolumes."""
        r = det(self.basis) / det(other.basis)
        return abs(r)

    def left_mul(self, a) -> "IdealLattice":
        return IdealLattice.from_generators(self.algebra, [self.algebra.mul(a, b) for b in self.basis])

    def right_mul(self, a) -> "IdealLattice":
        return IdealLattice.from_generators(self.algebra, [self.algebra.mul(b, a) for b in self.basis])

    def __eq__(self, other):
        if not isinstance(other, IdealLattice):
            return NotImplemented
        return self.algebra.l == other.algebra.l and self.basis == other.basis

    def __hash__(self):
        return hash((self.algebra.l, self.basis))

    def __repr__(self):
        return f"IdealLattice(l={self.algebra.l}, rednorm={self.rednorm})"


def _p_basis(A: QuatAlgebra, o_basis, sign: int = 1) -> list:
    """Z-basis of p = 3o + (1 + sign*s)o inside K."""
    gens = []
    gen = _q((1, sign, 0, 0))
    for w in o_basis:
        gens.append(tuple(3 * t for t in w))
        gens.append(A.mul(gen, w))
    return hnf_rows(gens)


def _o_basis(A: QuatAlgebra) -> list:
    half = Fraction(1, 2)
    if A.l % 4 == 3:
        return [_q((1, 0, 0, 0)), (half, half, Fraction(0), Fraction(0))]
    return [_q((1, 0, 0, 0)), _q((0, 1, 0, 0))]


def is_ring(L: IdealLattice) -> bool:
    A = L.algebra
    return L.contains(A.one) and all(L.contains(A.mul(a, b)) for a in L.basis for b in L.basis)


def maximal_order(A: QuatAlgebra) -> IdealLattice:
    """O = o + p v with v = u (l = 3 mod 4) or (1 + u)/2 (l = 1 mod 4)."""
    o = _o_basis(A)
    if A.l % 4 == 3:
        v = A.u
    else:
        v = (Fraction(1, 2), Fraction(0), Fraction(1, 2), Fraction(0))
    gens = list(o) + [A.mul(p, v) for p in _p_basis(A, o)]
    O = IdealLattice.from_generators(A, gens)
    if not is_ring(O):
        raise RingClosureFailure(f"candidate order for l={A.l} is not closed under multiplication")
    if O.det_gram != A.l ** 2:
        raise RingClosureFailure(f"order for l={A.l} has discriminant {O.det_gram}, expected {A.l ** 2}")
    return O


def left_ideal(O: IdealLattice, gens) -> IdealLattice:
    """The left O-ideal generated by ``gens``."""
    A = O.algebra
    I = IdealLattice.from_generators(A, [A.mul(d, g) for d in O.basis for g in gens])
    if not all(I.contains(A.mul(d, b)) for d in O.basis for b in I.basis):
        raise RingClosureFailure("generated lattice is not a left O-module")
    return I


def left_ideal_Dp(A: QuatAlgebra, O: IdealLattice | None = None, sign: int = -1) -> IdealLattice:
    """O p' for the prime p' = 3o + (1 - s)o of o above 3.

    With the prime (3, 1 + s) that enters the construction of O itself, the left
    ideal is O * 3u, which is principal; its conjugate gives the other class.
    """
    O = O or maximal_order(A)
    return left_ideal(O, _p_basis(A, _o_basis(A), sign))


def is_principal(I: IdealLattice) -> bool:
    """A left ideal of a maximal order is principal iff it has an element of norm n(I)."""
    X = enumerate_by_norm(I, I.rednorm)
    return len(X) > 1


def dual_lattice(L: IdealLattice, scale=1) -> IdealLattice:
    """{y : tr(x y-bar)/scale in Z for all x in L}."""
    A = L.algebra
    scale = as_fraction(scale)
    BG = [[A.gram[k][k] * L.basis[i][k] for k in range(4)] for i in range(4)]  # B @ G
    inv = inverse(BG)
    rows = [tuple(scale * inv[k][j] for k in range(4)) for j in range(4)]
    return IdealLattice.from_generators(A, rows)


def sqrt_minus_l_times(L: IdealLattice) -> IdealLattice:
    return L.left_mul(L.algebra.s)


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Reduced:
    U: np.ndarray  # lattice coordinates = reduced coordinates @ U
    form: list  # norm form in reduced coordinates


def _reduction(L: IdealLattice) -> _Reduced:
    U = lll_gram(L.norm_form)
    A = L.norm_form
    form = [[sum((U[i][a] * A[a][b] * U[j][b] for a in range(4) for b in range(4)), Fraction(0))
             for j in range(4)] for i in range(4)]
    return _Reduced(np.array(U, dtype=np.int64), form)


_REDUCTIONS: dict = {}


def reduction(L: IdealLattice) -> _Reduced:
    key = (L.algebra.l, L.basis)
    if key not in _REDUCTIONS:
        _REDUCTIONS[key] = _reduction(L)
    return _REDUCTIONS[key]


def iter_by_norm(L: IdealLattice, bound, outer: tuple[int, int] | None = None) -> Iterator[np.ndarray]:
    """Blocks of lattice coordinates of all c in L with n(c) <= bound (unordered)."""
    red = reduction(L)
    for block in iter_ellipsoid(red.form, bound, outer=outer):
        yield block @ red.U


def enumerate_by_norm(L: IdealLattice, bound) -> np.ndarray:
    """Lattice coordinates of every c in L with n(c) <= bound, sorted lexicographically."""
    blocks = list(iter_by_norm(L, bound))
    X = np.concatenate(blocks) if blocks else np.zeros((0, 4), dtype=np.int64)
    order = np.lexsort(X.T[::-1])
    return X[order]


def integer_norms(L: IdealLattice, X: np.ndarray) -> np.ndarray:
    """n(c)/n(L) for lattice coordinates X, exactly, as int64."""
    G = L.gram
    n = L.rednorm
    d = lcm(*(g.denominator for row in G for g in row), n.denominator)
    Gi = np.array([[int(g * d) for g in row] for row in G], dtype=np.int64)
    q = np.einsum("ij,jk,ik->i", X, Gi, X)
    scale = 2 * n * d
    if scale.denominator != 1:
        raise ValueError("unexpected norm denominator")
    s = int(scale)
    if np.any(q % s):
        raise ArithmeticError("n(L) does not divide every norm")
    return q // s


# ---------------------------------------------------------------------------
# residue map I -> F(l^2)
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ResidueMap:
    ideal: IdealLattice
    c0: Quat
    field: Fl2
    matrix: np.ndarray = field(repr=False)  # 2x4 over Z/l: lattice coords -> (a, b)

    def images(self, X: np.ndarray) -> np.ndarray:
        """Flat F(l^2) indices a*l + b of the residues of lattice coordinates X."""
        l = self.field.l
        ab = (X @ self.matrix.T) % l
        return ab[:, 0] * l + ab[:, 1]

    def __call__(self, c) -> tuple[int, int]:
        x = self.ideal.coords(c)
        if any(t.denominator != 1 for t in x):
            raise ValueError("element is not in the ideal")
        i = int(self.images(np.array([[int(t) for t in x]], dtype=np.int64))[0])
        return self.field.element(i)


def _find_c0(I: IdealLattice) -> Quat:
    l = I.algebra.l
    n = I.rednorm
    for mult in itertools.count(1):
        if mult > 64 * l:
            raise NoC0Found(f"no c0 in {I!r} with norm below {mult * n}")
        X = enumerate_by_norm(I, mult * n)
        if len(X):
            m = integer_norms(I, X)
            ok = np.nonzero(m % l == 1)[0]
            if len(ok):
                # smallest norm first, then the lexicographically largest coordinates
                best = min(ok, key=lambda i: (int(m[i]), tuple(-int(t) for t in X[i])))
                return I.element(X[best])


def residue_map(I: IdealLattice, c0=None, check: bool = True) -> ResidueMap:
    A = I.algebra
    l = A.l
    F = Fl2(l)
    # coordinates of s*b_i in I; their span mod l is sqrt(-l) I / l I
    K = []
    for b in I.basis:
        x = I.coords(A.mul(A.s, b))
        if any(t.denominator != 1 for t in x):
            raise ArithmeticError("sqrt(-l) I is not contained in I")
        K.append([int(t) for t in x])
    Q = nullspace_mod_p(K, l)  # functionals vanishing on sqrt(-l) I
    if len(Q) != 2:
        raise ArithmeticError(f"I / sqrt(-l) I has dimension {len(Q)} over Z/l, expected 2")
    c0 = _find_c0(I) if c0 is None else _q(c0)
    x0 = I.coords(c0)
    x1 = I.coords(A.mul((0, 0, 3, 0), c0))
    if any(t.denominator != 1 for t in x0 + x1):
        raise ValueError("c0 is not in the ideal")
    e1 = [sum(q[j] * int(x0[j]) for j in range(4)) % l for q in Q]
    e2 = [sum(q[j] * int(x1[j]) for j in range(4)) % l for q in Q]
    E = [[e1[0], e2[0]], [e1[1], e2[1]]]
    Einv = inverse_mod_p(E, l)
    P = [[sum(Einv[i][k] * Q[k][j] for k in range(2)) % l for j in range(4)] for i in range(2)]
    rmap = ResidueMap(I, c0, F, np.array(P, dtype=np.int64))
    if check:
        _check_residue_map(rmap)
    return rmap


def _check_residue_map(rmap: ResidueMap) -> None:
    I, F = rmap.ideal, rmap.field
    l = F.l
    X = np.array(list(itertools.product(range(l), repeat=4)), dtype=np.int64)
    img = rmap.images(X)
    if len(np.unique(img)) != l * l:
        raise ArithmeticError("residue map is not surjective")
    if not np.array_equal(F.norms[img], integer_norms(I, X) % l):
        raise ArithmeticError("residue map does not respect the quadratic forms")
    if rmap(rmap.c0) != (1, 0):
        raise ArithmeticError("pi(c0) != 1")
