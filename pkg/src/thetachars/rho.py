"""The field F(l^2), its cubic character, and the representation rho_l.

F(l^2) is realised as Z/l[X]/(X^2 + 3) for a prime l = 2 (mod 3); the element
``a + b*w`` (w^2 = -3) has flat index ``a*l + b``, the same mixed-radix order
as :class:`~thetachars.weil.QuadraticModule` with orders ``(l, l)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import sympy

from .arith import Cyclo, CycloMatrix, cyclo_sum_of_roots
from .weil import QuadraticModule


class Fl2:
    def __init__(self, l: int):
        if not sympy.isprime(l) or l % 3 != 2:
            raise ValueError(f"need a prime l = 2 mod 3, got {l}")
        if pow(-3 % l, (l - 1) // 2, l) != l - 1:
            raise ValueError(f"X^2 + 3 is reducible mod {l}")
        self.l = l
        self.size = l * l
        idx = np.arange(self.size)
        self.a = idx // l
        self.b = idx % l
        self.norms = (self.a * self.a + 3 * self.b * self.b) % l
        self.traces = (2 * self.a) % l

    def __repr__(self):
        return f"Fl2({self.l})"

    def __iter__(self):
        return ((int(a), int(b)) for a, b in zip(self.a, self.b))

    def index(self, x) -> int:
        return (x[0] % self.l) * self.l + x[1] % self.l

    def element(self, i: int) -> tuple[int, int]:
        return divmod(int(i), self.l)

    def mul(self, x, y):
        l = self.l
        return ((x[0] * y[0] - 3 * x[1] * y[1]) % l, (x[0] * y[1] + x[1] * y[0]) % l)

    def add(self, x, y):
        return ((x[0] + y[0]) % self.l, (x[1] + y[1]) % self.l)

    def conj(self, x):
        """Frobenius x -> x^l, which sends w to -w."""
        return (x[0] % self.l, -x[1] % self.l)

    def pow(self, x, e: int):
        out = (1, 0)
        while e:
            if e & 1:
                out = self.mul(out, x)
            x = self.mul(x, x)
            e >>= 1
        return out

    def trace(self, x) -> int:
        return (2 * x[0]) % self.l

    def quadratic_module(self) -> QuadraticModule:
        """(F(l^2), n(x)/l)."""
        l = self.l
        return QuadraticModule((l, l), lambda x: Fraction((x[0] ** 2 + 3 * x[1] ** 2) % l, l))


def norm(F: Fl2, x) -> int:
    return (x[0] * x[0] + 3 * x[1] * x[1]) % F.l


@dataclass(frozen=True)
class CubicCharacter:
    field: Fl2
    generator: tuple[int, int]
    exponent: np.ndarray  # chi(x) = zeta_3^exponent[index(x)], -1 at x = 0

    def __call__(self, x) -> Cyclo:
        e = int(self.exponent[self.field.index(x)])
        if e < 0:
            raise ValueError("chi(0) is undefined")
        return Cyclo.zeta(3, e)

    def conjugate(self) -> "CubicCharacter":
        e = self.exponent.copy()
        e[e > 0] = 3 - e[e > 0]
        return CubicCharacter(self.field, self.generator, e)


def _is_generator(F: Fl2, x, order: int, primes) -> bool:
    return all(F.pow(x, order // p) != (1, 0) for p in primes)


def cubic_character(F: Fl2, skip: int = 0) -> CubicCharacter:
    """Order-3 character pinned by the smallest-index generator of F(l^2)*.

    ``skip`` selects a later generator, used to test generator independence.
    """
    order = F.size - 1
    primes = list(sympy.factorint(order))
    found = -1
    for i in range(1, F.size):
        x = F.element(i)
        if _is_generator(F, x, order, primes):
            found += 1
            if found == skip:
                g = x
                break
    else:
        raise RuntimeError("no generator found")
    exponent = np.full(F.size, -1, dtype=np.int64)
    cur = (1, 0)
    for j in range(order):
        exponent[F.index(cur)] = j % 3
        cur = F.mul(cur, g)
    return CubicCharacter(F, g, exponent)


def lambda_value(F: Fl2, r: int) -> Cyclo:
    """lambda(r) in Q(zeta_l), computed with the weights chi + conj(chi) in {2, -1}."""
    l = F.l
    if r % l == 0:
        raise ValueError("lambda(r) needs r != 0 mod l")
    chi = cubic_character(F)
    fiber = np.nonzero(F.norms == r % l)[0]
    w = np.where(chi.exponent[fiber] == 0, 2, -1)
    s = cyclo_sum_of_roots(l, (int(t) for t in F.traces[fiber]), (int(v) for v in w))
    return s * Fraction(-1, 2 * l)


def lambda_with_character(F: Fl2, chi: CubicCharacter, r: int) -> Cyclo:
    """lambda(r) = -(1/l) sum_{n(x)=r} chi(x) e(tr(x)/l), in Q(zeta_{3l})."""
    l = F.l
    m = 3 * l
    fiber = np.nonzero(F.norms == r % l)[0]
    exps = (l * chi.exponent[fiber] + 3 * F.traces[fiber]) % m
    return cyclo_sum_of_roots(m, (int(e) for e in exps)) * Fraction(-1, l)


@dataclass(frozen=True)
class RhoRep:
    l: int
    matT: CycloMatrix
    matS: CycloMatrix
    lam: tuple  # lam[r] = lambda(r), r = 0..l-1 (entry 0 unused)


def rho_matrices(l: int) -> RhoRep:
    F = Fl2(l)
    lam = (None,) + tuple(lambda_value(F, r) for r in range(1, l))
    T = CycloMatrix.diagonal([Cyclo.zeta(l, r) for r in range(1, l)])
    S = CycloMatrix.from_entries(l, [[lam[(r * s) % l] for s in range(1, l)] for r in range(1, l)])
    return RhoRep(l, T, S, lam)


@dataclass(frozen=True)
class PhiTable:
    """Phi(x) has the single entry ``value[x]`` at position r = ``index[x]`` (0: none)."""

    field: Fl2
    index: np.ndarray
    value: np.ndarray
    classes: np.ndarray | None = None  # chi exponent of x (-1 at x = 0)

    def vector(self, x) -> tuple[int, ...]:
        i = self.field.index(x)
        out = [0] * (self.field.l - 1)
        if self.index[i]:
            out[self.index[i] - 1] = int(self.value[i])
        return tuple(out)

    def matrix(self) -> np.ndarray:
        """(l-1) x l^2 integer matrix whose row r-1 is the r-th component function."""
        l = self.field.l
        out = np.zeros((l - 1, self.field.size), dtype=np.int64)
        nz = np.nonzero(self.index)[0]
        out[self.index[nz] - 1, nz] = self.value[nz]
        return out


def phi_table(F: Fl2, chi: CubicCharacter | None = None) -> PhiTable:
    chi = chi or cubic_character(F)
    index = F.norms.copy()
    value = np.where(chi.exponent == 0, 2, -1)
    value[index == 0] = 0
    return PhiTable(F, index, value, chi.exponent.copy())


def phi_chi_matrix(F: Fl2, chi: CubicCharacter) -> CycloMatrix:
    """Phi_chi as an (l-1) x l^2 matrix over Q(zeta_3): row r-1 is chi_r."""
    l = F.l
    exps = np.zeros((l - 1, F.size), dtype=np.int64)
    weights = np.zeros((l - 1, F.size), dtype=np.int64)
    nz = np.nonzero(F.norms)[0]
    exps[F.norms[nz] - 1, nz] = chi.exponent[nz]
    weights[F.norms[nz] - 1, nz] = 1
    return CycloMatrix.from_root_exponents(3, exps, weights)
