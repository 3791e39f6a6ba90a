"""Exact arithmetic kernel: rationals, cyclotomic numbers and truncated q-expansions.

Cyclotomic numbers are stored in the power basis of Q(zeta_m) reduced modulo
the m-th cyclotomic polynomial, so two representations of the same field
element always compare equal.  Matrices over Q(zeta_m) (:class:`CycloMatrix`)
keep integer numerators on the m exponents of zeta plus one common
denominator; their products go through BLAS only when the result is provably
exact in double precision.

q-expansions (:class:`QExp`) carry an exact rational leading exponent and a
tuple of rational coefficients valid for indices 0..trunc.  Every operation
shrinks ``trunc`` to the valid range of its inputs.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Sequence

import numpy as np
import sympy

Rational = Fraction


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"not an exact rational: {x!r}")


def fmt_rational(x) -> str:
    """Canonical string form: ``"a/b"``, or ``"a"`` when the denominator is 1."""
    x = as_fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def frac_mod1(x) -> Fraction:
    x = as_fraction(x)
    return x - (x.numerator // x.denominator)


def lcm(*args: int) -> int:
    out = 1
    for a in args:
        out = out * a // gcd(out, a) if a else out
    return out


# ---------------------------------------------------------------------------
# Cyclotomic fields
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def cyclotomic_polynomial(m: int) -> tuple[int, ...]:
    """Coefficients (constant term first) of the m-th cyclotomic polynomial."""
    x = sympy.Symbol("x")
    coeffs = sympy.Poly(sympy.cyclotomic_poly(m, x), x).all_coeffs()
    return tuple(int(c) for c in reversed(coeffs))


@lru_cache(maxsize=None)
def euler_phi(m: int) -> int:
    return len(cyclotomic_polynomial(m)) - 1


@lru_cache(maxsize=None)
def _reduction_table(m: int) -> np.ndarray:
    """Integer matrix R with R[j] = power-basis coordinates of zeta_m**j."""
    phi = cyclotomic_polynomial(m)
    d = len(phi) - 1
    table = np.zeros((m, d), dtype=np.int64)
    cur = [0] * d
    cur[0] = 1
    for j in range(m):
        table[j] = cur
        # multiply by x and reduce with the monic relation x^d = -sum phi_i x^i
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            cur = [c - top * p for c, p in zip(cur, phi[:-1])]
    return table


def _reduce_lift(m: int, lift: Sequence) -> tuple:
    """Reduce sum_j lift[j] zeta^j (j taken mod m) to canonical coordinates."""
    table = _reduction_table(m)
    d = table.shape[1]
    out = [0] * d
    for j, c in enumerate(lift):
        if c:
            row = table[j % m]
            for i in range(d):
                r = row[i]
                if r:
                    out[i] += c * int(r)
    return tuple(out)


@dataclass(frozen=True)
class Cyclo:
    """Element of Q(zeta_m), coordinates on 1, zeta, ..., zeta^(phi(m)-1)."""

    m: int
    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) != euler_phi(self.m):
            raise ValueError(f"Q(zeta_{self.m}) needs {euler_phi(self.m)} coordinates")
        object.__setattr__(self, "coeffs", tuple(as_fraction(c) for c in self.coeffs))

    # construction -----------------------------------------------------------
    @classmethod
    def from_lift(cls, m: int, lift: Sequence) -> "Cyclo":
        return cls(m, _reduce_lift(m, [as_fraction(c) if not isinstance(c, int) else c for c in lift]))

    @classmethod
    def rational(cls, m: int, q) -> "Cyclo":
        return cls(m, (as_fraction(q),) + (0,) * (euler_phi(m) - 1))

    @classmethod
    def zero(cls, m: int) -> "Cyclo":
        return cls.rational(m, 0)

    @classmethod
    def one(cls, m: int) -> "Cyclo":
        return cls.rational(m, 1)

    @classmethod
    def zeta(cls, m: int, j: int = 1) -> "Cyclo":
        lift = [0] * m
        lift[j % m] = 1
        return cls.from_lift(m, lift)

    @classmethod
    def e(cls, x, m: int) -> "Cyclo":
        """e(x) = exp(2 pi i x) for x with m*x integral."""
        x = as_fraction(x) * m
        if x.denominator != 1:
            raise ValueError(f"e({x / m}) is not in Q(zeta_{m})")
        return cls.zeta(m, x.numerator)

    # arithmetic -------------------------------------------------------------
    def _coerce(self, other) -> "Cyclo":
        if isinstance(other, Cyclo):
            if other.m != self.m:
                raise ValueError(f"modulus mismatch: {self.m} vs {other.m}")
            return other
        return Cyclo.rational(self.m, other)

    def __add__(self, other):
        other = self._coerce(other)
        return Cyclo(self.m, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return Cyclo(self.m, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Cyclo):
            q = as_fraction(other)
            return Cyclo(self.m, tuple(a * q for a in self.coeffs))
        other = self._coerce(other)
        m = self.m
        lift = [Fraction(0)] * m
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        lift[(i + j) % m] += a * b
        return Cyclo.from_lift(m, lift)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Cyclo):
            return self * (1 / as_fraction(other))
        return self * self._coerce(other).inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = Cyclo.one(self.m)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, Cyclo):
            return self.m == other.m and self.coeffs == other.coeffs
        try:
            return self == Cyclo.rational(self.m, other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash((self.m, self.coeffs))

    def __bool__(self):
        return any(self.coeffs)

    def __repr__(self):
        terms = []
        for j, c in enumerate(self.coeffs):
            if c:
                terms.append(fmt_rational(c) if j == 0 else f"{fmt_rational(c)}*z^{j}")
        return f"Cyclo[{self.m}](" + (" + ".join(terms) or "0") + ")"

    # field structure --------------------------------------------------------
    def galois(self, a: int) -> "Cyclo":
        """Image under sigma_a: zeta -> zeta^a."""
        if gcd(a, self.m) != 1:
            raise ValueError(f"{a} is not coprime to {self.m}")
        lift = [Fraction(0)] * self.m
        for j, c in enumerate(self.coeffs):
            lift[(a * j) % self.m] += c
        return Cyclo.from_lift(self.m, lift)

    def conj(self) -> "Cyclo":
        return self.galois(-1)

    def embed(self, m2: int) -> "Cyclo":
        """View as an element of Q(zeta_m2), m | m2."""
        if m2 % self.m:
            raise ValueError(f"Q(zeta_{self.m}) is not contained in Q(zeta_{m2})")
        step = m2 // self.m
        lift = [Fraction(0)] * m2
        for j, c in enumerate(self.coeffs):
            lift[j * step] = c
        return Cyclo.from_lift(m2, lift)

    def conjugates(self) -> list["Cyclo"]:
        return [self.galois(a) for a in range(1, self.m) if gcd(a, self.m) == 1] or [self]

    def norm(self) -> Fraction:
        out = Cyclo.one(self.m)
        for c in self.conjugates():
            out = out * c
        return out.rational_value()

    def inverse(self) -> "Cyclo":
        if not self:
            raise ZeroDivisionError("inverse of zero in a cyclotomic field")
        others = Cyclo.one(self.m)
        for a in range(2, self.m):
            if gcd(a, self.m) == 1:
                others = others * self.galois(a)
        n = (self * others).rational_value()
        return others * (1 / n)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self!r} is not rational")
        return self.coeffs[0]

    def to_complex(self) -> complex:
        z = np.exp(2j * np.pi / self.m)
        return complex(sum(float(c) * z ** j for j, c in enumerate(self.coeffs)))


def cyclo_galois(x: Cyclo, a: int) -> Cyclo:
    return x.galois(a)


def cyclo_sum_of_roots(m: int, exponents: Iterable[int], weights: Iterable[int] | None = None) -> Cyclo:
    """sum_i w_i zeta_m^(e_i), accumulated as integer counts before one reduction."""
    counts = [0] * m
    if weights is None:
        for e in exponents:
            counts[e % m] += 1
    else:
        for e, w in zip(exponents, weights):
            counts[e % m] += w
    return Cyclo.from_lift(m, counts)


# ---------------------------------------------------------------------------
# Matrices over Q(zeta_m)
# ---------------------------------------------------------------------------

_EXACT_FLOAT = 2 ** 52
_EXACT_INT64 = 2 ** 62


def _content(arr: np.ndarray) -> int:
    g = 0
    for v in np.unique(np.abs(arr)):
        g = gcd(g, int(v))
        if g == 1:
            break
    return g


class CycloMatrix:
    """Matrix over Q(zeta_m) as ``num[j] / den`` on the powers zeta^j, j < m.

    ``num`` is kept canonical (only the first phi(m) slices may be nonzero),
    so equality is a plain array comparison.
    """

    def __init__(self, m: int, num: np.ndarray, den: int = 1, canonical: bool = False):
        if num.ndim != 3 or num.shape[0] != m:
            raise ValueError("numerator array must have shape (m, rows, cols)")
        self.m = m
        if not canonical:
            num = self._canonicalize(m, num)
        if den < 0:
            num, den = -num, -den
        g = gcd(_content(num), den) if num.size else den
        if g > 1:
            num = num // g
            den //= g
        self.num = num
        self.den = int(den)

    @staticmethod
    def _canonicalize(m: int, num: np.ndarray) -> np.ndarray:
        table = _reduction_table(m)
        if num.dtype != object and np.abs(num).max(initial=0) * m * np.abs(table).max() >= _EXACT_INT64:
            num = num.astype(object)
            table = table.astype(object)
        red = np.tensordot(table.T, num, axes=(1, 0))  # (phi, r, c)
        out = np.zeros_like(num)
        out[: red.shape[0]] = red
        return out

    # constructors -----------------------------------------------------------
    @classmethod
    def from_entries(cls, m: int, rows: Sequence[Sequence[Cyclo]]) -> "CycloMatrix":
        nr, nc = len(rows), len(rows[0])
        den = 1
        for row in rows:
            for x in row:
                for c in x.coeffs:
                    den = lcm(den, c.denominator)
        num = np.zeros((m, nr, nc), dtype=np.int64)
        for i, row in enumerate(rows):
            for j, x in enumerate(row):
                if x.m != m:
                    raise ValueError("modulus mismatch")
                for k, c in enumerate(x.coeffs):
                    num[k, i, j] = int(c * den)
        return cls(m, num, den, canonical=True)

    @classmethod
    def diagonal(cls, entries: Sequence[Cyclo]) -> "CycloMatrix":
        m = entries[0].m
        n = len(entries)
        rows = [[entries[i] if i == j else Cyclo.zero(m) for j in range(n)] for i in range(n)]
        return cls.from_entries(m, rows)

    @classmethod
    def identity(cls, m: int, n: int) -> "CycloMatrix":
        num = np.zeros((m, n, n), dtype=np.int64)
        num[0] = np.eye(n, dtype=np.int64)
        return cls(m, num, 1, canonical=True)

    @classmethod
    def from_root_exponents(cls, m: int, exps: np.ndarray, weights: np.ndarray | None = None,
                            den: int = 1) -> "CycloMatrix":
        """Entry (i, j) = weights[i, j] * zeta^exps[i, j] / den."""
        nr, nc = exps.shape
        num = np.zeros((m, nr, nc), dtype=np.int64)
        w = np.ones((nr, nc), dtype=np.int64) if weights is None else weights.astype(np.int64)
        ii, jj = np.indices((nr, nc))
        np.add.at(num, (exps % m, ii, jj), w)
        return cls(m, num, den)

    # shape / access ---------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return self.num.shape[1], self.num.shape[2]

    def entry(self, i: int, j: int) -> Cyclo:
        d = euler_phi(self.m)
        return Cyclo(self.m, tuple(Fraction(int(self.num[k, i, j]), self.den) for k in range(d)))

    def to_complex(self) -> np.ndarray:
        z = np.exp(2j * np.pi * np.arange(self.m) / self.m)
        return np.tensordot(z, self.num.astype(float), axes=(0, 0)) / self.den

    def transpose(self) -> "CycloMatrix":
        return CycloMatrix(self.m, self.num.transpose(0, 2, 1).copy(), self.den, canonical=True)

    def galois(self, a: int) -> "CycloMatrix":
        out = np.zeros_like(self.num)
        for j in range(self.m):
            out[(a * j) % self.m] += self.num[j]
        return CycloMatrix(self.m, out, self.den)

    def conj(self) -> "CycloMatrix":
        return self.galois(-1)

    def embed(self, m2: int) -> "CycloMatrix":
        if m2 % self.m:
            raise ValueError("cannot embed")
        step = m2 // self.m
        out = np.zeros((m2,) + self.shape, dtype=self.num.dtype)
        out[::step] = self.num
        return CycloMatrix(m2, out, self.den)

    def scale(self, x: Cyclo) -> "CycloMatrix":
        if x.m != self.m:
            raise ValueError("modulus mismatch")
        den = 1
        for c in x.coeffs:
            den = lcm(den, c.denominator)
        out = np.zeros_like(self.num, dtype=object if self.num.dtype == object else np.int64)
        for k, c in enumerate(x.coeffs):
            ck = int(c * den)
            if ck:
                for j in range(self.m):
                    if self.num[j].any():
                        out[(j + k) % self.m] += ck * self.num[j]
        return CycloMatrix(self.m, out, self.den * den)

    # algebra ----------------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, CycloMatrix):
            return NotImplemented
        if self.m != other.m or self.shape != other.shape:
            return False
        return self.den == other.den and np.array_equal(self.num, other.num)

    def __hash__(self):
        return hash((self.m, self.den, self.num.tobytes()))

    def __add__(self, other: "CycloMatrix") -> "CycloMatrix":
        den = lcm(self.den, other.den)
        num = self.num * (den // self.den) + other.num * (den // other.den)
        return CycloMatrix(self.m, num, den, canonical=True)

    def __sub__(self, other: "CycloMatrix") -> "CycloMatrix":
        den = lcm(self.den, other.den)
        num = self.num * (den // self.den) - other.num * (den // other.den)
        return CycloMatrix(self.m, num, den, canonical=True)

    def __matmul__(self, other: "CycloMatrix") -> "CycloMatrix":
        if self.m != other.m:
            raise ValueError("modulus mismatch")
        if self.shape[1] != other.shape[0]:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        m = self.m
        ia = [j for j in range(m) if self.num[j].any()]
        ib = [j for j in range(m) if other.num[j].any()]
        nr, nc = self.shape[0], other.shape[1]
        amax = int(np.abs(self.num).max(initial=0))
        bmax = int(np.abs(other.num).max(initial=0))
        bound = amax * bmax * self.shape[1] * max(1, min(len(ia), len(ib)))
        if bound < _EXACT_FLOAT and self.num.dtype != object and other.num.dtype != object:
            acc = np.zeros((m, nr, nc), dtype=np.float64)
            a = {j: self.num[j].astype(np.float64) for j in ia}
            b = {j: other.num[j].astype(np.float64) for j in ib}
            for i in ia:
                for j in ib:
                    acc[(i + j) % m] += a[i] @ b[j]
            out = np.rint(acc).astype(np.int64)
        else:
            out = np.zeros((m, nr, nc), dtype=object)
            a = {j: self.num[j].astype(object) for j in ia}
            b = {j: other.num[j].astype(object) for j in ib}
            for i in ia:
                for j in ib:
                    out[(i + j) % m] += a[i].dot(b[j])
        return CycloMatrix(m, out, self.den * other.den)

    def __pow__(self, n: int) -> "CycloMatrix":
        if n < 0:
            raise ValueError("negative powers not supported")
        out = CycloMatrix.identity(self.m, self.shape[0])
        base = self
        while n:
            if n & 1:
                out = out @ base
            n >>= 1
            if n:
                base = base @ base
        return out

    def is_identity(self) -> bool:
        return self == CycloMatrix.identity(self.m, self.shape[0])

    def __repr__(self):
        return f"CycloMatrix(m={self.m}, shape={self.shape}, den={self.den})"


# ---------------------------------------------------------------------------
# q-expansions
# ---------------------------------------------------------------------------

DEFAULT_TERMS = 100


@dataclass(frozen=True)
class QExp:
    """q^offset * sum_{n=0}^{trunc} coeffs[n] q^n + O(q^(offset+trunc+1))."""

    offset: Fraction
    coeffs: tuple

    def __post_init__(self):
        if not self.coeffs:
            raise ValueError("a q-expansion needs at least one valid coefficient")
        object.__setattr__(self, "offset", as_fraction(self.offset))
        object.__setattr__(self, "coeffs", tuple(as_fraction(c) for c in self.coeffs))

    @property
    def trunc(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def monomial(cls, offset, trunc: int, c=1) -> "QExp":
        return cls(offset, (as_fraction(c),) + (Fraction(0),) * trunc)

    def __getitem__(self, n: int) -> Fraction:
        if n < 0 or n > self.trunc:
            raise IndexError(f"coefficient {n} outside the valid range 0..{self.trunc}")
        return self.coeffs[n]

    def coefficient_at(self, exponent) -> Fraction:
        d = as_fraction(exponent) - self.offset
        if d.denominator != 1:
            raise ValueError(f"exponent {exponent} is off the grid offset+Z")
        if d < 0:
            return Fraction(0)
        return self[int(d)]

    def valuation(self) -> int | None:
        for n, c in enumerate(self.coeffs):
            if c:
                return n
        return None

    def leading_exponent(self) -> Fraction | None:
        v = self.valuation()
        return None if v is None else self.offset + v

    def truncate(self, n: int) -> "QExp":
        if n > self.trunc:
            raise ValueError(f"cannot extend valid range {self.trunc} to {n}")
        return QExp(self.offset, self.coeffs[: n + 1])

    def realign(self, offset) -> "QExp":
        """Same series written with a different (integrally shifted) leading slot."""
        offset = as_fraction(offset)
        d = offset - self.offset
        if d.denominator != 1:
            raise ValueError("realign needs an integral shift")
        d = int(d)
        if d <= 0:
            return QExp(offset, (Fraction(0),) * (-d) + self.coeffs)
        if d > self.trunc + 1:
            raise ValueError("shift leaves no valid coefficients")
        if any(self.coeffs[:d]):
            raise ValueError("nonzero coefficients below the requested offset")
        return QExp(offset, self.coeffs[d:])

    def shift(self, e) -> "QExp":
        """Multiply by q^e."""
        return QExp(self.offset + as_fraction(e), self.coeffs)

    def __add__(self, other: "QExp") -> "QExp":
        if (self.offset - other.offset).denominator != 1:
            raise ValueError("cannot add series on different exponent grids")
        off = min(self.offset, other.offset)
        end = min(self.offset + self.trunc, other.offset + other.trunc)
        n = int(end - off)
        if n < 0:
            raise ValueError("no common valid range")
        a, b = self.realign(off), other.realign(off)
        return QExp(off, tuple(a.coeffs[i] + b.coeffs[i] for i in range(n + 1)))

    def __neg__(self):
        return QExp(self.offset, tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, QExp):
            q = as_fraction(other)
            return QExp(self.offset, tuple(c * q for c in self.coeffs))
        return qexp_mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "QExp":
        if n < 0:
            return self.inverse() ** (-n)
        out = QExp.monomial(0, self.trunc)
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def inverse(self) -> "QExp":
        v = self.valuation()
        if v is None:
            raise ZeroDivisionError("inverse of a series with no nonzero coefficient in range")
        s = QExp(self.offset + v, self.coeffs[v:])
        inv = _series_inverse(list(s.coeffs))
        return QExp(-s.offset, tuple(inv))

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, QExp):
            return NotImplemented
        return self.offset == other.offset and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.offset, self.coeffs))

    def __repr__(self):
        head = ", ".join(fmt_rational(c) for c in self.coeffs[:6])
        return f"QExp(q^{fmt_rational(self.offset)} * [{head}{', ...' if self.trunc > 5 else ''}] + O(q^{self.trunc + 1}))"


def _series_inverse(c: list) -> list:
    n = len(c)
    inv = [Fraction(0)] * n
    inv[0] = 1 / c[0]
    for k in range(1, n):
        s = Fraction(0)
        for j in range(1, k + 1):
            if c[j]:
                s += c[j] * inv[k - j]
        inv[k] = -s * inv[0]
    return inv


def _int_convolve(a: Sequence[int], b: Sequence[int], n: int) -> list[int]:
    out = [0] * n
    for i, x in enumerate(a[:n]):
        if x:
            for j, y in enumerate(b[: n - i]):
                if y:
                    out[i + j] += x * y
    return out


def qexp_mul(a: QExp, b: QExp) -> QExp:
    n = min(a.trunc, b.trunc) + 1
    da = lcm(*(c.denominator for c in a.coeffs[:n]))
    db = lcm(*(c.denominator for c in b.coeffs[:n]))
    ia = [int(c * da) for c in a.coeffs[:n]]
    ib = [int(c * db) for c in b.coeffs[:n]]
    prod = _int_convolve(ia, ib, n)
    den = da * db
    return QExp(a.offset + b.offset, tuple(Fraction(p, den) for p in prod))


@lru_cache(maxsize=64)
def _eta_product_coeffs(m: int, n_terms: int) -> tuple[int, ...]:
    # prod_{n>=1} (1 - q^n)^m, m > 0, first n_terms coefficients
    c = [0] * n_terms
    c[0] = 1
    for n in range(1, n_terms):
        for _ in range(m):
            for i in range(n_terms - 1, n - 1, -1):
                c[i] -= c[i - n]
    return tuple(c)


@lru_cache(maxsize=64)
def eta_power(m: int, N: int = DEFAULT_TERMS) -> QExp:
    """q-expansion of eta^m to N+1 coefficients, leading exponent m/24."""
    if N < 0:
        raise ValueError("N must be non-negative")
    if m == 0:
        return QExp.monomial(0, N)
    if m > 0:
        return QExp(Fraction(m, 24), _eta_product_coeffs(m, N + 1))
    pos = _eta_product_coeffs(-m, N + 1)
    inv = _series_inverse([Fraction(x) for x in pos])
    return QExp(Fraction(m, 24), tuple(inv))


class VectorQExp(tuple):
    """Tuple of q-expansions indexed r = 1..l-1 (stored at positions 0..l-2)."""

    def component(self, r: int) -> QExp:
        return self[r - 1]

    @property
    def l(self) -> int:
        return len(self) + 1

    @property
    def trunc(self) -> int:
        return min(c.trunc for c in self)
