"""End-to-end theta pipeline: ideal -> residue map -> moments -> solve -> characters."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache

from .arith import DEFAULT_TERMS
from .models import ModelSpec, get_model
from .quaternion import (IdealLattice, ResidueMap, build_algebra, left_ideal_Dp, maximal_order,
                         residue_map)
from .rho import Fl2, PhiTable, RhoRep, phi_table, rho_matrices
from .theta import (CharacterSet, MomentTable, SphericalPoly, ThetaSeries, component_shifts, cusp_solve,
                    extract_characters, independent_subset, linear_combination, moment_table,
                    span_rank, spherical_basis)

log = logging.getLogger(__name__)

RANK_TERMS = 10
RANK_STEP = 10


@lru_cache(maxsize=None)
def ideal(l: int, which: str) -> IdealLattice:
    A = build_algebra(l)
    O = maximal_order(A)
    if which == "O":
        return O
    if which == "Op":
        return left_ideal_Dp(A, O)
    raise ValueError(f"unknown ideal {which!r}")


@lru_cache(maxsize=None)
def residue(l: int, which: str) -> ResidueMap:
    return residue_map(ideal(l, which))


@lru_cache(maxsize=None)
def phi(l: int) -> PhiTable:
    return phi_table(Fl2(l))


@lru_cache(maxsize=None)
def rho(l: int) -> RhoRep:
    return rho_matrices(l)


@lru_cache(maxsize=None)
def polys(l: int, nu: int) -> tuple[SphericalPoly, ...]:
    return tuple(spherical_basis(build_algebra(l).gram, nu))


_TABLES: dict = {}


def moments(l: int, which: str, nu: int, N: int, threads: int = 1) -> MomentTable:
    """Moment table valid through N, reusing any longer table already computed."""
    for (key, n), table in _TABLES.items():
        if key == (l, which, nu) and n >= N:
            return table
    log.info("moments l=%d ideal=%s nu=%d N=%d", l, which, nu, N)
    table = moment_table(ideal(l, which), residue(l, which), phi(l), nu, N, threads)
    _TABLES[((l, which, nu), N)] = table
    return table


@dataclass(frozen=True)
class Candidate:
    which: str
    poly: SphericalPoly
    twist: int

    def theta(self, l: int, nu: int, N: int, threads: int = 1) -> ThetaSeries:
        t = moments(l, self.which, nu, N, threads)
        return ThetaSeries(t.ideal, self.poly, t.series(self.poly, N, self.twist), 2 + nu, self.twist)


def candidates(model: ModelSpec) -> list[Candidate]:
    """Every (ideal, spherical polynomial, choice of c0 up to scalars).

    Twists 0 and 1 suffice: the three twisted weights sum to zero.
    """
    return [Candidate(w, p, a) for w in model.span_ideals for a in (0, 1) for p in polys(model.l, model.nu)]


def full_terms(model: ModelSpec, N: int) -> int:
    return max(N + max(component_shifts(model, model.l, model.k).values()), RANK_TERMS + RANK_STEP)


@dataclass(frozen=True)
class Solved:
    model: ModelSpec
    basis: tuple  # ThetaSeries, a basis of the theta span
    rank: int
    coeffs: tuple  # integer combination of the basis vanishing to order delta
    theta: ThetaSeries  # the combination

    @property
    def N(self) -> int:
        return self.theta.trunc


def theta_basis(model: ModelSpec, N: int, threads: int = 1) -> tuple[list[ThetaSeries], int]:
    l, nu = model.l, model.nu
    Nfull = full_terms(model, N)
    for w in model.span_ideals:
        moments(l, w, nu, Nfull, threads)
    cands = candidates(model)
    short = [c.theta(l, nu, RANK_TERMS + RANK_STEP) for c in cands]
    rank = span_rank(short, RANK_TERMS, RANK_STEP)
    chosen = independent_subset(short, RANK_TERMS)
    basis = [cands[i].theta(l, nu, Nfull) for i in chosen]
    return basis, rank


_SOLVED: dict = {}


def solve(model: ModelSpec | str, N: int = DEFAULT_TERMS, threads: int = 1) -> Solved:
    model = get_model(model) if isinstance(model, str) else model
    if (model.name, N) in _SOLVED:
        return _SOLVED[model.name, N]
    basis, rank = theta_basis(model, N, threads)
    coeffs = cusp_solve(basis, model.delta)
    theta = linear_combination(basis, coeffs)
    out = _SOLVED[model.name, N] = Solved(model, tuple(basis), rank, tuple(coeffs), theta)
    return out


def characters(model: ModelSpec | str, N: int = DEFAULT_TERMS, threads: int = 1) -> CharacterSet:
    s = solve(model, N, threads)
    return extract_characters(s.model, s.theta, N)


def clear_caches() -> None:
    _TABLES.clear()
    _SOLVED.clear()
