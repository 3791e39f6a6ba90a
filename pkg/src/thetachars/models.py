"""Catalog of the five rational W-algebra models and their theta-side data."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

F = Fraction


class ModelNotSupported(LookupError):
    pass


@dataclass(frozen=True)
class ModelSpec:
    name: str
    label: str
    c: Fraction
    H: tuple
    l: int
    k: int
    delta_table: Fraction
    dim_table: int
    span_ideals: tuple  # ideals whose theta series span M_k(rho_l)
    lie: str | None  # "composite:G2", "fkw:B2:11:6" (root system, p, q), or None

    def __post_init__(self):
        if len(self.H) != self.l - 1:
            raise ValueError(f"{self.name}: |H_c| = {len(self.H)}, expected {self.l - 1}")
        if self.delta != self.delta_table:
            raise ValueError(f"{self.name}: delta = {self.delta}, catalog lists {self.delta_table}")

    @property
    def c_tilde(self) -> Fraction:
        return self.c - 24 * min(self.H)

    @property
    def delta(self) -> Fraction:
        return F(self.k, 12) - self.c_tilde / 24

    @property
    def nu(self) -> int:
        return self.k - 2

    def h_offset(self, h) -> Fraction:
        """Leading exponent h - c/24 of the character with conformal dimension h."""
        return F(h) - self.c / 24


def _H(scale, nums):
    return tuple(F(n) * scale for n in nums)


MODELS = {
    m.name: m
    for m in (
        ModelSpec("WG2", "W_G2(2,1^14)", F(-8, 5), _H(F(1, 5), (0, -1, 1, 2)), 5, 4, F(1, 5), 1,
                  ("O",), "composite:G2"),
        ModelSpec("WF4", "W_F4(2,1^26)", F(4, 5), _H(F(1, 5), (0, -1, 2, 3)), 5, 10, F(3, 5), 3,
                  ("O",), "composite:F4"),
        ModelSpec("W24", "W(2,4)", F(-444, 11), _H(F(-1, 11), (0, 9, 10, 12, 14, 15, 16, 17, 18, 19)),
                  11, 6, F(5, 11), 5, ("O",), "fkw:B2:11:6"),
        ModelSpec("W26", "W(2,6)", F(-1420, 17),
                  _H(F(-1, 17), (0, 27, 30, 37, 39, 46, 48, 49, 50, 52, 53, 55, 57, 58, 59, 60)),
                  17, 2, F(2, 17), 2, ("O", "Op"), "fkw:G2:17:12"),
        ModelSpec("W28", "W(2,8)", F(-3164, 23),
                  _H(F(-1, 23), (0, 54, 67, 81, 91, 94, 98, 103, 111, 112, 116, 118, 119, 120, 122, 124,
                                 125, 129, 130, 131, 132, 133)),
                  23, 10, F(18, 23), 17, ("O",), None),
    )
}


def get_model(name: str) -> ModelSpec:
    try:
        return MODELS[name]
    except KeyError:
        raise KeyError(f"unknown model {name!r}; choose from {', '.join(MODELS)}") from None
