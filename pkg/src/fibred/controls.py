from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass
from fractions import Fraction

from src.services.management.exceptions import InputError, ScopeError


@dataclass(frozen=True)
class MonotoneTable:
    """Non-decreasing function on the integers 0..max_argument"""
    values: tuple[Fraction, ...]
    name: str = ""

    def __post_init__(self):
        if not self.values:
            raise InputError(f"Control table '{self.name}' is empty")
        for left, right in zip(self.values, self.values[1:]):
            if right < left:
                raise InputError(f"Control table '{self.name}' is not non-decreasing")

    @classmethod
    def from_values(cls, values: Iterable[int | Fraction], name: str = "") -> MonotoneTable:
        return cls(tuple(Fraction(v) for v in values), name)

    @classmethod
    def from_function(cls, fn, max_argument: int, name: str = "") -> MonotoneTable:
        return cls.from_values((fn(t) for t in range(max_argument + 1)), name)

    @property
    def max_argument(self) -> int:
        return len(self.values) - 1

    def covers(self, t: int | Fraction, rounding: str = "floor") -> bool:
        return 0 <= _round(t, rounding) <= self.max_argument

    def __call__(self, t: int | Fraction, rounding: str = "floor") -> Fraction:
        index = _round(t, rounding)
        if not 0 <= index <= self.max_argument:
            raise ScopeError(f"Argument {t} outside control table '{self.name}' (0..{self.max_argument})")
        return self.values[index]

    def compose(self, inner: MonotoneTable, rounding: str = "floor") -> MonotoneTable:
        """
        self o inner on the longest prefix of inner's domain that self covers.
        Lower controls round down and upper controls round up.
        """
        composed = []
        for value in inner.values:
            if not self.covers(value, rounding):
                break
            composed.append(self(value, rounding))
        if not composed:
            raise ScopeError(f"Composition {self.name} o {inner.name} has an empty domain")
        return MonotoneTable(tuple(composed), f"{self.name}o{inner.name}")

    def squared(self) -> MonotoneTable:
        return MonotoneTable(tuple(v * v for v in self.values), f"{self.name}^2")

    def lowered(self, amount: int | Fraction) -> MonotoneTable:
        """Shift down by `amount`, clamped at zero; used to corrupt upper controls"""
        return MonotoneTable(tuple(max(Fraction(0), v - amount) for v in self.values), self.name)

    def truncated(self, max_argument: int) -> MonotoneTable:
        if max_argument > self.max_argument:
            raise ScopeError(f"Cannot extend '{self.name}' beyond {self.max_argument}")
        return MonotoneTable(self.values[: max_argument + 1], self.name)

    def reaches(self, threshold: int | Fraction) -> bool:
        """Unboundedness proxy: the value at the largest certified argument reaches the threshold"""
        return self.values[-1] >= threshold


def _round(t: int | Fraction, rounding: str) -> int:
    if isinstance(t, int):
        return t
    if rounding == "ceil":
        return math.ceil(t)
    return math.floor(t)


@dataclass(frozen=True)
class ControlPair:
    """
    Squared controls: lower_sq(t) = rho_1(t)^2 and upper_sq(t) = rho_2(t)^2.
    Distances in Hilbert space are compared through their squares so that
    everything stays rational.
    """
    lower_sq: MonotoneTable
    upper_sq: MonotoneTable
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        span = min(self.lower_sq.max_argument, self.upper_sq.max_argument)
        for t in range(span + 1):
            if self.lower_sq(t) > self.upper_sq(t):
                raise InputError(f"Lower control exceeds upper control at {t}")

    @property
    def max_argument(self) -> int:
        return min(self.lower_sq.max_argument, self.upper_sq.max_argument)

    def sandwich(self, d: int, dist_sq: Fraction) -> bool:
        return self.lower_sq(d) <= dist_sq <= self.upper_sq(d, "ceil")

    def pulled_back(self, m: MonotoneTable, big_m: MonotoneTable) -> ControlPair:
        """(rho_1 o m, rho_2 o M)"""
        return ControlPair(
            lower_sq=self.lower_sq.compose(m, "floor"),
            upper_sq=self.upper_sq.compose(big_m, "ceil"),
            notes=self.notes + (f"pulled back along m={m.name}, M={big_m.name}",),
        )

    def with_upper(self, upper_sq: MonotoneTable) -> ControlPair:
        """Replace the upper control without re-validating the pair"""
        return ControlPair.unchecked(self.lower_sq, upper_sq, self.notes)

    @classmethod
    def unchecked(
        cls, lower_sq: MonotoneTable, upper_sq: MonotoneTable, notes: tuple[str, ...] = ()
    ) -> ControlPair:
        pair = object.__new__(cls)
        object.__setattr__(pair, "lower_sq", lower_sq)
        object.__setattr__(pair, "upper_sq", upper_sq)
        object.__setattr__(pair, "notes", notes)
        return pair
