from __future__ import annotations

import itertools
import logging
from abc import ABC, abstractmethod
from collections.abc import Callable
from fractions import Fraction
from functools import lru_cache

from src.groups.base import Group
from src.groups.catalog import FiniteAbelian, Heisenberg, IntLattice
from src.groups.elements import GroupElement
from src.services.management.exceptions import ConfigParseError, ConfigurationError, PreconditionError

logger = logging.getLogger(__name__)


class MeanProvider(ABC):
    """Right-invariant averaging on a quotient group, exact or approximate"""

    mode: str = ""

    @abstractmethod
    def support(self, quotient: Group) -> tuple[GroupElement, ...]:
        ...

    def average(self, quotient: Group, fn: Callable[[GroupElement], Fraction]) -> Fraction:
        points = self.support(quotient)
        return sum((Fraction(fn(t)) for t in points), Fraction(0)) / len(points)

    def defect(self, quotient: Group, g: GroupElement) -> Fraction:
        """|F delta Fg| / |F| for the averaging set F"""
        points = self.support(quotient)
        members = set(points)
        moved = {quotient.multiply(t, g) for t in points}
        return Fraction(len(members ^ moved), len(members))

    @property
    def label(self) -> str:
        return self.mode


class UniformMean(MeanProvider):
    """Exact average over a finite quotient"""

    mode = "uniform"

    def support(self, quotient: Group) -> tuple[GroupElement, ...]:
        if not quotient.is_finite:
            raise PreconditionError(f"Uniform mean needs a finite quotient, got {quotient.signature}")
        return quotient.elements()

    def defect(self, quotient: Group, g: GroupElement) -> Fraction:
        return Fraction(0)


class FoelnerMean(MeanProvider):
    """
    Average over a Foelner box F_N: {|x|, |y| <= N, |z| <= N^2} in Heisenberg
    coordinates, {|x_i| <= N} for lattices. Finite groups use the whole group.
    """

    mode = "foelner"

    def __init__(self, size: int):
        if size < 1:
            raise ConfigurationError("Foelner box size must be >= 1")
        self.size = size

    @property
    def label(self) -> str:
        return f"foelner:{self.size}"

    def support(self, quotient: Group) -> tuple[GroupElement, ...]:
        return _foelner_box(quotient, self.size)


@lru_cache(maxsize=32)
def _foelner_box(quotient: Group, size: int) -> tuple[GroupElement, ...]:
    n = size
    if isinstance(quotient, Heisenberg):
        span, height = range(-n, n + 1), range(-n * n, n * n + 1)
        box = [quotient.element(x, y, z) for x in span for y in span for z in height]
    elif isinstance(quotient, IntLattice):
        box = [quotient.element(*c) for c in itertools.product(range(-n, n + 1), repeat=quotient.rank)]
    elif isinstance(quotient, FiniteAbelian):
        box = list(quotient.elements())
    else:
        raise ConfigurationError(f"No Foelner boxes are known for {quotient.signature}")
    logger.debug("Foelner box of size %d in %s has %d elements", n, quotient.signature, len(box))
    return tuple(box)


def parse_mean(spec: str) -> MeanProvider:
    """`uniform` or `foelner:N`"""
    text = spec.strip().lower()
    if text == "uniform":
        return UniformMean()
    name, _, size = text.partition(":")
    if name == "foelner":
        try:
            return FoelnerMean(int(size))
        except ValueError as exc:
            raise ConfigParseError(f"Malformed Foelner size in '{spec}'") from exc
    raise ConfigParseError(f"Unknown mean mode '{spec}'")
