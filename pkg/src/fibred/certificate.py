from __future__ import annotations

from abc import ABC, abstractmethod
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from src.chains.box import BoxFamily, BoxPoint
from src.fibred.controls import ControlPair
from src.hilbert.isometries import AffineIsometry
from src.hilbert.vectors import HilbertVec
from src.services.management.exceptions import PreconditionError, ScopeError

FibrePoint = Any


@dataclass(frozen=True)
class CertificateScope:
    """Radii 1..max_radius and the component levels the certificate speaks about"""
    max_radius: int
    levels: tuple[int, ...]

    def check(self, level: int, r: int) -> None:
        if not 1 <= r <= self.max_radius:
            raise ScopeError(f"Radius {r} is outside the certified range 1..{self.max_radius}")
        if level not in self.levels:
            raise ScopeError(f"Level {level} is outside the certified levels {list(self.levels)}")


class Trivialization(ABC):
    """t_C: fibrewise isometries Y_x -> H for x in the subset C"""

    subset: tuple[BoxPoint, ...]

    @abstractmethod
    def apply(self, x: BoxPoint, p: FibrePoint) -> HilbertVec:
        ...

    @abstractmethod
    def inverse(self, x: BoxPoint, v: HilbertVec) -> FibrePoint:
        ...


class FibredCCE(ABC):
    """
    Fibred cofinitely-coarse embedding of a box family into Hilbert space:
    a section of a field of Hilbert fibres, trivializations over subsets of
    diameter < r outside the finite exclusion list, and squared controls.
    """

    family: BoxFamily
    controls: ControlPair
    scope: CertificateScope

    @abstractmethod
    def exclusion(self, r: int) -> frozenset[int]:
        """Levels of the finite subfamily excluded at radius r"""

    @abstractmethod
    def section(self, x: BoxPoint) -> FibrePoint:
        ...

    @abstractmethod
    def fibre_distance_sq(self, x: BoxPoint, p: FibrePoint, q: FibrePoint) -> Fraction:
        ...

    @abstractmethod
    def trivialize(self, subset: Sequence[BoxPoint], r: int) -> Trivialization:
        ...

    @property
    def constructor(self) -> dict[str, Any]:
        """Named constructor recorded in manifests"""
        return {}

    def check_scope(self, level: int, r: int) -> None:
        self.scope.check(level, r)
        if level in self.exclusion(r):
            raise ScopeError(f"Level {level} belongs to the excluded subfamily at radius {r}")

    def diameter(self, subset: Sequence[BoxPoint]) -> int:
        return max((self.family.distance(p, q) for p in subset for q in subset), default=0)


class CertificateView(FibredCCE):
    """
    A certificate sharing fibres, section and trivializations with `base`
    while overriding controls, exclusions or scope.
    """

    def __init__(
        self,
        base: FibredCCE,
        controls: ControlPair | None = None,
        exclusion: Callable[[int], frozenset[int]] | None = None,
        scope: CertificateScope | None = None,
        label: str = "",
    ):
        self.base = base
        self.family = base.family
        self.controls = controls or base.controls
        self.scope = scope or base.scope
        self._exclusion = exclusion
        self.label = label

    def exclusion(self, r: int) -> frozenset[int]:
        if self._exclusion is None:
            return self.base.exclusion(r)
        return self._exclusion(r)

    def section(self, x: BoxPoint) -> FibrePoint:
        return self.base.section(x)

    def fibre_distance_sq(self, x: BoxPoint, p: FibrePoint, q: FibrePoint) -> Fraction:
        return self.base.fibre_distance_sq(x, p, q)

    def trivialize(self, subset: Sequence[BoxPoint], r: int) -> Trivialization:
        return self.base.trivialize(subset, r)

    @property
    def constructor(self) -> dict[str, Any]:
        return self.base.constructor


@dataclass(frozen=True)
class OverlapWitness:
    """The common map t_C1(x) o t_C2(x)^-1, recorded on the sample vectors"""
    subset1: tuple[BoxPoint, ...]
    subset2: tuple[BoxPoint, ...]
    samples: tuple[HilbertVec, ...]
    images: tuple[HilbertVec, ...]
    residual: Fraction = Fraction(0)
    transition: AffineIsometry | None = field(default=None, compare=False)

    @property
    def translation(self) -> HilbertVec:
        """Image of the origin"""
        return self.images[0]

    @property
    def is_identity(self) -> bool:
        return all(p == q for p, q in zip(self.samples, self.images))


@dataclass(frozen=True)
class OverlapFailure:
    reason: str
    offending: BoxPoint | None = None
    reference: BoxPoint | None = None
    sample: HilbertVec | None = None
    residual: Fraction = Fraction(0)


@dataclass
class PairRecord:
    x: BoxPoint
    y: BoxPoint
    distance: int
    dist_sq: Fraction
    lower_sq: Fraction
    upper_sq: Fraction

    @property
    def ok(self) -> bool:
        return self.lower_sq <= self.dist_sq <= self.upper_sq


@dataclass
class Condition1Report:
    level: int
    radius: int
    subset: tuple[BoxPoint, ...]
    pairs: list[PairRecord] = field(default_factory=list)
    isometry_failures: list[str] = field(default_factory=list)

    @property
    def violations(self) -> list[PairRecord]:
        return [pair for pair in self.pairs if not pair.ok]

    @property
    def ok(self) -> bool:
        return not self.violations and not self.isometry_failures

    def distance_matrix(self) -> list[list[Fraction]]:
        index = {x: i for i, x in enumerate(self.subset)}
        matrix = [[Fraction(0)] * len(self.subset) for _ in self.subset]
        for pair in self.pairs:
            i, j = index[pair.x], index[pair.y]
            matrix[i][j] = matrix[j][i] = pair.dist_sq
        return matrix


def subset_level(subset: Sequence[BoxPoint]) -> int:
    if not subset:
        raise PreconditionError("Subset must be non-empty")
    levels = {x.level for x in subset}
    if len(levels) != 1:
        raise PreconditionError(f"Subset spans several components: {sorted(levels)}")
    return next(iter(levels))
