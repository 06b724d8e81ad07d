from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

from src.chains.box import BoxPoint, BoxSpace
from src.fibred.certificate import (
    CertificateView,
    Condition1Report,
    FibredCCE,
    OverlapFailure,
    OverlapWitness,
    subset_level,
)
from src.fibred.verifier import verify_condition1, verify_condition2
from src.services.management.exceptions import CertificateError, PreconditionError, ScopeError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BoxRegion:
    """Bounded-or-not subset of a box space: whole components, d'-balls and single points"""
    components: frozenset[int] = frozenset()
    balls: tuple[tuple[BoxPoint, int], ...] = ()
    points: frozenset[BoxPoint] = frozenset()

    def contains(self, space: BoxSpace, p: BoxPoint) -> bool:
        if p.level in self.components or p in self.points:
            return True
        return any(space.distance(center, p) <= radius for center, radius in self.balls)

    def meets_component(self, space: BoxSpace, n: int) -> bool:
        if n in self.components or any(p.level == n for p in self.points):
            return True
        for center, radius in self.balls:
            if center.level == n:
                return True
            # closest point of component n is its identity coset
            if space.length(center) + center.level + n <= radius:
                return True
        return False

    def is_bounded(self, space: BoxSpace) -> bool:
        return all(space.component(n).is_bounded for n in self.components)

    @property
    def is_empty(self) -> bool:
        return not (self.components or self.balls or self.points)


@dataclass(frozen=True)
class TransferFailure:
    reason: str
    levels: tuple[int, ...] = field(default_factory=tuple)


class BoxSpaceCertificate:
    """
    Fibred coarse embedding of a single box space: fibres, section and
    trivializations of a family certificate, with a bounded region K_r excluded
    per radius instead of a finite subfamily.
    """

    def __init__(self, space: BoxSpace, oracle: FibredCCE, region: Callable[[int], BoxRegion]):
        self.space = space
        self.oracle = oracle
        self._region = region

    @property
    def controls(self):
        return self.oracle.controls

    @property
    def scope(self):
        return self.oracle.scope

    def region(self, r: int) -> BoxRegion:
        if not 1 <= r <= self.scope.max_radius:
            raise ScopeError(f"Radius {r} is outside the certified range 1..{self.scope.max_radius}")
        return self._region(r)

    def _check(self, r: int, subset: Sequence[BoxPoint]) -> int:
        region = self.region(r)
        for p in subset:
            if region.contains(self.space, p):
                raise ScopeError(f"{p} lies in the excluded region at radius {r}")
        diameter = max((self.space.distance(p, q) for p in subset for q in subset), default=0)
        if diameter >= r:
            raise PreconditionError(f"Subset has diameter {diameter}, not below r={r}")
        try:
            return subset_level(subset)
        except PreconditionError as exc:
            raise CertificateError("A small subset outside K_r spans several components") from exc


def verify_box_condition1(cert: BoxSpaceCertificate, r: int, subset: Sequence[BoxPoint]) -> Condition1Report:
    level = cert._check(r, subset)
    return verify_condition1(_unexcluded(cert.oracle), level, r, subset)


def verify_box_condition2(
    cert: BoxSpaceCertificate, r: int, subset1: Sequence[BoxPoint], subset2: Sequence[BoxPoint]
) -> OverlapWitness | OverlapFailure:
    level = cert._check(r, subset1)
    if cert._check(r, subset2) != level:
        raise PreconditionError("Subsets do not overlap")
    return verify_condition2(_unexcluded(cert.oracle), level, r, subset1, subset2)


def _unexcluded(oracle: FibredCCE) -> FibredCCE:
    # the region check already happened in box-space terms
    return CertificateView(oracle, exclusion=lambda r: frozenset(), label="box-space")


def boxspace_to_family(cert: BoxSpaceCertificate, space: BoxSpace) -> FibredCCE:
    """Exclude every component that K_r meets; only finitely many can meet a bounded set"""
    for r in range(1, cert.scope.max_radius + 1):
        if not cert.region(r).is_bounded(space):
            raise CertificateError(f"K_{r} is unbounded in the box space")

    def exclusion(r: int) -> frozenset[int]:
        region = cert.region(r)
        return frozenset(n for n in space.levels if region.meets_component(space, n))

    return CertificateView(cert.oracle, exclusion=exclusion, label="from-box-space")


def low_levels(space: BoxSpace, r: int) -> frozenset[int]:
    """Levels below ceil((r - 1) / 2); distinct levels above it are at distance >= r"""
    bound = r // 2
    return frozenset(n for n in space.levels if n < bound)


def family_to_boxspace(emb: FibredCCE, space: BoxSpace) -> BoxSpaceCertificate | TransferFailure:
    """K_r = union of the excluded components, plus the low levels where components sit closer than r"""
    unbounded = tuple(n for n in space.levels if not space.component(n).is_bounded)
    if unbounded:
        logger.info("Box-space transfer refused: unbounded components %s", unbounded)
        return TransferFailure(reason="box family has unbounded components", levels=unbounded)

    def region(r: int) -> BoxRegion:
        return BoxRegion(components=frozenset(emb.exclusion(r)) | low_levels(space, r))

    return BoxSpaceCertificate(space, emb, region)
