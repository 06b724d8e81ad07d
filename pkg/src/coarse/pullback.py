from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from fractions import Fraction
from typing import Any

from src.chains.box import BoxPoint
from src.coarse.maps import CoarseMap, CoarseMapFamily
from src.fibred.certificate import CertificateScope, FibredCCE, FibrePoint, Trivialization, subset_level
from src.hilbert.vectors import HilbertVec
from src.services.management.exceptions import ConfigurationError, ScopeError

logger = logging.getLogger(__name__)


class PulledTrivialization(Trivialization):
    """t~_C = t_f(C) o f"""

    def __init__(self, target: Trivialization, f: CoarseMap, subset: tuple[BoxPoint, ...]):
        self.target = target
        self.f = f
        self.subset = subset

    def apply(self, x: BoxPoint, p: FibrePoint) -> HilbertVec:
        return self.target.apply(self.f(x), p)

    def inverse(self, x: BoxPoint, v: HilbertVec) -> FibrePoint:
        return self.target.inverse(self.f(x), v)


class PullbackCertificate(FibredCCE):
    """
    Certificate on the source family of a coarse embedding: fibres and
    section are read off the target through the maps, subsets of diameter
    < r are trivialized by the target at radius M(r) + 1, and the excluded
    subfamily is the preimage of the target's at that radius.
    """

    def __init__(self, base: FibredCCE, maps: CoarseMapFamily, finiteness_bound: int):
        for n in {f.target_level for f in maps.maps}:
            incoming = len(maps.maps_into(n))
            if incoming > finiteness_bound:
                raise ConfigurationError(
                    f"Target level {n} is the codomain of {incoming} maps, more than {finiteness_bound}"
                )
            if n not in base.family.levels:
                raise ConfigurationError(f"Target level {n} is not part of the certified family")
        self.base = base
        self.maps = maps
        self.finiteness_bound = finiteness_bound
        self.family = maps.source
        self.controls = base.controls.pulled_back(maps.lower, maps.upper)

        max_radius = 0
        for r in range(1, min(maps.lower.max_argument, maps.upper.max_argument) + 1):
            if self.target_radius(r) > base.scope.max_radius:
                break
            max_radius = r
        if max_radius < 1:
            raise ScopeError(
                f"Target certificate radius {base.scope.max_radius} cannot host M(1) + 1 = {self.target_radius(1)}"
            )
        self.scope = CertificateScope(max_radius=max_radius, levels=self.family.levels)
        logger.info("Pullback along %s certified up to r=%d", maps.name, max_radius)

    def target_radius(self, r: int) -> int:
        """M(r) + 1"""
        return math.ceil(self.maps.upper(r)) + 1

    @property
    def constructor(self) -> dict[str, Any]:
        return {
            **self.base.constructor,
            **self.maps.origin,
            "pullback": self.maps.name,
            "finiteness_bound": self.finiteness_bound,
            "source_levels": list(self.family.levels),
        }

    def exclusion(self, r: int) -> frozenset[int]:
        if not 1 <= r <= self.scope.max_radius:
            raise ScopeError(f"Radius {r} is outside the certified range 1..{self.scope.max_radius}")
        return self.maps.preimage_levels(self.base.exclusion(self.target_radius(r)))

    def _image(self, x: BoxPoint) -> BoxPoint:
        return self.maps.primary(x.level)(x)

    def section(self, x: BoxPoint) -> FibrePoint:
        return self.base.section(self._image(x))

    def fibre_distance_sq(self, x: BoxPoint, p: FibrePoint, q: FibrePoint) -> Fraction:
        return self.base.fibre_distance_sq(self._image(x), p, q)

    def trivialize(self, subset: Sequence[BoxPoint], r: int) -> PulledTrivialization:
        ordered = tuple(sorted(set(subset)))
        level = subset_level(ordered)
        self.check_scope(level, r)
        f = self.maps.primary(level)
        images = tuple(sorted({f(x) for x in ordered}))
        target = self.base.trivialize(images, self.target_radius(r))
        return PulledTrivialization(target, f, ordered)


def pullback_fibred(emb: FibredCCE, fam: CoarseMapFamily, finiteness_bound: int) -> PullbackCertificate:
    return PullbackCertificate(emb, fam, finiteness_bound)
