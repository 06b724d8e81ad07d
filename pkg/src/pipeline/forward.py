from __future__ import annotations

import logging
import threading
from collections.abc import Iterable, Sequence
from fractions import Fraction
from typing import Any

from src.chains.box import BoxFamily, BoxPoint
from src.chains.chain import Chain, SeparationFailure, separation_certificate
from src.fibred.certificate import CertificateScope, FibredCCE, Trivialization, subset_level
from src.groups.base import Group
from src.groups.elements import GroupElement
from src.hilbert.cocycles import Cocycle, properness_profile
from src.hilbert.vectors import HilbertVec
from src.pipeline.fibres import FibreField, FibrePoint
from src.services.management.exceptions import (
    ConfigurationError,
    LiftError,
    PreconditionError,
    ScopeError,
)

logger = logging.getLogger(__name__)


class BasepointTrivialization(Trivialization):
    """t_C([a]) : [(x, y)] -> alpha(a_0 x^-1)(y), with a_0 the lift of [a] near the basepoint"""

    def __init__(
        self,
        fibres: FibreField,
        subset: tuple[BoxPoint, ...],
        basepoint: GroupElement,
        lifts: dict[BoxPoint, GroupElement],
    ):
        self.fibres = fibres
        self.subset = subset
        self.basepoint = basepoint
        self.lifts = lifts

    def _lift(self, x: BoxPoint) -> GroupElement:
        try:
            return self.lifts[x]
        except KeyError as exc:
            raise PreconditionError(f"{x} is not in the trivialized subset") from exc

    def apply(self, x: BoxPoint, p: FibrePoint) -> HilbertVec:
        group = self.fibres.group
        move = group.multiply(self._lift(x), group.inverse(p.x))
        return self.fibres.cocycle.act(move, p.y)

    def inverse(self, x: BoxPoint, v: HilbertVec) -> FibrePoint:
        return self.fibres.canonicalize(x.level, self._lift(x), v)


class ForwardCertificate(FibredCCE):
    """
    Fibred cofinitely-coarse embedding of the box family of a chain, built
    from a proper cocycle. At radius r the excluded subfamily is every level
    below n_r, the first level whose subgroup avoids ball(3r).
    """

    def __init__(self, chain: Chain, cocycle: Cocycle, max_radius: int, levels: Iterable[int] | None = None):
        if max_radius < 1:
            raise ConfigurationError("Certificate radius must be at least 1")
        self.chain = chain
        self.cocycle = cocycle
        self.fibres = FibreField(chain, cocycle)
        self.family = BoxFamily(chain, levels)
        self.scope = CertificateScope(max_radius=max_radius, levels=self.family.levels)
        self._required: dict[int, int] = {}
        for r in range(1, max_radius + 1):
            outcome = separation_certificate(chain, 3 * r)
            if isinstance(outcome, SeparationFailure):
                raise ScopeError(
                    f"Radius {r} needs separation of ball({3 * r}), but {outcome.reason}"
                )
            self._required[r] = outcome
        self.controls = properness_profile(cocycle, max_radius)
        self._lift_tables: dict[tuple[int, int], dict[GroupElement, GroupElement]] = {}
        self._lock = threading.Lock()
        logger.info(
            "Forward certificate for %s / %s / %s: n_r = %s",
            chain.parent.signature,
            chain.signature,
            cocycle.tag,
            self._required,
        )

    @property
    def group(self) -> Group:
        return self.chain.parent

    @property
    def constructor(self) -> dict[str, Any]:
        return {
            "group": self.group.signature,
            "chain": self.chain.signature,
            "cocycle": self.cocycle.tag,
            "max_radius": self.scope.max_radius,
            "levels": list(self.scope.levels),
        }

    def required_level(self, r: int) -> int:
        if r not in self._required:
            raise ScopeError(f"Radius {r} is outside the certified range 1..{self.scope.max_radius}")
        return self._required[r]

    def exclusion(self, r: int) -> frozenset[int]:
        n_r = self.required_level(r)
        return frozenset(n for n in self.family.levels if n < n_r)

    def section(self, x: BoxPoint) -> FibrePoint:
        return self.fibres.section(x.level, x.coset)

    def fibre_distance_sq(self, x: BoxPoint, p: FibrePoint, q: FibrePoint) -> Fraction:
        return self.fibres.distance_sq(p, q)

    def basepoint(self, subset: Sequence[BoxPoint]) -> GroupElement:
        """Length-lexicographically smallest representative of the cosets in C"""
        reps = (self.chain.representative(x.level, x.coset) for x in subset)
        return min(reps, key=self.group.sort_key)

    def _lift_table(self, level: int, r: int) -> dict[GroupElement, GroupElement]:
        key = (level, r)
        table = self._lift_tables.get(key)
        if table is not None:
            return table
        with self._lock:
            table = self._lift_tables.get(key)
            if table is None:
                table = {}
                for u in self.group.ball(r - 1):
                    image = self.chain.project(level, u)
                    if image in table:
                        raise LiftError(
                            f"Lift not unique at level {level}, r={r}: "
                            f"{self.group.format(u)} and {self.group.format(table[image])}"
                        )
                    table[image] = u
                self._lift_tables[key] = table
        return table

    def lifts(self, subset: Sequence[BoxPoint], r: int) -> tuple[GroupElement, dict[BoxPoint, GroupElement]]:
        level = subset_level(subset)
        z = self.basepoint(subset)
        table = self._lift_table(level, r)
        quotient = self.chain.quotient(level)
        z_image = self.chain.project(level, z)
        lifts = {}
        for x in subset:
            target = quotient.multiply(quotient.inverse(z_image), x.coset)
            if target not in table:
                raise PreconditionError(f"{x} is not within distance {r} of the basepoint")
            lifts[x] = self.group.multiply(z, table[target])
        return z, lifts

    def trivialize(self, subset: Sequence[BoxPoint], r: int) -> BasepointTrivialization:
        ordered = tuple(sorted(set(subset)))
        self.check_scope(subset_level(ordered), r)
        z, lifts = self.lifts(ordered, r)
        return BasepointTrivialization(self.fibres, ordered, z, lifts)

    def lift_distance_sq(self, subset: Sequence[BoxPoint], r: int, x: BoxPoint, y: BoxPoint) -> Fraction:
        """|b(a_0^-1 a_0')|^2 straight from the cocycle"""
        _, lifts = self.lifts(tuple(sorted(set(subset))), r)
        group = self.group
        return self.cocycle.norm_sq(group.multiply(group.inverse(lifts[x]), lifts[y]))


def forward(
    group: Group,
    chain: Chain,
    cocycle: Cocycle,
    max_radius: int,
    levels: Iterable[int] | None = None,
) -> ForwardCertificate:
    if chain.parent != group:
        raise ConfigurationError(f"Chain lives on {chain.parent.signature}, not {group.signature}")
    return ForwardCertificate(chain, cocycle, max_radius, levels)
