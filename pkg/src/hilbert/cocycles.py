from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from fractions import Fraction

from src.fibred.controls import ControlPair, MonotoneTable
from src.groups.base import Group
from src.groups.catalog import FreeGroup, IntLattice
from src.groups.elements import GroupElement
from src.hilbert.isometries import AffineIsometry, IdentityLinear, LinearPart, SignedPermutation
from src.hilbert.vectors import HilbertVec, Key
from src.services.management.exceptions import ConfigurationError, ResourceCapError

logger = logging.getLogger(__name__)


class Cocycle(ABC):
    """
    Affine isometric action alpha(g) = (b(g), L(g)) of a group on a sparse
    Hilbert space, with b(gh) = b(g) + L(g) b(h).
    """

    tag: str = ""

    def __init__(self, group: Group):
        self.group = group

    @abstractmethod
    def translation(self, g: GroupElement) -> HilbertVec:
        """b(g)"""

    @abstractmethod
    def linear(self, g: GroupElement) -> LinearPart:
        """L(g)"""

    def alpha(self, g: GroupElement) -> AffineIsometry:
        self.group._check(g)
        return AffineIsometry(self.translation(g), self.linear(g))

    def act(self, g: GroupElement, v: HilbertVec) -> HilbertVec:
        return self.translation(g) + self.linear(g).apply(v)

    def norm_sq(self, g: GroupElement) -> Fraction:
        return self.translation(g).norm_sq()

    @property
    def signature(self) -> str:
        return f"{self.tag}[{self.group.signature}]"


class LatticeCocycle(Cocycle):
    """Z^d acting by translations on Q^d: L = id, b(g) = g"""

    tag = "lattice"

    def translation(self, g: GroupElement) -> HilbertVec:
        self.group._check(g)
        return HilbertVec(enumerate(g.coords))

    def linear(self, g: GroupElement) -> LinearPart:
        return IdentityLinear()


class FreeWallCocycle(Cocycle):
    """
    Wall cocycle of the Cayley tree of F_k. Basis keys are tree edges written
    as (shorter endpoint word, last letter of the longer endpoint); b(g) is the
    sum of the edges on the geodesic from 1 to g, oriented away from 1.
    """

    tag = "free-wall"

    def translation(self, g: GroupElement) -> HilbertVec:
        self.group._check(g)
        word = g.coords
        return HilbertVec(((word[:i], word[i]), 1) for i in range(len(word)))

    def _edge_image(self, g: GroupElement, key: Key) -> tuple[Key, int]:
        prefix, letter = key
        group = self.group
        near = group.multiply(g, group.element(*prefix))
        far = group.multiply(near, group.element(letter))
        if len(far.coords) > len(near.coords):
            return (near.coords, letter), 1
        # the translated edge points back towards the identity
        return (far.coords, -letter), -1

    def linear(self, g: GroupElement) -> LinearPart:
        self.group._check(g)
        return SignedPermutation(lambda key: self._edge_image(g, key), label=self.group.format(g))


class RegularCoboundary(Cocycle):
    """Finite group acting on l^2(G) by left translation with b(g) = e_g - e_1"""

    tag = "regular"

    def __init__(self, group: Group):
        if not group.is_finite:
            raise ConfigurationError(f"Regular cocycle needs a finite group, got {group.signature}")
        super().__init__(group)

    def translation(self, g: GroupElement) -> HilbertVec:
        self.group._check(g)
        return HilbertVec(((g, 1), (self.group.identity, -1)))

    def linear(self, g: GroupElement) -> LinearPart:
        self.group._check(g)
        return SignedPermutation(lambda key: (self.group.multiply(g, key), 1), label=self.group.format(g))


def lattice_cocycle(rank: int, group: IntLattice | None = None) -> LatticeCocycle:
    if rank < 1:
        raise ConfigurationError("Lattice cocycle needs rank >= 1")
    group = group or IntLattice(rank)
    if not isinstance(group, IntLattice) or group.rank != rank:
        raise ConfigurationError(f"Lattice cocycle of rank {rank} cannot act on {group.signature}")
    return LatticeCocycle(group)


def free_wall_cocycle(rank: int, group: FreeGroup | None = None) -> FreeWallCocycle:
    if rank < 1:
        raise ConfigurationError("Free wall cocycle needs rank >= 1")
    group = group or FreeGroup(rank)
    if not isinstance(group, FreeGroup) or group.rank != rank:
        raise ConfigurationError(f"Free wall cocycle of rank {rank} cannot act on {group.signature}")
    return FreeWallCocycle(group)


def regular_cocycle(group: Group) -> RegularCoboundary:
    return RegularCoboundary(group)


def properness_profile(cocycle: Cocycle, radius: int, search_radius: int | None = None) -> ControlPair:
    """
    Squared tables on 0..radius:
    rho_2(x)^2 = max{|b(g)|^2 : l(g) <= x},
    rho_1(x)^2 = min{|b(g)|^2 : x <= l(g) <= search_radius}.
    The min is truncated to ball(search_radius), 2 * radius by default. For a
    finite group the search covers the whole group and rho_1 is capped at the
    largest norm attained.
    """
    group = cocycle.group
    finite = group.is_finite
    if finite:
        search = group.diameter() or 0
    else:
        search = search_radius if search_radius is not None else 2 * radius
        if search < radius:
            raise ResourceCapError(f"Search radius {search} is smaller than the profile radius {radius}")

    min_at: dict[int, Fraction] = {}
    max_at: dict[int, Fraction] = {}
    for g in group.ball(search):
        length = group.word_length(g)
        value = cocycle.norm_sq(g)
        min_at[length] = min(value, min_at.get(length, value))
        max_at[length] = max(value, max_at.get(length, value))

    overall_max = max(max_at.values())
    upper = []
    running = Fraction(0)
    for x in range(radius + 1):
        if x in max_at:
            running = max(running, max_at[x])
        upper.append(running)

    lower = []
    for x in range(radius + 1):
        # beyond the diameter of a finite group there is nothing left to minimise over
        candidates = [value for length, value in min_at.items() if length >= x]
        lower.append(min(candidates) if candidates else overall_max)

    notes = [f"rho_1 minimised over ball({search}) of {group.signature}"]
    if finite:
        notes.append("finite group: rho_1 capped at the largest attained norm")
    logger.debug("Properness profile of %s up to %d (search %d)", cocycle.signature, radius, search)
    return ControlPair(
        lower_sq=MonotoneTable(tuple(lower), "rho1^2"),
        upper_sq=MonotoneTable(tuple(upper), "rho2^2"),
        notes=tuple(notes),
    )


@dataclass
class CocycleReport:
    pairs_checked: int = 0
    identity_failures: list[tuple[GroupElement, GroupElement]] = field(default_factory=list)
    non_isometric: list[GroupElement] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.identity_failures and not self.non_isometric


def verify_cocycle(cocycle: Cocycle, radius: int) -> CocycleReport:
    """
    alpha(g) o alpha(h) = alpha(gh) and linear parts preserving inner products,
    for g, h in ball(radius), tested on 0 and the basis vectors of the b(g).
    """
    group = cocycle.group
    ball = group.ball(radius)
    keys = set()
    for g in ball:
        keys.update(cocycle.translation(g).support())
    samples = [HilbertVec()] + [HilbertVec.basis(key) for key in sorted(keys, key=repr)]
    alphas = {g: cocycle.alpha(g) for g in ball}
    report = CocycleReport()
    for g in ball:
        if not alphas[g].preserves_inner_products(samples):
            report.non_isometric.append(g)
        for h in ball:
            report.pairs_checked += 1
            if not alphas[g].compose(alphas[h]).agrees_with(cocycle.alpha(group.multiply(g, h)), samples):
                report.identity_failures.append((g, h))
    logger.info(
        "Cocycle %s on ball(%d): %d pairs, %d identity failures",
        cocycle.signature,
        radius,
        report.pairs_checked,
        len(report.identity_failures),
    )
    return report
