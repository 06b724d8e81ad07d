from __future__ import annotations

import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

from src.chains.chain import Chain, QuotientSpace
from src.groups.elements import GroupElement
from src.services.management.exceptions import ChainError, PreconditionError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class BoxPoint:
    level: int
    coset: GroupElement


class BoxFamily:
    """The metric family {(G/G_n, d_n)} over a chosen set of levels"""

    def __init__(self, chain: Chain, levels: Iterable[int] | None = None):
        self.chain = chain
        chosen = tuple(sorted(set(levels))) if levels is not None else tuple(range(1, chain.depth + 1))
        for n in chosen:
            chain.space(n)
        self.levels = chosen

    def component(self, n: int) -> QuotientSpace:
        if n not in self.levels:
            raise ChainError(f"Level {n} is not a component of this family")
        return self.chain.space(n)

    def components(self) -> list[QuotientSpace]:
        return [self.chain.space(n) for n in self.levels]

    def point(self, n: int, coset: GroupElement) -> BoxPoint:
        self.component(n).quotient._check(coset)
        return BoxPoint(n, coset)

    def identity_point(self, n: int) -> BoxPoint:
        return BoxPoint(n, self.component(n).quotient.identity)

    def length(self, p: BoxPoint) -> int:
        return self.component(p.level).length(p.coset)

    def distance(self, p: BoxPoint, q: BoxPoint) -> int:
        """d_n inside one component"""
        if p.level != q.level:
            raise PreconditionError("Family distance is only defined inside one component")
        return self.component(p.level).distance(p.coset, q.coset)

    @property
    def all_bounded(self) -> bool:
        return all(space.is_bounded for space in self.components())


class BoxSpace(BoxFamily):
    """
    The box family glued into one metric space:
    d'(x, y) = d_n(x, y) inside G/G_n and l_n(x) + l_m(y) + n + m across components.
    """

    def distance(self, p: BoxPoint, q: BoxPoint) -> int:
        if p.level == q.level:
            return self.component(p.level).distance(p.coset, q.coset)
        return self.length(p) + self.length(q) + p.level + q.level


def box_distance(space: BoxSpace, x: BoxPoint, y: BoxPoint) -> int:
    return space.distance(x, y)


def component_separation(space: BoxSpace, n: int, m: int) -> int:
    """inf d'(G/G_n, G/G_m), attained at the identity cosets"""
    if n == m:
        raise PreconditionError("Component separation needs two distinct levels")
    return space.distance(space.identity_point(n), space.identity_point(m))


@dataclass
class MetricReport:
    triples_checked: int = 0
    symmetry: list[tuple[BoxPoint, BoxPoint]] = field(default_factory=list)
    indiscernibles: list[tuple[BoxPoint, BoxPoint]] = field(default_factory=list)
    triangle: list[tuple[BoxPoint, BoxPoint, BoxPoint]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.symmetry or self.indiscernibles or self.triangle)


def sample_points(space: BoxFamily, radius: int) -> list[BoxPoint]:
    """Identity-centred balls of every component, in deterministic order"""
    points: list[BoxPoint] = []
    for n in space.levels:
        points.extend(BoxPoint(n, q) for q in space.component(n).ball(radius))
    return points


def _check_triple(space: BoxFamily, x: BoxPoint, y: BoxPoint, z: BoxPoint, report: MetricReport) -> None:
    dxy, dyx = space.distance(x, y), space.distance(y, x)
    if dxy != dyx:
        report.symmetry.append((x, y))
    if (dxy == 0) != (x == y):
        report.indiscernibles.append((x, y))
    if dxy > space.distance(x, z) + space.distance(z, y):
        report.triangle.append((x, y, z))
    report.triples_checked += 1


def verify_box_metric(
    space: BoxFamily,
    samples: int,
    rng: np.random.Generator | None = None,
    radius: int = 5,
    exhaustive_points: Sequence[BoxPoint] | None = None,
) -> MetricReport:
    """
    Metric axioms on `samples` random triples mixing components, plus every
    triple of `exhaustive_points` when given. Violations are report content.
    """
    rng = rng or np.random.default_rng(0)
    report = MetricReport()
    if exhaustive_points:
        for x in exhaustive_points:
            for y in exhaustive_points:
                for z in exhaustive_points:
                    _check_triple(space, x, y, z, report)
    pool = sample_points(space, radius)
    if pool and samples:
        picks = rng.integers(0, len(pool), size=(samples, 3))
        for i, j, k in picks:
            _check_triple(space, pool[int(i)], pool[int(j)], pool[int(k)], report)
    logger.info(
        "Box metric: %d triples, %d violations",
        report.triples_checked,
        len(report.symmetry) + len(report.indiscernibles) + len(report.triangle),
    )
    return report


@dataclass(frozen=True)
class ComponentInfo:
    level: int
    tag: str
    size: int | None
    bounded: bool
    witness: str


def describe_components(family: BoxFamily) -> list[ComponentInfo]:
    return [
        ComponentInfo(
            level=space.level,
            tag=space.tag,
            size=space.size,
            bounded=space.is_bounded,
            witness=space.witness,
        )
        for space in family.components()
    ]


def family_rows(family: BoxFamily, radius: int) -> list[tuple[int, str, int]]:
    """(component, coset normal form, l_n); whole finite quotients, ball(radius) otherwise"""
    rows = []
    for space in family.components():
        cosets = space.points() if space.is_bounded else space.ball(radius)
        for q in cosets:
            rows.append((space.level, space.quotient.format(q), space.length(q)))
    return rows
