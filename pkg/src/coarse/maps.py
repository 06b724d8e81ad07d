from __future__ import annotations

import csv
import logging
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np

from src.chains.box import BoxFamily, BoxPoint
from src.fibred.controls import MonotoneTable
from src.groups.elements import GroupElement
from src.services.management.exceptions import ConfigParseError, ConfigurationError, InputError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CoarseMap:
    """f: G/G_n -> G/G_m between components of two box families"""
    source_level: int
    target_level: int
    fn: Callable[[GroupElement], GroupElement] = field(compare=False)
    name: str = ""

    def __call__(self, p: BoxPoint) -> BoxPoint:
        if p.level != self.source_level:
            raise InputError(f"Map {self.name} is defined on level {self.source_level}, got {p.level}")
        return BoxPoint(self.target_level, self.fn(p.coset))


class CoarseMapFamily:
    """
    Maps from the spaces of one family into the spaces of another with
    non-decreasing controls m <= d(f x, f y) <= M along d(x, y).
    """

    def __init__(
        self,
        source: BoxFamily,
        target: BoxFamily,
        maps: Iterable[CoarseMap],
        lower: MonotoneTable,
        upper: MonotoneTable,
        net_constant: int | None = None,
        name: str = "",
        origin: dict[str, Any] | None = None,
    ):
        self.source = source
        self.target = target
        self.maps = tuple(maps)
        self.lower = lower
        self.upper = upper
        self.net_constant = net_constant
        self.name = name
        # how to rebuild the maps from a manifest
        self.origin = dict(origin or {"maps": name})
        covered = {f.source_level for f in self.maps}
        missing = [n for n in source.levels if n not in covered]
        if missing:
            raise ConfigurationError(f"Source levels {missing} are not the domain of any map")
        for f in self.maps:
            source.component(f.source_level)
            target.component(f.target_level)

    def maps_from(self, level: int) -> list[CoarseMap]:
        return [f for f in self.maps if f.source_level == level]

    def primary(self, level: int) -> CoarseMap:
        maps = self.maps_from(level)
        if not maps:
            raise ConfigurationError(f"No map starts at level {level}")
        return maps[0]

    def maps_into(self, level: int) -> list[CoarseMap]:
        return [f for f in self.maps if f.target_level == level]

    def preimage_levels(self, target_levels: Iterable[int]) -> frozenset[int]:
        wanted = set(target_levels)
        return frozenset(f.source_level for f in self.maps if f.target_level in wanted)


def _identity_table(max_distance: int, scale: int = 1, name: str = "") -> MonotoneTable:
    return MonotoneTable.from_function(lambda t: scale * t, max_distance, name)


def identity_maps(family: BoxFamily, max_distance: int) -> CoarseMapFamily:
    maps = [CoarseMap(n, n, lambda q: q, name=f"id{n}") for n in family.levels]
    table = _identity_table(max_distance, name="id")
    return CoarseMapFamily(
        family, family, maps, table, table, net_constant=0, name="identity", origin={"maps": "identity"}
    )


def doubling_maps(
    source: BoxFamily, target: BoxFamily, max_distance: int, net_constant: int | None = None
) -> CoarseMapFamily:
    """[x] -> [2x] from G/G_n to G/G_{n+1}; with m(t) = t and M(t) = 2t. The image is a 1-net"""
    maps = []
    for n in source.levels:
        if n + 1 not in target.levels:
            raise ConfigurationError(f"Doubling map from level {n} needs target level {n + 1}")
        quotient = target.component(n + 1).quotient
        maps.append(
            CoarseMap(n, n + 1, lambda q, grp=quotient: grp.element(*(2 * c for c in q.coords)), name=f"double{n}")
        )
    return CoarseMapFamily(
        source,
        target,
        maps,
        lower=_identity_table(max_distance, name="t"),
        upper=_identity_table(max_distance, scale=2, name="2t"),
        net_constant=net_constant,
        name="doubling",
        origin={"maps": "doubling"},
    )


def _parse_coords(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.replace(";", " ").split())
    except ValueError as exc:
        raise ConfigParseError(f"Malformed coset coordinates '{text}'") from exc


def maps_from_csv(
    path: Path,
    source: BoxFamily,
    target: BoxFamily,
    lower: MonotoneTable,
    upper: MonotoneTable,
    net_constant: int | None = None,
) -> CoarseMapFamily:
    """Rows: source_level, source_coset, target_level, target_coset (coordinates separated by ';')"""
    tables: dict[tuple[int, int], dict[GroupElement, GroupElement]] = {}
    with open(path, newline="") as handle:
        for row in csv.DictReader(handle):
            try:
                n, m = int(row["source_level"]), int(row["target_level"])
                q = source.component(n).quotient.element(*_parse_coords(row["source_coset"]))
                image = target.component(m).quotient.element(*_parse_coords(row["target_coset"]))
            except (KeyError, ValueError) as exc:
                raise ConfigParseError(f"Malformed map row {row}") from exc
            tables.setdefault((n, m), {})[q] = image
    maps = []
    for (n, m), table in sorted(tables.items()):
        def lookup(q: GroupElement, table=table, n=n) -> GroupElement:
            if q not in table:
                raise ConfigurationError(f"Map table has no image for {q.coords} on level {n}")
            return table[q]

        maps.append(CoarseMap(n, m, lookup, name=f"csv{n}->{m}"))
    origin = {"maps": "csv", "map_table": str(Path(path).resolve())}
    return CoarseMapFamily(source, target, maps, lower, upper, net_constant, name=Path(path).stem, origin=origin)


def controls_from_csv(path: Path) -> tuple[MonotoneTable, MonotoneTable]:
    """Rows: t, m, M for t = 0..R"""
    lower, upper = [], []
    with open(path, newline="") as handle:
        for expected, row in enumerate(csv.DictReader(handle)):
            try:
                t = int(row["t"])
                lower.append(Fraction(row["m"]))
                upper.append(Fraction(row["M"]))
            except (KeyError, ValueError) as exc:
                raise ConfigParseError(f"Malformed control row {row}") from exc
            if t != expected:
                raise ConfigParseError(f"Control rows must list t = 0, 1, 2, ...; got {t} at {expected}")
    return MonotoneTable(tuple(lower), "m"), MonotoneTable(tuple(upper), "M")


def csv_source_levels(path: Path) -> list[int]:
    with open(path, newline="") as handle:
        try:
            levels = {int(row["source_level"]) for row in csv.DictReader(handle)}
        except (KeyError, ValueError) as exc:
            raise ConfigParseError(f"Malformed source level in {path}") from exc
    if not levels:
        raise ConfigParseError(f"Map table {path} has no rows")
    return sorted(levels)


def csv_maps(
    map_table: Path,
    control_table: Path,
    target: BoxFamily,
    source_levels: Iterable[int] | None = None,
    net_constant: int | None = None,
) -> CoarseMapFamily:
    """Maps and controls from CSV tables; the source levels default to those the map table starts from"""
    lower, upper = controls_from_csv(control_table)
    levels = list(source_levels) if source_levels else csv_source_levels(map_table)
    fam = maps_from_csv(map_table, BoxFamily(target.chain, levels), target, lower, upper, net_constant)
    fam.origin["control_table"] = str(Path(control_table).resolve())
    return fam


@dataclass
class CoarseReport:
    pairs_checked: int = 0
    lower_violations: list[tuple[BoxPoint, BoxPoint, int, int]] = field(default_factory=list)
    upper_violations: list[tuple[BoxPoint, BoxPoint, int, int]] = field(default_factory=list)
    unbounded: bool = True
    net_violations: list[BoxPoint] = field(default_factory=list)
    uncovered_targets: list[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (
            not self.lower_violations
            and not self.upper_violations
            and self.unbounded
            and not self.net_violations
            and not self.uncovered_targets
        )


def _component_points(family: BoxFamily, level: int, radius: int) -> list[BoxPoint]:
    space = family.component(level)
    cosets = space.points() if space.is_bounded else space.ball(radius)
    return [BoxPoint(level, q) for q in cosets]


def verify_coarse(
    fam: CoarseMapFamily,
    samples: int,
    rng: np.random.Generator | None = None,
    threshold: int = 3,
    sample_radius: int = 3,
) -> CoarseReport:
    """
    m(d(x, y)) <= d(f x, f y) <= M(d(x, y)) on sampled pairs of every map, the
    threshold proxy m(R_max) >= threshold for lim m = infinity, and the C-net
    condition when a net constant is declared.
    """
    rng = rng or np.random.default_rng(0)
    report = CoarseReport(unbounded=fam.lower.reaches(threshold))
    for f in fam.maps:
        points = _component_points(fam.source, f.source_level, sample_radius)
        if len(points) ** 2 <= samples:
            pairs: Sequence[tuple[int, int]] = [(i, j) for i in range(len(points)) for j in range(len(points))]
        else:
            pairs = [(int(i), int(j)) for i, j in rng.integers(0, len(points), size=(samples, 2))]
        for i, j in pairs:
            x, y = points[i], points[j]
            d = fam.source.distance(x, y)
            if not (fam.lower.covers(d) and fam.upper.covers(d)):
                raise ConfigurationError(f"Distance {d} is not covered by the control tables of {fam.name}")
            image_distance = fam.target.distance(f(x), f(y))
            if image_distance < fam.lower(d):
                report.lower_violations.append((x, y, d, image_distance))
            if image_distance > fam.upper(d):
                report.upper_violations.append((x, y, d, image_distance))
            report.pairs_checked += 1

    if fam.net_constant is not None:
        for m in fam.target.levels:
            incoming = fam.maps_into(m)
            if not incoming:
                report.uncovered_targets.append(m)
                continue
            images = {f(p) for f in incoming for p in _component_points(fam.source, f.source_level, sample_radius)}
            for y in _component_points(fam.target, m, sample_radius):
                if min(fam.target.distance(y, image) for image in images) > fam.net_constant:
                    report.net_violations.append(y)
    logger.info(
        "Coarse check %s: %d pairs, %d lower and %d upper violations",
        fam.name,
        report.pairs_checked,
        len(report.lower_violations),
        len(report.upper_violations),
    )
    return report
