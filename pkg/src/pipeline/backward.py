from __future__ import annotations

import logging
import threading
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from src.chains.box import BoxPoint
from src.chains.chain import Chain, check_local_isometry, separation_certificate
from src.fibred.certificate import FibredCCE
from src.fibred.controls import ControlPair
from src.groups.base import Group
from src.groups.elements import GroupElement
from src.hilbert.cnd import CndFunctionVerdict, cnd_function_check
from src.pipeline.means import FoelnerMean, MeanProvider
from src.services.management.exceptions import CertificateError, InputError, ScopeError

logger = logging.getLogger(__name__)


class KernelTable:
    """
    k_r([x], [y]) = |t_C([x])s([x]) - t_C([y])s([y])|^2 for d_n([x], [y]) < r and 0
    otherwise, on the first level n outside the excluded subfamily whose
    subgroup avoids ball(2r). Every value is computed with two covering
    subsets C and the results must agree exactly.
    """

    def __init__(self, emb: FibredCCE, r: int):
        self.emb = emb
        self.r = r
        self.chain: Chain = emb.family.chain
        self.level = self._choose_level()
        self.quotient: Group = self.chain.quotient(self.level)
        self._values: dict[tuple[GroupElement, GroupElement], Fraction] = {}
        self._lock = threading.Lock()
        self.single_cover_pairs = 0
        self.sandwich_violations: list[tuple[GroupElement, GroupElement, Fraction]] = []

    def _choose_level(self) -> int:
        excluded = self.emb.exclusion(self.r)
        separation = separation_certificate(self.chain, 2 * self.r)
        for n in self.emb.family.levels:
            if n in excluded:
                continue
            if isinstance(separation, int) and separation <= n:
                logger.info("Kernel k_%d lives on level %d", self.r, n)
                return n
        raise ScopeError(f"No certified level is admissible for the kernel at r={self.r}")

    def distance(self, x: GroupElement, y: GroupElement) -> int:
        return self.quotient.distance(x, y)

    def _value_on(self, subset: Sequence[BoxPoint], x: BoxPoint, y: BoxPoint) -> Fraction:
        triv = self.emb.trivialize(subset, self.r)
        u = triv.apply(x, self.emb.section(x))
        v = triv.apply(y, self.emb.section(y))
        return (u - v).norm_sq()

    def _third_point(self, x: GroupElement, y: GroupElement) -> GroupElement | None:
        for w in self.quotient.ball_around(x, self.r - 1):
            if w not in (x, y) and self.distance(w, x) < self.r and self.distance(w, y) < self.r:
                return w
        return None

    def __call__(self, x: GroupElement, y: GroupElement) -> Fraction:
        key = (x, y)
        cached = self._values.get(key)
        if cached is not None:
            return cached
        d = self.distance(x, y)
        if d >= self.r:
            value = Fraction(0)
        else:
            px, py = BoxPoint(self.level, x), BoxPoint(self.level, y)
            first = self._value_on((px, py), px, py)
            w = self._third_point(x, y)
            if w is None:
                self.single_cover_pairs += 1
            else:
                second = self._value_on((px, py, BoxPoint(self.level, w)), px, py)
                if second != first:
                    raise CertificateError(
                        f"k_{self.r} depends on the covering subset at ({x.coords}, {y.coords}): {first} != {second}"
                    )
            controls = self.emb.controls
            if not controls.lower_sq(d) <= first <= controls.upper_sq(d):
                self.sandwich_violations.append((x, y, first))
            value = first
        with self._lock:
            self._values[key] = value
            self._values[(y, x)] = value
        return value


@dataclass(frozen=True)
class PhiValue:
    value: Fraction
    defect_bound: Fraction = Fraction(0)


def defect_bound(mean: MeanProvider, quotient: Group, x: GroupElement, upper_sq: Fraction) -> Fraction:
    """
    Bound on |phi(x) - phi(x^-1)|: phi(x^-1) averages the same integrand over
    F x^-1 instead of F, and the integrand is at most rho_2(l(x))^2.
    """
    return mean.defect(quotient, quotient.inverse(x)) * upper_sq


def build_phi(kernel: KernelTable, mean: MeanProvider, x: GroupElement) -> PhiValue:
    """phi_r([x]) = mean over t of k_r([t], [t x])"""
    quotient = kernel.quotient
    length = quotient.word_length(x)
    if length >= kernel.r:
        raise ScopeError(f"phi_{kernel.r} is only built on the open ball, l_n = {length}")
    value = mean.average(quotient, lambda t: kernel(t, quotient.multiply(t, x)))
    return PhiValue(value, defect_bound(mean, quotient, x, kernel.emb.controls.upper_sq(length)))


@dataclass
class PsiTable:
    """psi_r on the open ball l(g) < radius, zero outside"""
    group: Group
    radius: int
    level: int
    values: dict[GroupElement, Fraction]
    defect_bounds: dict[GroupElement, Fraction] = field(default_factory=dict)
    mean: str = "uniform"
    flags: dict[GroupElement, str] = field(default_factory=dict)
    zero_outside: bool = True

    def value(self, g: GroupElement) -> Fraction:
        if g in self.values:
            return self.values[g]
        if g in self.flags:
            raise ScopeError(f"psi entry for {self.group.format(g)} is flagged: {self.flags[g]}")
        if not self.zero_outside or self.group.word_length(g) < self.radius:
            raise ScopeError(f"psi has no entry for {self.group.format(g)}")
        return Fraction(0)

    def symmetry_defect(self, g: GroupElement) -> Fraction:
        return abs(self.value(g) - self.value(self.group.inverse(g)))

    def rows(self) -> list[tuple[str, int, Fraction, Fraction | None]]:
        """(element, length, value, defect bound) in length-lex order"""
        ordered = sorted(self.values, key=self.group.sort_key)
        return [
            (self.group.format(g), self.group.word_length(g), self.values[g], self.defect_bounds.get(g))
            for g in ordered
        ]


@dataclass
class PsiResult:
    table: PsiTable
    local_cnd: CndFunctionVerdict
    envelope_violations: list[GroupElement]
    kernel: KernelTable

    @property
    def ok(self) -> bool:
        return self.local_cnd.verdict and not self.envelope_violations and not self.kernel.sandwich_violations


def envelope_violations(table: PsiTable, controls: ControlPair) -> list[GroupElement]:
    """Entries outside rho_1(l)^2 <= psi <= rho_2(l)^2"""
    violations = []
    for g, value in table.values.items():
        length = table.group.word_length(g)
        if length > controls.max_argument:
            raise ScopeError(f"Length {length} exceeds the control tables")
        if not controls.lower_sq(length) <= value <= controls.upper_sq(length):
            violations.append(g)
    return violations


def build_psi(
    group: Group,
    chain: Chain,
    emb: FibredCCE,
    r: int,
    mean: MeanProvider,
    rng: np.random.Generator | None = None,
    exhaustive: bool = True,
    tol: float | None = None,
) -> PsiResult:
    """psi_r = phi_r o pi_{n_r} on ball(r - 1), with its r-local CND check and the properness envelope"""
    if chain.parent != group or emb.family.chain.parent != group:
        raise InputError("Certificate, chain and group do not belong together")
    kernel = KernelTable(emb, r)
    broken = check_local_isometry(chain, kernel.level, r)
    if broken:
        raise CertificateError(
            f"pi_{kernel.level} is not isometric on small sets: {[group.format(g) for g in broken[:5]]}"
        )
    phi_cache: dict[GroupElement, PhiValue] = {}
    values, bounds = {}, {}
    for g in group.ball(r - 1):
        q = chain.project(kernel.level, g)
        if q not in phi_cache:
            phi_cache[q] = build_phi(kernel, mean, q)
        values[g] = phi_cache[q].value
        bounds[g] = phi_cache[q].defect_bound
    table = PsiTable(group, r, kernel.level, values, bounds, mean.label)
    foelner = isinstance(mean, FoelnerMean)
    local = cnd_function_check(
        group,
        table.values,
        local_radius=r,
        pool=group.ball(r),
        exhaustive=exhaustive,
        symmetrize=foelner,
        tol=tol,
        rng=rng,
    )
    violations = envelope_violations(table, emb.controls)
    logger.info(
        "psi_%d on level %d (%s): %d entries, local CND %s, %d envelope violations",
        r,
        kernel.level,
        mean.label,
        len(values),
        local.verdict,
        len(violations),
    )
    return PsiResult(table=table, local_cnd=local, envelope_violations=violations, kernel=kernel)


def limit_psi(tables: Iterable[PsiTable], group: Group | None = None) -> PsiTable:
    """
    Pointwise limit by stabilization: an entry is kept when the last two
    tables covering it agree, flagged otherwise. No input gives an empty
    table on `group`.
    """
    tables = list(tables)
    if not tables:
        if group is None:
            raise InputError("An empty limit needs the group it lives on")
        return PsiTable(group=group, radius=0, level=0, values={}, zero_outside=False)
    radii = [t.radius for t in tables]
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise InputError(f"psi tables must have strictly increasing radii, got {radii}")
    group = tables[-1].group
    values: dict[GroupElement, Fraction] = {}
    flags: dict[GroupElement, str] = {}
    for g in tables[-1].values:
        covering = [t for t in tables if g in t.values]
        if len(covering) < 2:
            flags[g] = "covered by fewer than two tables"
            continue
        previous, last = covering[-2].values[g], covering[-1].values[g]
        if previous == last:
            values[g] = last
        else:
            flags[g] = f"not stabilized: {previous} then {last}"
    stabilized_radius = tables[-2].radius if len(tables) > 1 else 0
    logger.info("Limit psi: %d stabilized entries, %d flagged", len(values), len(flags))
    return PsiTable(
        group=group,
        radius=stabilized_radius,
        level=tables[-1].level,
        values=values,
        defect_bounds={g: tables[-1].defect_bounds.get(g, Fraction(0)) for g in values},
        mean=tables[-1].mean,
        flags=flags,
        zero_outside=False,
    )


@dataclass
class LimitCheck:
    global_cnd: CndFunctionVerdict
    envelope_violations: list[GroupElement]
    flagged: int

    @property
    def ok(self) -> bool:
        return self.global_cnd.verdict and not self.envelope_violations


def verify_limit_psi(
    table: PsiTable,
    controls: ControlPair,
    rng: np.random.Generator | None = None,
    tol: float | None = None,
) -> LimitCheck:
    """Global CND on ball(R // 2) of the stabilized region, plus the properness envelope"""
    group = table.group
    stable_radius = table.radius - 1
    pool_radius = max(stable_radius // 2, 0)
    mapping = {g: table.values[g] for g in group.ball(2 * pool_radius) if g in table.values}
    verdict = cnd_function_check(
        group,
        mapping,
        local_radius=None,
        pool=group.ball(pool_radius),
        exhaustive=True,
        symmetrize=table.mean != "uniform",
        tol=tol,
        rng=rng,
    )
    return LimitCheck(
        global_cnd=verdict,
        envelope_violations=envelope_violations(table, controls),
        flagged=len(table.flags),
    )
