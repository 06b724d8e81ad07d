import logging
from fractions import Fraction

import numpy as np

from src.chains.box import BoxSpace
from src.fibred.certificate import CertificateView, FibredCCE, OverlapFailure, OverlapWitness
from src.fibred.transfer import (
    BoxSpaceCertificate,
    TransferFailure,
    boxspace_to_family,
    family_to_boxspace,
    verify_box_condition1,
    verify_box_condition2,
)
from src.fibred.verifier import in_scope_subsets, overlapping_pairs, verify_condition1, verify_condition2
from src.pipeline.forward import ForwardCertificate
from src.services.management.exceptions import ToolkitError
from src.services.management.schemas import CertificateManifest, CheckRecord
from src.services.reporting import ReportBuilder, fmt_number, fmt_point, fmt_vector
from src.utils.parallel import parallel_map, spawn_rngs
from src.utils.settings import get_settings

logger = logging.getLogger(__name__)

CONDITION1 = "fibred-cce/condition-1"
CONDITION2 = "fibred-cce/condition-2"
ATTAINED = "fibred-cce/attained-distance"
TRANSFER = "box-space/transfer"


def _forward_oracle(emb: FibredCCE) -> ForwardCertificate | None:
    while isinstance(emb, CertificateView):
        emb = emb.base
    return emb if isinstance(emb, ForwardCertificate) else None


class CertificateChecker:
    """Runs both verifiers over every in-scope (component, subset) pair of a certificate"""

    def __init__(self, seed: int, workers: int | None = None):
        self._settings = get_settings()
        self.seed = seed
        self.workers = workers or self._settings.workers

    def run(self, emb: FibredCCE, builder: ReportBuilder, label: str = "") -> None:
        tasks = []
        for r in range(1, emb.scope.max_radius + 1):
            try:
                excluded = emb.exclusion(r)
            except ToolkitError as exc:
                builder.check(f"{label}exclusion r={r}", CONDITION1, False, [str(exc)], radius=r)
                continue
            tasks.extend((r, level) for level in emb.scope.levels if level not in excluded)
        rngs = spawn_rngs(self.seed, max(len(tasks), 1))
        results = parallel_map(
            lambda item: self._check_component(emb, item[0][0], item[0][1], item[1], label),
            list(zip(tasks, rngs)),
            self.workers,
        )
        for records in results:
            builder.extend(records)
        logger.info("%sverified %d (radius, level) pairs", label, len(tasks))

    def _check_component(
        self, emb: FibredCCE, r: int, level: int, rng: np.random.Generator, label: str
    ) -> list[CheckRecord]:
        scratch = ReportBuilder("scratch")
        name = f"{label}r={r} level={level}"
        try:
            subsets = in_scope_subsets(
                emb,
                level,
                r,
                self._settings.exhaustive_quotient_limit,
                rng=rng,
            )
        except ToolkitError as exc:
            scratch.check(f"{name} subsets", CONDITION1, False, [str(exc)], radius=r, level=level)
            return scratch.checks
        self._condition1(emb, r, level, subsets, scratch, name)
        self._condition2(emb, r, level, subsets, scratch, name)
        return scratch.checks

    @staticmethod
    def _condition1(emb, r, level, subsets, builder: ReportBuilder, name: str) -> None:
        family = emb.family
        oracle = _forward_oracle(emb)
        witnesses, pairs, violations, isometry, attained_off = [], 0, 0, 0, 0
        try:
            for subset in subsets:
                report = verify_condition1(emb, level, r, subset)
                pairs += len(report.pairs)
                for pair in report.violations:
                    violations += 1
                    witnesses.append(
                        f"{fmt_point(family, pair.x)} ~ {fmt_point(family, pair.y)}: d={pair.distance}, "
                        f"|t s(x) - t s(y)|^2={pair.dist_sq} outside [{pair.lower_sq}, {pair.upper_sq}]"
                    )
                isometry += len(report.isometry_failures)
                witnesses.extend(report.isometry_failures)
                if oracle is not None:
                    for pair in report.pairs:
                        if pair.dist_sq != oracle.lift_distance_sq(report.subset, r, pair.x, pair.y):
                            attained_off += 1
                            witnesses.append(f"attained distance differs at {fmt_point(family, pair.x)}")
        except ToolkitError as exc:
            builder.check(f"{name} condition 1", CONDITION1, False, [str(exc)], radius=r, level=level)
            return
        builder.check(
            f"{name} condition 1",
            CONDITION1,
            violations == 0 and isometry == 0,
            witnesses,
            radius=r,
            level=level,
            subsets=len(subsets),
            pairs=pairs,
            violations=violations,
            isometry_failures=isometry,
        )
        if oracle is not None:
            builder.check(f"{name} attained distances", ATTAINED, attained_off == 0, radius=r, level=level)

    @staticmethod
    def _condition2(emb, r, level, subsets, builder: ReportBuilder, name: str) -> None:
        family = emb.family
        witnesses, checked, failures, identities = [], 0, 0, 0
        try:
            for i, j in overlapping_pairs(subsets):
                outcome = verify_condition2(emb, level, r, subsets[i], subsets[j])
                checked += 1
                if isinstance(outcome, OverlapFailure):
                    failures += 1
                    where = fmt_point(family, outcome.offending) if outcome.offending else "-"
                    ref = fmt_point(family, outcome.reference) if outcome.reference else "-"
                    sample = fmt_vector(outcome.sample) if outcome.sample is not None else "-"
                    witnesses.append(
                        f"{outcome.reason}: at {where} against {ref}, sample {sample}, residual {outcome.residual}"
                    )
                elif outcome.is_identity:
                    identities += 1
        except ToolkitError as exc:
            builder.check(f"{name} condition 2", CONDITION2, False, [str(exc)], radius=r, level=level)
            return
        builder.check(
            f"{name} condition 2",
            CONDITION2,
            failures == 0,
            witnesses,
            radius=r,
            level=level,
            overlaps=checked,
            failures=failures,
            identity_transitions=identities,
        )


def check_transfer(emb: FibredCCE, builder: ReportBuilder) -> None:
    """Family -> box space -> family on bounded chains; verdicts must survive the round trip"""
    space = BoxSpace(emb.family.chain, emb.family.levels)
    cert = family_to_boxspace(emb, space)
    if isinstance(cert, TransferFailure):
        builder.note(f"box-space transfer not available: {cert.reason} (levels {list(cert.levels)})")
        return
    mismatches: list[str] = []
    try:
        compared = _compare_round_trip(emb, cert, space, mismatches)
    except ToolkitError as exc:
        builder.check("box-space round trip", TRANSFER, False, [str(exc)])
        return
    builder.check("box-space round trip", TRANSFER, not mismatches, mismatches, compared=compared)


def _compare_round_trip(
    emb: FibredCCE, cert: BoxSpaceCertificate, space: BoxSpace, mismatches: list[str]
) -> int:
    """Condition 1 on every in-scope subset and condition 2 on every overlap, in all three settings"""
    back = boxspace_to_family(cert, space)
    limit = get_settings().exhaustive_quotient_limit
    compared = 0
    for r in range(1, emb.scope.max_radius + 1):
        for level in emb.scope.levels:
            if level in back.exclusion(r):
                continue
            subsets = in_scope_subsets(emb, level, r, limit)
            for subset in subsets:
                verdicts = {
                    "family": verify_condition1(emb, level, r, subset).ok,
                    "round trip": verify_condition1(back, level, r, subset).ok,
                    "box space": verify_box_condition1(cert, r, subset).ok,
                }
                compared += 1
                if len(set(verdicts.values())) > 1:
                    mismatches.append(f"condition 1, r={r} level={level} {list(subset)}: {verdicts}")
            for i, j in overlapping_pairs(subsets):
                outcomes = {
                    "family": verify_condition2(emb, level, r, subsets[i], subsets[j]),
                    "round trip": verify_condition2(back, level, r, subsets[i], subsets[j]),
                    "box space": verify_box_condition2(cert, r, subsets[i], subsets[j]),
                }
                compared += 1
                transitions = {
                    name: outcome.images if isinstance(outcome, OverlapWitness) else None
                    for name, outcome in outcomes.items()
                }
                if len(set(transitions.values())) > 1:
                    verdicts = {name: images is not None for name, images in transitions.items()}
                    mismatches.append(f"condition 2, r={r} level={level} overlap ({i}, {j}): {verdicts}")
    return compared


def manifest_for(emb: FibredCCE, notes: list[str] | None = None) -> CertificateManifest:
    return CertificateManifest(
        constructor=emb.constructor,
        lower_sq=[str(v) for v in emb.controls.lower_sq.values],
        upper_sq=[str(v) for v in emb.controls.upper_sq.values],
        exclusions={
            str(r): sorted(emb.exclusion(r)) for r in range(1, emb.scope.max_radius + 1)
        },
        max_radius=emb.scope.max_radius,
        levels=list(emb.scope.levels),
        notes=list(emb.controls.notes) + list(notes or []),
    )


def control_rows(emb: FibredCCE) -> list[tuple[int, int | str | None, int | str | None]]:
    return [
        (t, fmt_number(emb.controls.lower_sq(t)), fmt_number(emb.controls.upper_sq(t)))
        for t in range(emb.controls.max_argument + 1)
    ]


def corrupt_upper(emb: FibredCCE, amount: Fraction) -> FibredCCE:
    """Certificate whose rho_2^2 is lowered by `amount`, for negative controls"""
    controls = emb.controls.with_upper(emb.controls.upper_sq.lowered(amount))
    return CertificateView(emb, controls=controls, label="corrupted-upper")
