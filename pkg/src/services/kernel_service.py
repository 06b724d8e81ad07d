import logging
from fractions import Fraction

import numpy as np

from src.fibred.controls import ControlPair
from src.groups.elements import GroupElement
from src.pipeline.backward import PsiResult, PsiTable, build_psi, limit_psi, verify_limit_psi
from src.pipeline.forward import forward
from src.pipeline.means import FoelnerMean
from src.services.catalog import CatalogService
from src.services.management.exceptions import CertificateError
from src.services.management.schemas import Report, RunConfig
from src.services.output_files import OutputService
from src.services.reporting import ReportBuilder, fmt_number
from src.utils.parallel import spawn_rngs
from src.utils.settings import get_settings

logger = logging.getLogger(__name__)

PSI_HEADER = ["element", "length", "value", "defect_bound"]


def psi_rows(table: PsiTable) -> list[tuple]:
    return [
        (element, length, fmt_number(value), fmt_number(bound))
        for element, length, value, bound in table.rows()
    ]


def limit_rows(table: PsiTable) -> list[tuple]:
    rows = [row + ("",) for row in psi_rows(table)]
    group = table.group
    for g in sorted(table.flags, key=group.sort_key):
        rows.append((group.format(g), group.word_length(g), "", "", table.flags[g]))
    return rows


class KernelService:
    """backward runs: k_r, phi_r and psi_r per radius, then the stabilized limit"""

    def __init__(self, catalog: CatalogService):
        self._catalog = catalog
        self._settings = get_settings()

    def backward(self, config: RunConfig, output: OutputService) -> Report:
        radii = config.radii or [config.max_radius]
        seed = config.seed if config.seed is not None else self._settings.seed
        bundle = self._catalog.build(config)
        emb = forward(bundle.group, bundle.chain, bundle.cocycle, radii[-1], config.levels)
        mean = self._catalog.mean(config, bundle.chain)
        builder = ReportBuilder(
            "backward",
            {**emb.constructor, "radii": radii, "mean": mean.label, "seed": seed},
        )
        builder.note(f"separation certified only up to radius {3 * radii[-1]}")
        for note in emb.controls.notes:
            builder.note(note)

        rngs = spawn_rngs(seed, len(radii) + 1)
        tables: list[PsiTable] = []
        for r, rng in zip(radii, rngs):
            try:
                result = build_psi(bundle.group, bundle.chain, emb, r, mean, rng=rng, tol=config.tolerance)
            except CertificateError as exc:
                builder.check(f"k_{r} well-defined", "kernel/well-defined", False, [str(exc)], radius=r)
                continue
            self._record_psi(builder, result)
            tables.append(result.table)
            output.write_csv(f"psi_r{r}.csv", PSI_HEADER, psi_rows(result.table))

        limit = limit_psi(tables, bundle.group)
        self._record_limit(builder, limit, emb.controls, rngs[-1], config.tolerance)
        output.write_csv("psi_limit.csv", PSI_HEADER + ["flag"], limit_rows(limit))
        report = builder.build()
        output.write_model("report.json", report)
        logger.info("backward: summary %s over %d checks", report.summary, len(report.checks))
        return report

    @staticmethod
    def _record_psi(builder: ReportBuilder, result: PsiResult) -> None:
        table, kernel = result.table, result.kernel
        group = table.group
        r = table.radius
        builder.check(
            f"k_{r} well-defined",
            "kernel/well-defined",
            True,
            radius=r,
            level=kernel.level,
            single_cover_pairs=kernel.single_cover_pairs,
        )
        builder.check(
            f"k_{r} sandwich",
            "kernel/sandwich",
            not kernel.sandwich_violations,
            [f"k({x.coords}, {y.coords}) = {v}" for x, y, v in kernel.sandwich_violations],
            radius=r,
            violations=len(kernel.sandwich_violations),
        )
        local = result.local_cnd
        builder.check(
            f"psi_{r} local CND",
            "psi/local-cnd",
            local.verdict,
            [str([group.format(g) for g in subset]) for subset in local.failing_subsets],
            radius=r,
            subsets=local.subsets_checked,
            worst_eigenvalue=local.worst_eigenvalue,
            disagreements=local.disagreements,
        )
        builder.check(
            f"psi_{r} properness envelope",
            "psi/envelope",
            not result.envelope_violations,
            [group.format(g) for g in result.envelope_violations],
            radius=r,
        )
        broken: list[GroupElement] = []
        worst = Fraction(0)
        for g in table.values:
            defect = table.symmetry_defect(g)
            worst = max(worst, defect)
            if defect > table.defect_bounds.get(g, Fraction(0)):
                broken.append(g)
        builder.check(
            f"psi_{r} symmetry",
            "psi/symmetry",
            not broken,
            [group.format(g) for g in broken],
            radius=r,
            max_defect=worst,
            max_bound=max(table.defect_bounds.values(), default=Fraction(0)),
            mean=table.mean,
        )

    @staticmethod
    def _record_limit(
        builder: ReportBuilder,
        limit: PsiTable,
        controls: ControlPair,
        rng: np.random.Generator,
        tol: float | None,
    ) -> None:
        group = limit.group
        builder.check(
            "psi stabilization",
            "psi-limit/stabilization",
            True,
            [f"{group.format(g)}: {limit.flags[g]}" for g in sorted(limit.flags, key=group.sort_key)],
            stabilized=len(limit.values),
            flagged=len(limit.flags),
            radius=limit.radius,
        )
        if not limit.values:
            builder.note("no psi entry stabilized; the limit checks were skipped")
            return
        check = verify_limit_psi(limit, controls, rng, tol)
        builder.check(
            "psi global CND",
            "psi-limit/global-cnd",
            check.global_cnd.verdict,
            [str([group.format(g) for g in subset]) for subset in check.global_cnd.failing_subsets],
            subsets=check.global_cnd.subsets_checked,
            worst_eigenvalue=check.global_cnd.worst_eigenvalue,
        )
        builder.check(
            "psi properness envelope",
            "psi-limit/envelope",
            not check.envelope_violations,
            [group.format(g) for g in check.envelope_violations],
        )
        if limit.mean.startswith(FoelnerMean.mode):
            builder.note("Foelner averaging: symmetry holds up to the reported defect bounds")
