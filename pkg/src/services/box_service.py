import logging

from src.chains.box import BoxSpace, component_separation, describe_components, family_rows, verify_box_metric
from src.chains.chain import coset_minimum_table, separation_table, spot_check_chain
from src.services.catalog import CatalogService
from src.services.management.schemas import Report, RunConfig
from src.services.output_files import OutputService
from src.services.reporting import ReportBuilder, fmt_point
from src.utils.parallel import spawn_rngs
from src.utils.settings import get_settings

logger = logging.getLogger(__name__)

ORACLE_RADIUS = 8


class BoxService:
    """boxfam runs: component tables, quotient lengths, d' axioms and separation tables"""

    def __init__(self, catalog: CatalogService):
        self._catalog = catalog
        self._settings = get_settings()

    def boxfam(self, config: RunConfig, output: OutputService) -> Report:
        seed = config.seed if config.seed is not None else self._settings.seed
        bundle = self._catalog.build(config, with_cocycle=False)
        chain = bundle.chain
        space = BoxSpace(chain, config.levels)
        metric_rng, structure_rng = spawn_rngs(seed, 2)
        builder = ReportBuilder(
            "boxfam",
            {
                "group": bundle.group.signature,
                "chain": chain.signature,
                "levels": list(space.levels),
                "seed": seed,
            },
        )

        components = describe_components(space)
        output.write_csv(
            "components.csv",
            ["level", "quotient", "size", "bounded", "witness"],
            [(c.level, c.tag, c.size, "bounded" if c.bounded else "unbounded", c.witness) for c in components],
        )
        output.write_csv(
            "box_family.csv",
            ["component", "coset", "length"],
            family_rows(space, self._settings.metric_sample_radius),
        )

        structure = spot_check_chain(chain, rng=structure_rng)
        builder.check(
            "chain structure spot checks",
            "chain/structure",
            structure.ok,
            [bundle.group.format(g) for g in structure.nesting + structure.lipschitz]
            + [f"{bundle.group.format(g)} under {bundle.group.format(x)}" for g, x in structure.normality],
            nesting=len(structure.nesting),
            normality=len(structure.normality),
            homomorphism=len(structure.homomorphism),
            lipschitz=len(structure.lipschitz),
        )
        self._quotient_lengths(builder, space)

        metric = verify_box_metric(
            space,
            samples=self._settings.metric_samples,
            rng=metric_rng,
            radius=self._settings.metric_sample_radius,
        )
        builder.check(
            "box metric axioms",
            "box-space/metric",
            metric.ok,
            [f"{fmt_point(space, x)}, {fmt_point(space, y)}, {fmt_point(space, z)}" for x, y, z in metric.triangle]
            + [f"{fmt_point(space, x)}, {fmt_point(space, y)}" for x, y in metric.symmetry + metric.indiscernibles],
            triples=metric.triples_checked,
            symmetry=len(metric.symmetry),
            indiscernibles=len(metric.indiscernibles),
            triangle=len(metric.triangle),
        )

        rows, mismatched = [], []
        for n in space.levels:
            for m in space.levels:
                if n == m:
                    continue
                d = component_separation(space, n, m)
                rows.append((n, m, d))
                if d != n + m:
                    mismatched.append(f"({n}, {m}) at distance {d}")
        output.write_csv("component_separation.csv", ["n", "m", "distance"], rows)
        builder.check(
            "component separation n + m", "box-space/separation", not mismatched, mismatched, pairs=len(rows)
        )

        radius = 3 * config.max_radius
        separation = separation_table(chain, radius)
        output.write_csv("separation.csv", ["radius", "level"], separation)
        failing = [r for r, n in separation if n is None]
        if failing:
            builder.note(f"separation fails from radius {failing[0]} within depth {chain.depth}")
        builder.note(f"separation certified only up to radius {radius}")

        report = builder.build()
        output.write_model("report.json", report)
        logger.info("boxfam: summary %s over %d checks", report.summary, len(report.checks))
        return report

    @staticmethod
    def _quotient_lengths(builder: ReportBuilder, space: BoxSpace) -> None:
        """BFS quotient length against the coset minimum over ball(ORACLE_RADIUS) of the parent"""
        chain = space.chain
        mismatched, compared = [], 0
        for n in space.levels:
            quotient = chain.quotient(n)
            for q, length in coset_minimum_table(chain, n, ORACLE_RADIUS).items():
                compared += 1
                if quotient.word_length(q) != length:
                    mismatched.append(f"level {n}: {quotient.format(q)}")
        builder.check(
            "quotient length oracle",
            "chain/quotient-length",
            not mismatched,
            mismatched,
            compared=compared,
            radius=ORACLE_RADIUS,
        )
