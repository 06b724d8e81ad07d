import logging
from fractions import Fraction
from pathlib import Path

from pydantic import ValidationError

from src.chains.box import BoxFamily
from src.coarse.maps import CoarseMapFamily, csv_maps, doubling_maps, identity_maps, verify_coarse
from src.coarse.pullback import PullbackCertificate, pullback_fibred
from src.fibred.certificate import CertificateScope, CertificateView, FibredCCE
from src.fibred.controls import ControlPair, MonotoneTable
from src.hilbert.cocycles import verify_cocycle
from src.pipeline.forward import ForwardCertificate, forward
from src.services.catalog import CatalogService
from src.services.certificate_checks import (
    CertificateChecker,
    check_transfer,
    control_rows,
    corrupt_upper,
    manifest_for,
)
from src.services.management.exceptions import ConfigurationError, ScopeError
from src.services.management.schemas import CertificateManifest, Report, RunConfig
from src.services.output_files import OutputService
from src.services.reporting import ReportBuilder, fmt_point
from src.utils.parallel import make_rng
from src.utils.settings import get_settings

logger = logging.getLogger(__name__)

COARSE = "coarse-embedding/controls"


class EmbeddingService:
    """forward, verify-cert and pullback runs: build or rebuild a certificate, verify it, write the manifest"""

    def __init__(self, catalog: CatalogService):
        self._catalog = catalog
        self._settings = get_settings()

    def _seed(self, config: RunConfig) -> int:
        return config.seed if config.seed is not None else self._settings.seed

    def _metadata(self, config: RunConfig, emb: FibredCCE) -> dict:
        return {
            **emb.constructor,
            "seed": self._seed(config),
            "scope_radius": emb.scope.max_radius,
            "corrupt_upper": config.corrupt_upper,
        }

    def _base_certificate(self, config: RunConfig, max_radius: int) -> ForwardCertificate:
        bundle = self._catalog.build(config)
        return forward(bundle.group, bundle.chain, bundle.cocycle, max_radius, config.levels)

    def _verify(self, emb: FibredCCE, builder: ReportBuilder, config: RunConfig, label: str = "") -> None:
        CertificateChecker(self._seed(config)).run(emb, builder, label)

    def _write(self, output: OutputService, report: Report, emb: FibredCCE, manifest: CertificateManifest) -> None:
        output.write_model("report.json", report)
        output.write_model("certificate.json", manifest)
        output.write_csv("controls.csv", ["t", "rho1_sq", "rho2_sq"], control_rows(emb))

    def forward(self, config: RunConfig, output: OutputService) -> Report:
        base = self._base_certificate(config, config.max_radius)
        emb: FibredCCE = base
        if config.corrupt_upper:
            emb = corrupt_upper(base, Fraction(config.corrupt_upper))
        builder = ReportBuilder("forward", self._metadata(config, emb))
        builder.note(f"separation certified only up to radius {3 * base.scope.max_radius}")
        for note in emb.controls.notes:
            builder.note(note)
        builder.check(
            "required levels n_r",
            "chain/separation",
            True,
            **{f"r{r}": base.required_level(r) for r in range(1, base.scope.max_radius + 1)},
        )
        self._verify(emb, builder, config)
        self._check_cocycle(base, builder)
        check_transfer(emb, builder)
        report = builder.build()
        self._write(output, report, emb, manifest_for(emb))
        logger.info("forward: summary %s over %d checks", report.summary, len(report.checks))
        return report

    def _check_cocycle(self, base: ForwardCertificate, builder: ReportBuilder) -> None:
        cocycle = base.cocycle
        radius = self._settings.cocycle_check_radius
        report = verify_cocycle(cocycle, radius)
        group = cocycle.group
        witnesses = [f"{group.format(g)}, {group.format(h)}" for g, h in report.identity_failures]
        witnesses += [f"L({group.format(g)}) is not isometric" for g in report.non_isometric]
        builder.check(
            f"cocycle {cocycle.signature} on ball({radius})",
            "cocycle/identity",
            report.ok,
            witnesses,
            pairs=report.pairs_checked,
            identity_failures=len(report.identity_failures),
            non_isometric=len(report.non_isometric),
        )

    def verify_certificate(self, config: RunConfig, output: OutputService) -> Report:
        if not config.manifest:
            raise ConfigurationError("verify-cert needs a manifest")
        manifest = self.load_manifest(Path(config.manifest))
        emb = self.rebuild(manifest, config)
        builder = ReportBuilder("verify-cert", {**manifest.constructor, "seed": self._seed(config)})
        for note in manifest.notes:
            builder.note(note)
        self._verify(emb, builder, config)
        report = builder.build()
        output.write_model("report.json", report)
        logger.info("verify-cert: summary %s over %d checks", report.summary, len(report.checks))
        return report

    @staticmethod
    def load_manifest(path: Path) -> CertificateManifest:
        text = OutputService.read_file(path)
        try:
            return CertificateManifest.model_validate_json(text)
        except ValidationError as exc:
            raise ConfigurationError(f"Invalid certificate manifest {path}: {exc}") from exc

    def rebuild(self, manifest: CertificateManifest, config: RunConfig) -> FibredCCE:
        """Oracle from the named constructor; controls, exclusions and scope from the manifest"""
        ctor = manifest.constructor
        try:
            rebuilt = config.model_copy(
                update={
                    "group": ctor["group"],
                    "chain": ctor["chain"],
                    "cocycle": ctor["cocycle"],
                    "levels": ctor.get("levels"),
                    "maps": ctor.get("maps", "identity"),
                    "map_table": ctor.get("map_table"),
                    "control_table": ctor.get("control_table"),
                    "finiteness_bound": ctor.get("finiteness_bound", 1),
                }
            )
            oracle: FibredCCE = self._base_certificate(rebuilt, int(ctor["max_radius"]))
        except KeyError as exc:
            raise ConfigurationError(f"Manifest constructor misses {exc}") from exc
        if "pullback" in ctor:
            maps = self._maps(rebuilt, oracle, ctor.get("source_levels"))
            oracle = pullback_fibred(oracle, maps, rebuilt.finiteness_bound)

        exclusions = {int(r): frozenset(levels) for r, levels in manifest.exclusions.items()}

        def exclusion(r: int) -> frozenset[int]:
            if r not in exclusions:
                raise ScopeError(f"Manifest lists no exclusion for radius {r}")
            return exclusions[r]

        controls = ControlPair.unchecked(
            MonotoneTable.from_values((Fraction(v) for v in manifest.lower_sq), "rho1^2"),
            MonotoneTable.from_values((Fraction(v) for v in manifest.upper_sq), "rho2^2"),
            tuple(manifest.notes),
        )
        scope = CertificateScope(max_radius=manifest.max_radius, levels=tuple(manifest.levels))
        return CertificateView(oracle, controls=controls, exclusion=exclusion, scope=scope, label="manifest")

    def _maps(
        self, config: RunConfig, base: FibredCCE, source_levels: list[int] | None = None
    ) -> CoarseMapFamily:
        chain = base.family.chain
        max_distance = max(
            [base.scope.max_radius]
            + [space.diameter() or 0 for space in base.family.components()]
            + [2 * self._settings.metric_sample_radius]
        )
        if config.maps == "identity":
            return identity_maps(base.family, max_distance)
        if config.maps == "doubling":
            levels = source_levels or [n for n in base.family.levels if n + 1 in base.family.levels]
            return doubling_maps(BoxFamily(chain, levels), base.family, max_distance, config.net_constant)
        if config.maps == "csv":
            if not (config.map_table and config.control_table):
                raise ConfigurationError("csv maps need both map_table and control_table")
            return csv_maps(
                Path(config.map_table), Path(config.control_table), base.family, source_levels, config.net_constant
            )
        raise ConfigurationError(f"Cannot rebuild coarse maps '{config.maps}'")

    def pullback(self, config: RunConfig, output: OutputService) -> Report:
        base = self._base_certificate(config, config.max_radius)
        maps = self._maps(config, base)
        pulled: PullbackCertificate = pullback_fibred(base, maps, config.finiteness_bound)
        emb: FibredCCE = pulled
        if config.corrupt_upper:
            emb = corrupt_upper(pulled, Fraction(config.corrupt_upper))
        builder = ReportBuilder("pullback", self._metadata(config, emb))
        builder.note(
            f"target certificate radius {base.scope.max_radius}, pulled back up to r={pulled.scope.max_radius}"
        )

        threshold = self._settings.unboundedness_threshold
        coarse = verify_coarse(
            maps,
            samples=self._settings.metric_samples,
            rng=make_rng(self._seed(config)),
            threshold=threshold,
        )
        builder.note(f"lim m = infinity read as m({maps.lower.max_argument}) >= {threshold}")
        witnesses = [
            f"{fmt_point(maps.source, x)} ~ {fmt_point(maps.source, y)}: d={d}, image distance {image}"
            for x, y, d, image in coarse.lower_violations + coarse.upper_violations
        ]
        witnesses += [f"{fmt_point(maps.target, y)} is farther than C from the images" for y in coarse.net_violations]
        builder.check(
            f"coarse maps {maps.name}",
            COARSE,
            coarse.ok,
            witnesses,
            pairs=coarse.pairs_checked,
            lower_violations=len(coarse.lower_violations),
            upper_violations=len(coarse.upper_violations),
            net_violations=len(coarse.net_violations),
            uncovered_targets=len(coarse.uncovered_targets),
        )
        self._verify(emb, builder, config, label="pullback ")
        report = builder.build()
        self._write(output, report, emb, manifest_for(emb))
        logger.info("pullback: summary %s over %d checks", report.summary, len(report.checks))
        return report
