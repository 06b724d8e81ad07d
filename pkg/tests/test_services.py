from fractions import Fraction

import pytest
from pydantic import ValidationError

from src.services import get_catalog_service, get_config_service, get_output_service
from src.services.management.exceptions import ConfigParseError, ConfigurationError, FileAccessError, ToolkitError
from src.services.management.schemas import SCHEMA_VERSION, CertificateManifest, RunConfig
from src.services.reporting import CLAUSES, MAX_WITNESSES, ReportBuilder, fmt_number
from src.utils.settings import get_settings

CONFIG = """
# Z with dyadic quotients
group = intlattice(1)
chain = pow2(levels=6)
max-radius = 5
radii = 2, 4
"""


def test_parse_text_normalizes_keys():
    values = get_config_service().parse_text(CONFIG)
    assert values == {
        "group": "intlattice(1)",
        "chain": "pow2(levels=6)",
        "max_radius": "5",
        "radii": "2, 4",
    }


@pytest.mark.parametrize(
    "text",
    [
        "group intlattice(1)",
        "colour = blue",
        "seed = 1\nseed = 2",
        "= 3",
    ],
)
def test_parse_text_rejects(text):
    with pytest.raises(ConfigParseError):
        get_config_service().parse_text(text)


def test_load_applies_overrides(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(CONFIG)
    config = get_config_service().load(path, {"seed": 3, "mean": None, "max_radius": 2})
    assert config.seed == 3
    assert config.mean is None
    assert config.max_radius == 2
    assert config.radii == [2, 4]


def test_load_missing_file(tmp_path):
    with pytest.raises(ConfigurationError):
        get_config_service().load(tmp_path / "absent.cfg")


@pytest.mark.parametrize(
    "values",
    [
        {"radii": "6, 4"},
        {"radii": "0"},
        {"levels": "0, 1"},
        {"maps": "sideways"},
        {"maps": "csv", "map_table": "maps.csv"},
        {"corrupt_upper": "0"},
        {"corrupt_upper": "lots"},
        {"max_radius": "0"},
    ],
)
def test_invalid_run_configs(values):
    with pytest.raises(ConfigurationError):
        get_config_service().validate(values)


def test_run_config_defaults():
    config = RunConfig()
    assert config.max_radius == 4
    assert config.maps == "identity"
    assert config.finiteness_bound == 1
    assert config.radii == []


def test_manifest_schema():
    manifest = CertificateManifest(constructor={}, lower_sq=["0", "1/2"], upper_sq=["0", "1"], max_radius=1)
    assert manifest.schema_version == SCHEMA_VERSION
    with pytest.raises(ValidationError):
        CertificateManifest(constructor={}, lower_sq=["x"], upper_sq=["0"], max_radius=1)
    with pytest.raises(ValidationError):
        CertificateManifest(schema_version="0.1", constructor={}, lower_sq=["0"], upper_sq=["0"], max_radius=1)


def test_report_builder():
    builder = ReportBuilder("forward", {"seed": 0})
    builder.check("first", "chain/structure", True, value=Fraction(1, 2), count=Fraction(4))
    builder.check("second", "chain/separation", False, [f"w{i}" for i in range(8)])
    builder.note("only once")
    builder.note("only once")
    report = builder.build()
    assert not report.summary
    assert report.checks[0].numbers == {"value": "1/2", "count": 4}
    assert len(report.checks[1].witnesses) == MAX_WITNESSES
    assert report.notes == ["only once"]


def test_report_builder_rejects_unknown_clause():
    builder = ReportBuilder("forward", {})
    with pytest.raises(ToolkitError):
        builder.check("loose", "clause", True)
    assert not builder.checks
    assert all(statement for statement in CLAUSES.values())


@pytest.mark.parametrize(
    "value, expected",
    [(Fraction(3), 3), (Fraction(-2, 6), "-1/3"), (1.5, 1.5), (None, None)],
)
def test_fmt_number(value, expected):
    assert fmt_number(value) == expected


def test_output_service(tmp_path):
    output = get_output_service(tmp_path / "run")
    path = output.write_csv("tables/rows.csv", ["a", "b"], [(1, None), ("x", Fraction(1, 3))])
    assert output.read_file(path) == "a,b\n1,\nx,1/3\n"
    with pytest.raises(FileAccessError):
        output.read_file(tmp_path / "missing.csv")


def test_catalog_builds_bundle():
    bundle = get_catalog_service().build(RunConfig(group="free(2)", chain="lcs(levels=2)"))
    assert bundle.group.signature == "free(2)"
    assert bundle.chain.depth == 2
    assert bundle.cocycle.tag == "free-wall"
    with pytest.raises(ConfigurationError):
        get_catalog_service().build(RunConfig(group="free(2)"))


def test_catalog_mean_defaults():
    catalog = get_catalog_service()
    z = RunConfig(group="intlattice(1)", chain="pow2(levels=3)")
    assert catalog.mean(z, catalog.build(z).chain).label == "uniform"
    f2 = RunConfig(group="free(2)", chain="lcs(levels=2)")
    assert catalog.mean(f2, catalog.build(f2).chain).label == "foelner:2"
    chosen = f2.model_copy(update={"mean": "foelner:3"})
    assert catalog.mean(chosen, catalog.build(chosen).chain).label == "foelner:3"


def test_cocycle_check_radius_from_environment(monkeypatch):
    monkeypatch.setenv("BOXHAAG_COCYCLE_CHECK_RADIUS", "3")
    get_settings.cache_clear()
    settings = get_settings()
    assert settings.cocycle_check_radius == 3
    assert not hasattr(settings, "float_residual_tolerance")
