import json

import pytest

from src.cli.exception import ExitCode
from src.cli.router import build_parser, run
from src.services.reporting import CLAUSES

Z_RUN = "group = intlattice(1)\nchain = pow2(levels=6)\n"


def write_config(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def invoke(tmp_path, command, text, *extra):
    out = tmp_path / command
    code = run([command, "--config", write_config(tmp_path, text), "--out", str(out), *extra])
    return code, out


def test_boxfam(tmp_path):
    code, out = invoke(tmp_path, "boxfam", "group = intlattice(1)\nchain = pow2(levels=4)\n")
    assert code == ExitCode.OK
    for name in ("components.csv", "box_family.csv", "component_separation.csv", "separation.csv"):
        assert (out / name).exists()
    report = json.loads((out / "report.json").read_text())
    assert report["command"] == "boxfam"
    assert report["summary"] is True
    assert (out / "component_separation.csv").read_text().splitlines()[1] == "1,2,3"


def test_forward_writes_certificate(tmp_path):
    code, out = invoke(tmp_path, "forward", Z_RUN + "max_radius = 8\n")
    assert code == ExitCode.OK
    manifest = json.loads((out / "certificate.json").read_text())
    assert manifest["constructor"]["group"] == "intlattice(1)"
    assert manifest["exclusions"]["4"] == [1, 2, 3]
    assert manifest["upper_sq"][:4] == ["0", "1", "4", "9"]
    assert (out / "controls.csv").read_text().splitlines()[:3] == ["t,rho1_sq,rho2_sq", "0,0,0", "1,1,1"]


def test_forward_with_corrupted_upper_control(tmp_path):
    code, out = invoke(tmp_path, "forward", Z_RUN + "corrupt_upper = 1\n")
    assert code == ExitCode.CHECKS_FAILED
    report = json.loads((out / "report.json").read_text())
    assert any(not check["verdict"] and check["witnesses"] for check in report["checks"])


def test_forward_checks_name_registered_clauses(tmp_path):
    code, out = invoke(tmp_path, "forward", Z_RUN)
    assert code == ExitCode.OK
    checks = json.loads((out / "report.json").read_text())["checks"]
    assert {check["clause"] for check in checks} <= set(CLAUSES)
    cocycle = [check for check in checks if check["clause"] == "cocycle/identity"]
    assert cocycle and all(check["verdict"] for check in cocycle)


def test_verify_cert_accepts_and_rejects_manifests(tmp_path):
    code, out = invoke(tmp_path, "forward", Z_RUN + "max_radius = 4\n")
    assert code == ExitCode.OK
    manifest = out / "certificate.json"
    verified = tmp_path / "verified"
    assert run(["verify-cert", "--manifest", str(manifest), "--out", str(verified)]) == ExitCode.OK
    assert json.loads((verified / "report.json").read_text())["command"] == "verify-cert"

    data = json.loads(manifest.read_text())
    data["upper_sq"][3] = "5"
    tampered = tmp_path / "tampered.json"
    tampered.write_text(json.dumps(data))
    assert run(["verify-cert", "--manifest", str(tampered), "--out", str(verified)]) == ExitCode.CHECKS_FAILED


def test_verify_cert_needs_a_manifest(tmp_path):
    assert run(["verify-cert", "--out", str(tmp_path)]) == ExitCode.CONFIGURATION
    broken = tmp_path / "broken.json"
    broken.write_text("{}")
    assert run(["verify-cert", "--manifest", str(broken), "--out", str(tmp_path)]) == ExitCode.CONFIGURATION


def test_backward_limit_table(tmp_path):
    code, out = invoke(tmp_path, "backward", Z_RUN + "radii = 4, 6, 8\n")
    assert code == ExitCode.OK
    for r in (4, 6, 8):
        assert (out / f"psi_r{r}.csv").exists()
    lines = (out / "psi_limit.csv").read_text().splitlines()
    assert lines[0] == "element,length,value,defect_bound,flag"
    assert lines[1] == "(0),0,0,0,"
    assert "(5),5,25,0," in lines
    report = json.loads((out / "report.json").read_text())
    assert report["metadata"]["mean"] == "uniform"


def test_pullback_along_doubling(tmp_path):
    code, out = invoke(tmp_path, "pullback", Z_RUN + "max_radius = 9\nmaps = doubling\n")
    assert code == ExitCode.OK
    manifest = json.loads((out / "certificate.json").read_text())
    assert manifest["constructor"]["pullback"] == "doubling"
    assert manifest["max_radius"] == 4
    report = json.loads((out / "report.json").read_text())
    assert report["checks"][0]["name"] == "coarse maps doubling"


@pytest.mark.parametrize(
    "text, expected",
    [
        (Z_RUN + "colour = blue\n", ExitCode.CONFIGURATION),
        ("group = intlattice(1)\n", ExitCode.CONFIGURATION),
        (Z_RUN + "max_radius = 22\n", ExitCode.SCOPE),
        ("group = heisenberg\nchain = pow2(levels=2)\n", ExitCode.CONFIGURATION),
    ],
)
def test_aborted_runs(tmp_path, text, expected):
    code, _ = invoke(tmp_path, "forward", text)
    assert code == expected


def test_same_seed_gives_identical_reports(tmp_path):
    first, second = tmp_path / "a", tmp_path / "b"
    config = write_config(tmp_path, Z_RUN)
    for out in (first, second):
        assert run(["forward", "--config", config, "--seed", "7", "--out", str(out)]) == ExitCode.OK
    assert (first / "report.json").read_bytes() == (second / "report.json").read_bytes()


def test_mean_flag_is_validated():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["backward", "--mean", "median"])
    assert build_parser().parse_args(["backward", "--mean", "Foelner:3"]).mean == "foelner:3"


def test_pullback_along_csv_tables_can_be_reverified(tmp_path):
    maps_path = tmp_path / "maps.csv"
    maps_path.write_text(
        "source_level,source_coset,target_level,target_coset\n" + "".join(f"5,{c},5,{c}\n" for c in range(32))
    )
    controls_path = tmp_path / "controls.csv"
    controls_path.write_text("t,m,M\n" + "".join(f"{t},{t},{t}\n" for t in range(17)))
    text = Z_RUN + f"max_radius = 8\nmaps = csv\nmap_table = {maps_path}\ncontrol_table = {controls_path}\n"
    code, out = invoke(tmp_path, "pullback", text)
    assert code == ExitCode.OK
    constructor = json.loads((out / "certificate.json").read_text())["constructor"]
    assert constructor["maps"] == "csv"
    assert constructor["map_table"] == str(maps_path.resolve())
    assert constructor["control_table"] == str(controls_path.resolve())
    assert constructor["source_levels"] == [5]

    verified = tmp_path / "verified"
    manifest = out / "certificate.json"
    assert run(["verify-cert", "--manifest", str(manifest), "--out", str(verified)]) == ExitCode.OK
