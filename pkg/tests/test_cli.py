import json
import subprocess
import sys

import pytest

from algebroidkit import CHECKS, DESIGNATED, fixture, fixture_names
from algebroidkit.cli import main


@pytest.fixture(scope="module")
def fixture_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("fixtures")
    assert main(["fixtures", "--out", str(out)]) == 0
    return out


def run(*args):
    return main([str(a) for a in args])


def test_fixtures_command_writes_every_fixture(fixture_dir):
    assert sorted(p.stem for p in fixture_dir.glob("*.json")) == sorted(fixture_names())


def test_fixtures_command_single_and_unknown(tmp_path, capsys):
    assert run("fixtures", "e3", "--out", tmp_path) == 0
    assert [p.name for p in tmp_path.iterdir()] == ["e3.json"]
    assert run("fixtures", "e9", "--out", tmp_path) == 2


@pytest.mark.parametrize("name", list(DESIGNATED))
def test_designated_suites(fixture_dir, name, capsys):
    suite, failing = DESIGNATED[name]
    code = run("check", fixture_dir / f"{name}.json", "--suite", suite)
    out = capsys.readouterr().out
    if failing is None:
        assert code == 0, out
    else:
        assert code == 1
        fails = [line.split()[1] for line in out.splitlines() if line.startswith("FAIL")]
        assert fails == [failing]


def test_spec_examples(fixture_dir, capsys):
    assert run("check", fixture_dir / "e1.json", "--suite", "hamiltonian-symplectic") == 0
    assert run("check", fixture_dir / "e1.json", "--suite", "hamiltonian-poisson") == 3
    capsys.readouterr()
    assert run("check", fixture_dir / "e2-broken-mu.json", "--suite", "hamiltonian-poisson") == 1
    assert "failed: P2" in capsys.readouterr().out


def test_explain(capsys):
    assert run("explain", "P2") == 0
    assert "ρ^i_a − π^{ij}∇_j μ_a" in capsys.readouterr().out
    assert run("explain", "sharp-basic-curvature") == 0
    assert "π^{ij}S^c_{jab}μ_c" in capsys.readouterr().out
    assert run("explain", "no-such-check") == 2


def test_every_reported_check_can_be_explained(fixture_dir, tmp_path):
    names = set()
    for fx in ("e1", "e2", "e6"):
        path = tmp_path / f"{fx}.json"
        run("check", fixture_dir / f"{fx}.json", "--suite", "all", "--json", path)
        names |= {r["name"] for r in json.loads(path.read_text())["reports"]}
    flags = {n for n in names if "-matches-" in n}
    assert names - flags <= set(CHECKS)


def test_schema_error_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    doc = fixture("e1")
    doc["momentum"]["mu"] = ["(x"]
    bad.write_text(json.dumps(doc))
    assert run("check", bad, "--suite", "axioms") == 2
    assert "momentum.mu[0]" in capsys.readouterr().err
    assert run("check", tmp_path / "missing.json", "--suite", "axioms") == 2
    assert run("check", bad, "--suite", "nonsense") == 2


def test_missing_inputs_exit_3(fixture_dir):
    assert run("check", fixture_dir / "e3.json", "--suite", "geometry") == 3
    assert run("check", fixture_dir / "e3.json", "--suite", "morphisms") == 3
    assert run("check", fixture_dir / "e4.json", "--suite", "dirac") == 3


def test_json_report_is_deterministic_modulo_timestamp(fixture_dir, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        run("check", fixture_dir / "e6.json", "--suite", "all", "--json", path, "--points", 16, "--seed", 4)
    ra, rb = json.loads(a.read_text()), json.loads(b.read_text())
    ra.pop("timestamp"), rb.pop("timestamp")
    assert ra == rb
    assert ra["schema"] == "report-v1" and ra["plan"]["points"] == 16 and ra["plan"]["seed"] == 4
    assert len(ra["input_digest"]) == 64
    names = [r["name"] for r in ra["reports"]]
    assert names == sorted(names)


def test_all_suite_lists_skipped_suites(fixture_dir, tmp_path):
    path = tmp_path / "r.json"
    assert run("check", fixture_dir / "e3.json", "--suite", "all", "--json", path) == 0
    rep = json.loads(path.read_text())
    assert set(rep["skipped"]) == {"geometry", "hamiltonian-symplectic", "hamiltonian-poisson", "identities",
                                   "dirac", "morphisms"}


@pytest.mark.parametrize("suite", ["geometry", "identities", "courant", "dirac", "morphisms", "graded"])
def test_other_suites_pass_on_good_poisson_fixture(fixture_dir, suite):
    assert run("check", fixture_dir / "e6.json", "--suite", suite) == 0


@pytest.mark.parametrize("suite", ["geometry", "courant", "dirac", "morphisms", "graded"])
def test_other_suites_pass_on_good_symplectic_fixture(fixture_dir, suite):
    assert run("check", fixture_dir / "e5.json", "--suite", suite) == 0


def test_flags_override_file_options(fixture_dir, tmp_path):
    path = tmp_path / "r.json"
    # a loose tolerance lets the broken momentum through
    assert run("check", fixture_dir / "e2-broken-mu.json", "--suite", "hamiltonian-poisson", "--tol", 10) == 0
    run("check", fixture_dir / "e2.json", "--suite", "axioms", "--points", 7, "--json", path)
    assert json.loads(path.read_text())["reports"][0]["points"] == 7


def test_module_entry_point(fixture_dir):
    proc = subprocess.run([sys.executable, "-m", "algebroidkit", "check", str(fixture_dir / "e3.json"),
                           "--suite", "axioms"], capture_output=True, text=True)
    assert proc.returncode == 0 and "suite axioms: PASS" in proc.stdout
