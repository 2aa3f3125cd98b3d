import json
from importlib import resources

import jsonschema
import pytest

from voganish import cli
from voganish.cli import Check, OrbitCatalog, ks_verify, main
from voganish.evs import RankDisagreement
from voganish.multiseg import enumerate_orbits, named

FAST = ["orbit_count", "arthur_shape", "jordan_partitions", "orbit_dimensions"]


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_orbits_count(capsys):
    code, out, _ = run(capsys, "orbits", "--count")
    assert code == 0 and json.loads(out) == {"count": 1138}
    code, out, _ = run(capsys, "orbits", "--mults", "1,1", "--count")
    assert json.loads(out) == {"count": 2}


def test_dual_dim_leq(capsys):
    code, out, _ = run(capsys, "dual", "--triangle", "L")
    assert code == 0 and json.loads(out) == named("R").to_text()
    code, out, _ = run(capsys, "dim", "--triangle", "KS")
    assert json.loads(out) == {"dim": 32, "dim_V": 48}
    code, out, _ = run(capsys, "leq", "--a", "KS", "--b", "psi")
    assert json.loads(out) is True


def test_triangle_from_file_and_stdin(capsys, tmp_path, monkeypatch):
    f = tmp_path / "t.txt"
    f.write_text(named("psi").to_text())
    code, out, _ = run(capsys, "dim", "--triangle", str(f))
    assert code == 0 and json.loads(out)["dim"] == 40
    import io
    monkeypatch.setattr("sys.stdin", io.StringIO(json.dumps(named("R").to_json())))
    code, out, _ = run(capsys, "dim", "--triangle", "-")
    assert code == 0 and json.loads(out)["dim"] == 36


def test_partition_and_cover(capsys):
    code, out, _ = run(capsys, "partition", "--triangle", "psi")
    assert json.loads(out) == [4, 4, 2, 2, 2, 2]
    code, out, _ = run(capsys, "cover", "--triangle", "R")
    assert code == 0 and len(json.loads(out)["conditions_text"]) == 5


def test_fibre(capsys):
    code, out, _ = run(capsys, "fibre", "--cover", "psi")
    obj = json.loads(out)
    assert code == 0 and obj["dimension_from_chains"] == 4


def test_between_uses_the_cache(capsys, tmp_path):
    lower = "1 2 2 1 / 0 0 0 / 0 0 / 0"
    code, out, _ = run(capsys, "between", "--lower", lower, "--cache-dir", str(tmp_path))
    assert code == 0
    assert len(json.loads(out)) == len(enumerate_orbits((1, 2, 2, 1))) - 1
    assert list(tmp_path.iterdir())


def test_exit_code_parse(capsys):
    code, _, err = run(capsys, "dim", "--triangle", "2 4 4 4 2 / 2 3 3 / 0")
    assert code == 1 and "parse error" in err
    assert run(capsys, "no-such-command")[0] == 1
    assert run(capsys, "orbits", "--mults", "a,b")[0] == 1


def test_exit_code_precondition(capsys):
    code, _, err = run(capsys, "fibre", "--cover", "R", "--at", "psi")
    assert code == 2 and "precondition" in err
    assert run(capsys, "leq", "--a", "KS", "--b", "1 1 / 0")[0] == 2


def test_exit_code_check(capsys, monkeypatch):
    def bad(seed):
        return Check("always_fails", 1, 2, "exact", "test", False)

    monkeypatch.setattr(cli, "CHECKS", [("always_fails", bad)])
    code, out, _ = run(capsys, "ks-verify")
    assert code == 3 and json.loads(out)["verdict"] == "FAIL"

    def raises(args):
        raise RankDisagreement("sampled ranks differ")

    monkeypatch.setitem(cli.COMMANDS, "dim", raises)
    assert run(capsys, "dim", "--triangle", "KS")[0] == 3


def test_exit_code_budget(capsys):
    code, _, err = run(capsys, "hessian", "--max-seconds", "0")
    assert code == 4 and "budget" in err


def test_catalog_cache_roundtrip(tmp_path):
    mults = (1, 2, 2, 1)
    a = OrbitCatalog.build(mults, cache_dir=str(tmp_path))
    assert not a.from_cache
    b = OrbitCatalog.fit(mults, cache_dir=str(tmp_path))
    assert b.from_cache
    assert b.triangles == a.triangles and b.dims == a.dims and b.duals == a.duals


def test_corrupt_cache_is_rebuilt(tmp_path):
    mults = (1, 2, 2, 1)
    a = OrbitCatalog.build(mults, cache_dir=str(tmp_path))
    (path,) = list(tmp_path.iterdir())
    obj = json.loads(path.read_text())
    obj["entries"][0]["dual"] = 1 if obj["entries"][0]["dual"] != 1 else 2
    path.write_text(json.dumps(obj))
    b = OrbitCatalog.build(mults, cache_dir=str(tmp_path))
    assert not b.from_cache and b.duals == a.duals
    path.write_text("{ truncated")
    c = OrbitCatalog.build(mults, cache_dir=str(tmp_path))
    assert not c.from_cache and c.duals == a.duals


def test_env_cache_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("VOGANISH_CACHE", str(tmp_path))
    OrbitCatalog.build((1, 2, 1))
    assert [p.name for p in tmp_path.iterdir()] == ["catalog-1_2_1-v0.1.0.json"]


def _schema():
    return json.loads(resources.files("voganish").joinpath("schemas", "report-v1.json").read_text())


def test_report_is_deterministic_and_valid():
    a = ks_verify(seed=0, only=FAST).to_json()
    b = ks_verify(seed=0, only=FAST).to_json()
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
    assert a["verdict"] == "PASS" and {c["name"] for c in a["checks"]} == set(FAST)
    jsonschema.validate(a, _schema())


def test_parallel_report_matches_serial():
    a = ks_verify(seed=0, only=FAST).to_json()
    b = ks_verify(seed=0, jobs=2, only=FAST).to_json()
    assert a == b


def test_ks_verify_writes_report(capsys, tmp_path):
    out = tmp_path / "report.json"
    code, _, _ = run(capsys, "ks-verify", "--only", "orbit_count", "arthur_shape", "--out", str(out))
    assert code == 0
    rep = json.loads(out.read_text())
    jsonschema.validate(rep, _schema())
    assert rep["verdict"] == "PASS"


def test_crashing_check_is_reported(monkeypatch):
    def boom(seed):
        raise ZeroDivisionError("boom")

    monkeypatch.setattr(cli, "CHECKS", [("boom", boom)])
    rep = ks_verify(only=None).to_json()
    assert rep["verdict"] == "FAIL" and rep["checks"][0]["tag"] == "error"
    jsonschema.validate(rep, _schema())
