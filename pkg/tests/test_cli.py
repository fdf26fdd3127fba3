import json

import pytest

from hyperroots import cli


def run(capsys, *args):
    code = cli.main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_list(capsys):
    code, out, _ = run(capsys, "list", "--format", "json")
    assert code == 0
    rows = {r["name"]: r for r in json.loads(out)}
    assert (rows["A2"]["k"], rows["A2"]["N"], rows["A2"]["r_E"], rows["A2"]["lattice_rank"], rows["A2"]["R"]) == (2, 5, 6, 12, 100)
    assert (rows["A4"]["lattice_rank"], rows["A4"]["R"]) == (30, 490)
    assert (rows["A0"]["lattice_rank"], rows["A0"]["R"]) == (2, 6)


def test_gram_json(capsys, tmp_path):
    code, out, _ = run(capsys, "gram", "-s", "L0", "--format", "json", "--cache-dir", str(tmp_path))
    assert code == 0
    assert json.loads(out)["gram"] == [[6, -3], [-3, 6]]


@pytest.mark.parametrize("system,det,level", [("E5", 2 ** 30, 16), ("L4", 7 ** 15, 49)])
def test_invariants(capsys, tmp_path, system, det, level):
    code, out, _ = run(capsys, "invariants", "-s", system, "--format", "json", "--no-cache")
    assert code == 0
    d = json.loads(out)
    assert (d["discriminant"], d["level"]) == (det, level)


def test_theta_text_and_csv(capsys, tmp_path):
    code, out, _ = run(capsys, "theta", "-s", "E5", "--max-norm", "8", "--cache-dir", str(tmp_path))
    assert code == 0
    assert out == "1 + 512 q^6 + 11232 q^8 + O(q^9)\n"
    code, out, _ = run(capsys, "theta", "-s", "E5", "--max-norm", "8", "--format", "csv", "--cache-dir", str(tmp_path))
    assert out.splitlines() == ["norm,count", "0,1", "6,512", "8,11232"]


def test_cache_is_transparent_and_byte_stable(capsys, tmp_path):
    args = ["theta", "-s", "L1", "--max-norm", "10", "--format", "json", "--cache-dir", str(tmp_path)]
    _, cold, _ = run(capsys, *args)
    files = sorted(p.name for p in tmp_path.iterdir())
    assert files == ["L1_B1_theta.json"]
    _, warm, _ = run(capsys, *args)
    _, fresh, _ = run(capsys, *args[:-2], "--no-cache")
    assert cold == warm == fresh


def test_cache_serves_smaller_requests(capsys, tmp_path, monkeypatch):
    run(capsys, "theta", "-s", "L1", "--max-norm", "12", "--cache-dir", str(tmp_path))

    def boom(*a, **k):
        raise AssertionError("recomputed despite a valid cache entry")

    monkeypatch.setattr(cli.en, "theta_series", boom)
    code, out, _ = run(capsys, "theta", "-s", "L1", "--max-norm", "8", "--cache-dir", str(tmp_path))
    assert code == 0 and out.endswith("O(q^9)\n")


def test_corrupt_cache_is_recomputed(capsys, tmp_path, caplog):
    args = ["theta", "-s", "L1", "--max-norm", "8", "--format", "json", "--cache-dir", str(tmp_path)]
    _, good, _ = run(capsys, *args)
    p = tmp_path / "L1_B1_theta.json"
    rec = json.loads(p.read_text())
    rec["payload"]["coefficients"][1][1] += 1
    p.write_text(json.dumps(rec))
    _, again, _ = run(capsys, *args)
    assert again == good
    assert "corrupt" in caplog.text
    assert json.loads(p.read_text())["payload"] == json.loads(good) | {"name": "L1"}


def test_env_cache_dir(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("HYPERLATTICE_CACHE", str(tmp_path))
    assert run(capsys, "gram", "-s", "A1")[0] == 0
    assert (tmp_path / "A1_B1_gram.json").exists()


def test_shells(capsys):
    code, out, _ = run(capsys, "shells", "-s", "D3", "--max-norm", "6", "--format", "json", "--no-cache")
    assert code == 0
    rows = json.loads(out)["shells"]
    assert rows == [
        {"norm": 4, "count": 36, "hyperroots": 0, "others": 36},
        {"norm": 6, "count": 144, "hyperroots": 144, "others": 0},
    ]


@pytest.mark.parametrize("args", [
    ["theta", "-s", "L1", "--max-norm", "7", "--no-cache"],
    ["theta", "-s", "L1", "--budget", "0", "--no-cache"],
    ["theta", "-s", "L1", "--threads", "0", "--no-cache"],
    ["gram", "-s", "X7", "--no-cache"],
    ["gram", "-s", "A1", "--basis", "B9", "--no-cache"],
    ["gram", "-s", "A1", "--basis", "B3", "--no-cache"],
    ["theta", "--no-cache"],
])
def test_bad_config_exit_code(capsys, args):
    assert run(capsys, *args)[0] == 4


def test_budget_exit_code(capsys):
    assert run(capsys, "theta", "-s", "L3", "--max-norm", "30", "--budget", "1000", "--no-cache")[0] == 3


def test_verify_pass(capsys):
    code, out, _ = run(capsys, "verify", "--only", "theta-L0", "--only", "gram-L1")
    assert code == 0
    assert "2/2 checks passed" in out


def test_verify_mismatch(capsys):
    code, out, _ = run(capsys, "verify", "--only", "det-D3", "--format", "json")
    assert code == 2
    assert json.loads(out)[0]["status"] == "fail"


def test_verify_budget(capsys):
    code, out, _ = run(capsys, "verify", "--only", "theta-L2-q96", "--budget", "10")
    assert code == 3
    assert "[BUDGET]" in out
