import json

import pytest

from mgw.cli import EXIT_USAGE, SCHEMA_VERSION, _status, build_parser, resolve_config, run
from mgw.report import CheckReport


def run_json(capsys, argv, env=None):
    code = run(argv, env or {})
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_rootdata(capsys):
    code, d = run_json(capsys, ["rootdata", "--type", "A2", "--json"])
    assert code == 0 and d["schema_version"] == SCHEMA_VERSION
    assert {"type", "rank", "cartan", "positive_roots", "positive_coroots", "rho",
            "highest_coroot", "coxeter_number"} <= set(d)
    assert d["coxeter_number"] == 3


def test_kl_length_zero(capsys, tmp_path):
    code, d = run_json(capsys, ["kl", "--type", "A1", "--max-length", "0", "--json",
                                "--cache-dir", str(tmp_path)])
    assert code == 0
    assert d["entries"] == [{"w": "e", "x": "e", "h": [[0, 1]]}]


def test_kl_cache_hit_matches_cold_run(tmp_path):
    env = {"MGW_CACHE": str(tmp_path / "c")}
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(["kl", "--type", "A1", "--max-length", "3", "--out", str(a)], env) == 0
    assert len(list((tmp_path / "c").glob("*.json"))) == 1
    assert run(["kl", "--type", "A1", "--max-length", "3", "--out", str(b)], env) == 0
    assert a.read_bytes() == b.read_bytes()
    entries = json.loads(a.read_text())["entries"]
    golden = {
        ("s0 s1 s0", "e"): [[3, 1]], ("s0 s1 s0", "s1"): [[2, 1]], ("s1 s0", "s0"): [[1, 1]],
        ("s1 s0 s1", "s1 s0"): [[1, 1]], ("s1", "s1"): [[0, 1]],
    }
    got = {(e["w"], e["x"]): e["h"] for e in entries}
    # |[e, w]| = 2 l(w) for w != e in the infinite dihedral group
    assert len(got) == 1 + 2 * 2 + 2 * 4 + 2 * 6
    for k, v in golden.items():
        assert got[k] == v


def test_periodic(capsys):
    code, d = run_json(capsys, ["periodic", "--type", "A1", "--radius", "3", "--verify", "inversion,kato,h-eq-p", "--json"])
    assert code == 0
    assert [c["name"] for c in d["checks"]] == ["inversion", "kato", "h-eq-p"]
    assert all(c["pass"] and c["mismatches"] == [] for c in d["checks"])
    assert d["window"]["alcoves"][0] == "e"


def test_periodic_unknown_check():
    assert run(["periodic", "--type", "A1", "--verify", "bogus"], {}) == EXIT_USAGE


def test_chars(capsys):
    code, d = run_json(capsys, ["chars", "--type", "A1", "--p", "3", "--weyl", "2", "--json"])
    assert code == 0
    assert d["weyl"] == [{"weight": [-2], "coeff": 1}, {"weight": [0], "coeff": 1}, {"weight": [2], "coeff": 1}]
    code, d = run_json(capsys, ["chars", "--type", "A1", "--p", "3", "--baby-verma", "0", "--lusztig", "e", "--json"])
    assert [t["weight"] for t in d["baby_verma"]] == [[-4], [-2], [0]]
    assert d["lusztig"] == [{"weight": [0], "coeff": 1}]


def test_verify_star(capsys):
    assert run(["verify", "star", "--type", "A1", "--p", "3", "--w", "e", "--height", "10"], {}) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["pass"] and summary["exit_code"] == 0


def test_graph_dot_and_gkm(tmp_path, capsys):
    dot = tmp_path / "g.dot"
    code = run(["graph", "--type", "A2", "--upto", "s0 s1", "--field", "Fp:5", "--dot", str(dot), "--gkm", "--json"], {})
    d = json.loads(capsys.readouterr().out)
    assert code == 0 and d["gkm"]["pass"]
    assert len(d["vertices"]) == 4 and dot.read_text().count("--") == 4
    code = run(["graph", "--type", "A1", "--upto", "s0 s1 s0", "--field", "Fp:2", "--gkm", "--json"], {})
    d = json.loads(capsys.readouterr().out)
    assert code == 1 and d["gkm"]["mismatches"][0]["labels"] == [[1, 0], [1, -2]]


def test_bm(tmp_path):
    out = tmp_path / "bm.json"
    assert run(["bm", "--type", "A2", "--w", "s0 s1 s0", "--field", "Q", "--json", str(out)], {}) == 0
    d = json.loads(out.read_text())
    assert set(d) >= {"schema_version", "w", "field", "stalks", "timings"}
    assert d["w"] == "s0 s1 s0" and d["field"] == "Q"
    assert all(set(s) == {"x", "generator_degrees", "rank_poly", "flagged"} for s in d["stalks"])


def test_bm_non_gkm_exits_one():
    assert run(["bm", "--type", "A1", "--w", "s0 s1 s0", "--field", "Fp:2"], {}) == 1


def test_verify_momconj_and_mult_one(capsys):
    assert run(["verify", "momconj", "--type", "A1", "--max-length", "4", "--field", "Q"], {}) == 0
    assert run(["verify", "mult-one", "--type", "A2", "--max-length", "3", "--field", "Fp:3"], {}) == 0
    assert run(["verify", "mult-one", "--type", "A1", "--max-length", "4", "--field", "Fp:2"], {}) == 0


def test_status_codes():
    ok = CheckReport("a", True)
    bad = CheckReport("b", False, mismatches=[{}])
    flagged = CheckReport("c", False, indeterminate=["e"])
    assert (_status([ok]), _status([ok, flagged]), _status([flagged, bad])) == (0, 2, 1)


@pytest.mark.parametrize("argv", [
    ["nosuch"],
    ["kl", "--bogus"],
    ["kl", "--type", "Z7"],
    ["kl", "--max-length", "-1"],
    ["bm", "--w", "e", "--field", "Fp:4"],
    ["kl", "--workers", "0"],
    ["graph"],
])
def test_usage_errors(argv, capsys):
    assert run(argv, {}) == EXIT_USAGE
    assert capsys.readouterr().err


def test_config_precedence(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text('[run]\ntype = "A2"\nmax_length = 5\ncache_dir = "from-toml"\n')
    p = build_parser()
    env = {"MGW_CACHE": "from-env"}
    c = resolve_config(p.parse_args(["kl"]), env)
    assert (c.type, c.cache_dir, c.max_length) == ("A1", "from-env", 4)
    c = resolve_config(p.parse_args(["kl", "--config", str(cfg)]), env)
    assert (c.type, c.cache_dir, c.max_length) == ("A2", "from-toml", 5)
    c = resolve_config(p.parse_args(["kl", "--config", str(cfg), "--max-length", "2", "--cache-dir", "flag"]), env)
    assert (c.type, c.cache_dir, c.max_length) == ("A2", "flag", 2)
    assert resolve_config(p.parse_args(["kl"]), {}).cache_dir == ".mgw-cache"


def test_config_unknown_key(tmp_path):
    cfg = tmp_path / "bad.toml"
    cfg.write_text("colour = 3\n")
    assert run(["kl", "--config", str(cfg)], {}) == EXIT_USAGE


def test_csv_and_table(capsys, tmp_path):
    env = {"MGW_CACHE": str(tmp_path)}
    assert run(["kl", "--type", "A1", "--max-length", "1", "--format", "csv"], env) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "w,x,h" and "s1,e,v" in lines
    assert run(["weyl", "--type", "A1", "--box", "--format", "table"], env) == 0
    assert capsys.readouterr().out.splitlines()[0] == "element  length"


def test_weyl_interval(capsys):
    code, d = run_json(capsys, ["weyl", "--type", "A2", "--list-interval", "s0 s1 s2", "--json"])
    assert code == 0 and len(d["interval"]) == 2 ** 3
    code, d = run_json(capsys, ["weyl", "--type", "A2", "--list-interval", "s0 s1 s2", "--from", "s1", "--json"])
    assert sorted(e["element"] for e in d["interval"]) == ["s0 s1", "s0 s1 s2", "s1", "s1 s2"]


def test_cache_subcommand(tmp_path, capsys):
    env = {"MGW_CACHE": str(tmp_path)}
    run(["kl", "--type", "A1", "--max-length", "1"], env)
    capsys.readouterr()
    code, d = run_json(capsys, ["cache", "list"], env)
    assert code == 0 and len(d["entries"]) == 1
    code, d = run_json(capsys, ["cache", "clear"], env)
    assert d["cleared"] == 1
