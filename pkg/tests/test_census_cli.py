import csv
import io
import json

import pytest

from hallconics import census
from hallconics.census import (
    CHECKS,
    CensusConfig,
    ConfigError,
    build_family,
    emit_open_question_table,
    run_census,
    verify_all,
)
from hallconics.cli import main
from hallconics.field import field_for_q


def run_cli(*argv):
    out = io.StringIO()
    code = main(list(argv), stdout=out)
    return code, out.getvalue()


def test_config_rejects_unknown_names():
    with pytest.raises(ConfigError):
        CensusConfig.from_dict({"q": [3], "checks": ["no_such_check"]})
    with pytest.raises(ConfigError):
        CensusConfig.from_dict({"q": [3], "checks": [], "bogus": 1})
    with pytest.raises(ConfigError):
        CensusConfig.from_dict({"q": [6], "checks": []})
    cfg = CensusConfig.from_dict({"q": [3], "checks": [], "families": ["no_such_family"]})
    with pytest.raises(ConfigError):
        run_census(cfg)


def test_alias_resolves():
    assert census.resolve_check("a3_even") is CHECKS["thm_a3_even"]


def test_census_parabola_odd():
    cfg = CensusConfig.from_dict({"q": [3, 5], "families": ["parabola_I_notin_D"],
                                  "checks": ["a3_a4_parabola_odd"]})
    results, code = run_census(cfg)
    assert code == 0 and len(results) == 2
    assert sorted(r.actual["a3"] for r in results) == [4, 12]


def test_census_a3_even():
    cfg = CensusConfig.from_dict({"q": [4, 8], "families": ["normalform_even"],
                                  "checks": ["a3_even"]})
    results, code = run_census(cfg)
    assert code == 0 and results
    assert {r.actual["a3"] for r in results} == {6, 28}


def test_empty_check_list():
    results, code = run_census(CensusConfig.from_dict({"q": [3], "checks": []}))
    assert results == [] and code == 0


def test_parametric_family():
    F = field_for_q(5)
    conics = build_family(F, {"name": "hyperbola_xy", "params": {"d": "nonsquare"}})
    assert len(conics) == 12
    conics = build_family(F, {"name": "literal", "conics": ["hyperbola_xy(1)"]})
    assert len(conics) == 1


def test_guard_skips_with_reason():
    summary, results = verify_all([2])
    assert summary["thm_hsz"][2] == "skip"
    assert summary["okp_complete_arc"][2] == "skip"
    assert all(r.status in ("pass", "skip") for r in results)
    assert all(r.note for r in results if r.status == "skip")


def test_q9_nbeta_guard():
    F = field_for_q(9)
    assert CHECKS["lem_nbeta"].guard(F) == "needs even q"


def test_hypothesis_mismatch_is_skip_not_fail():
    F = field_for_q(5)
    res = census.execute(CHECKS["thm_hsz"], F)
    assert res[0].status == "skip"  # q > 5 required
    K = build_family(F, "parabola_I_notin_D")
    res = census.execute(CHECKS["prop_hyp1_split"], F, K)
    assert res[0].status == "skip" and "hypothesis" in res[0].note


def test_persisted_outputs_deterministic(tmp_path):
    data = {"q": [3, 4], "families": ["representatives"],
            "checks": ["cross_oracle", "hall_axioms"], "timestamp": False}
    texts = []
    for jobs, fmt in [(1, "json"), (2, "json")]:
        out = tmp_path / f"run{jobs}"
        cfg = CensusConfig.from_dict({**data, "out": str(out), "jobs": jobs, "format": fmt})
        _, code = run_census(cfg)
        assert code == 0
        texts.append(((out / "results.json").read_text(), (out / "spectra.jsonl").read_text()))
    assert texts[0] == texts[1]
    doc = json.loads(texts[0][0])
    assert doc["schema"] == 1 and "generated" not in doc
    assert all(r["wall_time"] is None for r in doc["results"])


def test_csv_output(tmp_path):
    cfg = CensusConfig.from_dict({"q": [4], "checks": ["lem_nbeta"], "format": "csv",
                                  "out": str(tmp_path), "timestamp": False})
    run_census(cfg)
    rows = list(csv.DictReader(open(tmp_path / "results.csv")))
    assert rows[0]["check"] == "lem_nbeta" and rows[0]["status"] == "pass"
    assert rows[0]["schema"] == "1"


def test_timeout_exit_code(tmp_path):
    cfgfile = tmp_path / "c.json"
    cfgfile.write_text(json.dumps({"q": [8], "checks": ["hall_axioms"], "timeout": 0.01}))
    code, out = run_cli("census", str(cfgfile))
    assert code == 3
    assert json.loads(out)["results"][0]["status"] == "timeout"


def test_cli_census_config_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"q": [3], "checks": ["thm_nope"]}))
    assert run_cli("census", str(bad))[0] == 2
    assert run_cli("census", str(tmp_path / "missing.json"))[0] == 2
    assert run_cli("--q", "6", "nbeta")[0] == 2
    assert run_cli("nosuchcommand")[0] == 2


def test_cli_verify_and_flags_after_subcommand():
    code, out = run_cli("verify", "2", "--no-timestamp")
    assert code == 0 and "SKIP" in out and "FAIL" not in out


def test_cli_single_object_commands(tmp_path):
    code, out = run_cli("--q", "5", "classify", "hyperbola_xy(1)")
    assert code == 0 and json.loads(out)[0]["kind"] == "hyperbola"
    code, out = run_cli("--q", "5", "parabola-count")
    assert code == 0 and json.loads(out)["count"] == 12
    code, out = run_cli("--q", "4", "nbeta")
    assert code == 0 and len(json.loads(out)) == 15
    code, out = run_cli("--q", "5", "arc", "hyperbola_xy(1)")
    assert code == 0 and json.loads(out)["is_arc"] is False
    code, out = run_cli("--q", "4", "normalform", "1", "[0,1]")
    assert code == 0 and json.loads(out)["verified"]
    code, out = run_cli("--q", "3", "sk-count", "Q: 0,0,1,2,0,0", "--line", "[0,1,0]")
    assert code == 0 and all(r["count"] == r["expected"] for r in json.loads(out))
    code, out = run_cli("--q", "3", "spectrum", "hyperbola_xy(2)", "--format", "csv")
    assert code == 0 and out.startswith("q,p,conic,")
    code, _ = run_cli("--p", "2", "--k", "1", "lines", "--emit-points", "--out", str(tmp_path))
    lines = (tmp_path / "lines.jsonl").read_text().splitlines()
    assert code == 0 and len(lines) == 20 and "points" in json.loads(lines[0])


def test_open_question_table():
    text = emit_open_question_table([3])
    rows = list(csv.DictReader(io.StringIO(text)))
    assert rows and text == emit_open_question_table([3])
    q = 3
    for r in rows:
        s = int(r["s"])
        assert int(r["triples"]) == int(r["triple_formula"])
        assert s <= q / 2 + 1 + q**0.5
    with pytest.raises(ConfigError):
        emit_open_question_table([4])


def test_verify_all_small_q_pass():
    out = io.StringIO()
    summary, results = verify_all([3, 4, 5], stream=out)
    assert set(summary) == set(CHECKS)
    assert all(r.status in ("pass", "skip") for r in results)
    assert "FAIL" not in out.getvalue()
