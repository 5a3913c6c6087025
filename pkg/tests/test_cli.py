import json

import pytest
from hypothesis import given, settings, strategies as st

from kloc.classgrp import ClassGroupConfig, class_group
from kloc.cli import main
from kloc.cli.cache import DiskProvider, cache_key, from_dict, to_dict
from kloc.cli.report import VERDICT_KINDS, AnalysisReport, ObstructionSummary
from kloc.numfield import new_field

CE = "x^6-793*x^3+226981"
TOP_KEYS = {"field", "p", "i", "verdict", "obstructions", "jaulent", "caveats", "timing_ms"}


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_analyze_example_ce(capsys, tmp_path):
    code, out = run(capsys, "analyze", "--field", CE, "--p", "3", "--i", "1", "--cache-dir", str(tmp_path))
    assert code == 0
    d = json.loads(out)
    assert set(d) == TOP_KEYS
    assert d["verdict"] == {"kind": "does_not_split", "level": 1}
    assert d["obstructions"] == [{"n": 1, "invariants": [3], "route": "coinvariants"}]
    assert d["jaulent"] == {"hypotheses": [True, True, True, True], "conclusion": True}
    assert any("wild kernel" in c for c in d["caveats"])
    assert AnalysisReport.from_json(d).to_json() == d


def test_analyze_gaussian_p2(capsys):
    code, out = run(capsys, "analyze", "--field", "x^2+1", "--p", "2", "--i", "1", "--max-level", "1")
    d = json.loads(out)
    assert code == 0
    assert d["obstructions"][0]["n"] == 1 and d["obstructions"][0]["invariants"] == []


def test_analyze_range_of_i(capsys):
    code, out = run(capsys, "analyze", "--field", "x^2+3", "--p", "3", "--i", "1-3", "--max-level", "1")
    assert code == 0
    assert [r["i"] for r in json.loads(out)] == [1, 2, 3]


@pytest.mark.parametrize("argv", [
    ["analyze", "--field", "x", "--p", "3"],
    ["analyze", "--field", "x^2-1", "--p", "3"],
    ["analyze", "--field", "x^2+1", "--p", "4"],
    ["analyze", "--field", "x^2+1", "--p", "3", "--i", "0"],
    ["analyze", "--field", "x^2+3", "--p", "2"],
    ["analyze-q", "--p", "2"],
    ["analyze-q", "--p", "9"],
    ["reproduce", "bogus"],
])
def test_input_errors(capsys, argv):
    code, out = run(capsys, *argv)
    assert code == 1
    assert "error" in json.loads(out)


def test_effort_exit_code(capsys):
    code, out = run(capsys, "analyze", "--field", CE, "--p", "3", "--max-disc", "1000")
    assert code == 2
    assert json.loads(out)["error"]["kind"] == "EffortExceeded"


def test_analyze_q(capsys):
    code, out = run(capsys, "analyze-q", "--p", "37")
    rows = json.loads(out)["rows"]
    assert code == 0 and len(rows) == 36
    bad = [r for r in rows if not r["splits"]]
    assert [r["i_mod"] for r in bad] == [31] and bad[0]["irregular_index"] == 32
    code, out = run(capsys, "analyze-q", "--p", "5")
    assert all(r["splits"] for r in json.loads(out)["rows"])


def test_reproduce(capsys):
    code, out = run(capsys, "reproduce", "example-4-3")
    lines = out.strip().splitlines()
    assert code == 0 and lines and all(l.startswith("PASS") for l in lines)
    code, out = run(capsys, "reproduce", "example-Q", "--p", "3")
    assert code == 0 and "FAIL" not in out
    code, out = run(capsys, "reproduce", "example-Q", "--p", "37")
    assert code == 0 and "non-split exactly at i = [31]" in out
    code, out = run(capsys, "reproduce", "example-Q", "--p", "691")
    assert code == 0 and "[11, 199]" in out


def test_cache_env_var(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("KLOC_CACHE", str(tmp_path))
    run(capsys, "analyze", "--field", "x^2+23", "--p", "3", "--max-level", "1")
    assert list(tmp_path.glob("*.json"))


# --- cache --------------------------------------------------------------------------

def test_cache_roundtrip_and_reload(tmp_path):
    K = new_field("x^2+47")
    cfg = ClassGroupConfig()
    prov = DiskProvider(tmp_path)
    C1 = prov(K, 3, cfg)
    assert prov.misses == 1 and (tmp_path / cache_key(K, 3)).exists()
    d = json.loads((tmp_path / cache_key(K, 3)).read_text())
    assert d["format_version"] == 1
    fresh = DiskProvider(tmp_path)
    C2 = fresh(K, 3, cfg)
    assert fresh.hits == 1 and fresh.misses == 0
    assert C2.structure == C1.structure
    P = C1.generators[1].ideal
    assert C2.discrete_log(P) == C1.discrete_log(P)


def test_cache_rejects_tampering():
    K = new_field(CE)
    d = to_dict(class_group(K, ClassGroupConfig(extra_primes=(3,))), 3)
    bad = json.loads(json.dumps(d))
    bad["structure"] = [3]
    with pytest.raises(ValueError):
        from_dict(K, 3, bad)
    bad = json.loads(json.dumps(d))
    k = next(j for j, a in enumerate(bad["relation_elements"]) if a is not None)
    bad["relations"][k][0] += 1
    with pytest.raises(ValueError):
        from_dict(K, 3, bad)
    bad = json.loads(json.dumps(d))
    bad["format_version"] = 0
    with pytest.raises(ValueError):
        from_dict(K, 3, bad)
    # dropping relations makes the group look bigger: must not be accepted
    bad = json.loads(json.dumps(d))
    keep = [j for j, a in enumerate(bad["relation_elements"]) if a is not None]
    bad["relations"] = [bad["relations"][j] for j in keep]
    bad["relation_elements"] = [bad["relation_elements"][j] for j in keep]
    try:
        C = from_dict(K, 3, bad)
    except ValueError:
        pass
    else:
        assert C.structure.invariants == (39,)


def test_cache_corruption_falls_back(tmp_path):
    K = new_field("x^2+23")
    cfg = ClassGroupConfig()
    DiskProvider(tmp_path)(K, 3, cfg)
    path = tmp_path / cache_key(K, 3)
    path.write_text("{ not json")
    prov = DiskProvider(tmp_path)
    C = prov(K, 3, cfg)
    assert prov.misses == 1 and C.structure.invariants == (3,)
    json.loads(path.read_text())          # rewritten


# --- report round trip -------------------------------------------------------------

reports = st.builds(
    AnalysisReport,
    field=st.text(min_size=1, max_size=20),
    p=st.integers(2, 10 ** 6), i=st.integers(1, 10 ** 6),
    verdict_kind=st.sampled_from(VERDICT_KINDS), verdict_level=st.integers(0, 10),
    obstructions=st.lists(st.builds(ObstructionSummary, n=st.integers(0, 10),
                                    invariants=st.lists(st.integers(2, 10 ** 4), max_size=4).map(tuple),
                                    route=st.sampled_from(["level-zero", "coinvariants", "nakayama"])),
                          max_size=4).map(tuple),
    jaulent_hypotheses=st.tuples(st.booleans(), st.booleans(), st.booleans(), st.booleans()),
    jaulent_conclusion=st.booleans(),
    caveats=st.lists(st.text(max_size=30), max_size=3).map(tuple),
    timing_ms=st.integers(0, 10 ** 9),
)


@settings(max_examples=150, deadline=None)
@given(reports)
def test_report_roundtrip(r):
    assert AnalysisReport.loads(r.dumps()) == r
    assert set(r.to_json()) == TOP_KEYS


def test_report_rejects_unknown_kind():
    d = AnalysisReport("x^2+1", 3, 1, "splits_certified", 1, (), (False,) * 4, False).to_json()
    d["verdict"]["kind"] = "maybe"
    with pytest.raises(ValueError):
        AnalysisReport.from_json(d)
