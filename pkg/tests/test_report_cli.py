import json

import pytest
from hypothesis import given, settings, strategies as st

from bmduality.cli import build_parser, main
from bmduality.report import (CSV_COLUMNS, CheckRecord, RunConfig, SuiteReport, emit_report, format_resolution,
                              parse_csv_report, parse_resolution)
from bmduality.suites import run_suite


def test_parse_resolution_forms():
    assert parse_resolution("32x32x24") == (32, 32, 24)
    assert parse_resolution("16×16×12") == (16, 16, 12)
    assert parse_resolution("64") == (64,)
    assert parse_resolution("default") is None
    assert format_resolution((8, 6)) == "8x6"


def test_config_validation():
    with pytest.raises(ValueError):
        RunConfig(n=0).validate()
    with pytest.raises(ValueError):
        RunConfig(tol_pairing=0).validate()
    with pytest.raises(ValueError):
        RunConfig(R=-1).validate()
    with pytest.raises(ValueError):
        RunConfig.from_text("bogus = 3\n")
    with pytest.raises(ValueError):
        RunConfig.from_text("n 3\n")
    cfg = RunConfig.from_text("# comment\nn = 3\ntol-jump = 0.5\nresolution = 10x8\n")
    assert (cfg.n, cfg.tol_jump, cfg.resolution) == (3, 0.5, (10, 8))


configs = st.builds(
    RunConfig,
    n=st.integers(1, 3),
    R=st.floats(0.1, 10, allow_nan=False),
    r_max=st.integers(0, 8),
    s_max=st.integers(0, 6),
    q_max=st.integers(1, 4),
    tol_reproduction=st.floats(1e-12, 1.0),
    tol_pairing=st.floats(1e-12, 1.0),
    tol_jump=st.floats(1e-6, 1.0),
    seed=st.integers(0, 2 ** 31),
    out=st.sampled_from([None, "report.json", "out/r.csv"]),
)


@settings(max_examples=50)
@given(configs)
def test_config_round_trip(cfg):
    text = cfg.to_text()
    back = RunConfig.from_text(text)
    assert back == cfg
    assert back.to_text() == text


def test_flags_override_config_file(tmp_path):
    p = tmp_path / "run.cfg"
    p.write_text("n = 3\nseed = 7\ns_max = 2\n")
    args = build_parser().parse_args(["harmonics", "--config", str(p), "--seed", "11"])
    from bmduality.cli import config_from_args
    cfg = config_from_args(args)
    assert (cfg.n, cfg.seed, cfg.s_max) == (3, 11, 2)


def _record(i, status="pass", value=1 + 2j):
    return CheckRecord(f"x/{i}", "abcd", "DERIVED", value, 0.1 + 1e-17j, 1e-8, status, "note, with comma")


def test_emit_empty_report():
    rep = SuiteReport("harmonics", [], {"seed": 0})
    doc = json.loads(emit_report(rep, "json"))
    assert doc["records"] == [] and doc["pass"] is True
    assert emit_report(rep, "csv").strip() == ",".join(CSV_COLUMNS)
    assert parse_csv_report(emit_report(rep, "csv")) == []
    assert "0 checks" in emit_report(rep, "human")
    with pytest.raises(ValueError):
        emit_report(rep, "xml")


def test_csv_round_trip_preserves_records():
    recs = [_record(0), _record(1, "fail", 1 / 3), _record(2, "refused", None)]
    back = parse_csv_report(emit_report(SuiteReport("s", recs), "csv"))
    assert back == recs


def test_ball_example_csv_round_trip():
    rep = run_suite("ball-example", RunConfig(resolution=(16, 16, 12)))
    assert parse_csv_report(emit_report(rep, "csv")) == rep.records


def test_wall_time_only_with_timing():
    rep = SuiteReport("s", [_record(0)], {}, wall_time=1.5)
    assert "wall_time" not in json.loads(emit_report(rep, "json"))
    assert json.loads(emit_report(rep, "json", timing=True))["wall_time"] == 1.5


def test_exit_status_semantics():
    ok = SuiteReport("s", [_record(0)])
    refused = SuiteReport("s", [_record(0), _record(1, "refused", None)])
    failed = SuiteReport("s", [_record(1, "fail")])
    assert ok.exit_code() == 0 and ok.exit_code(strict=True) == 0
    assert refused.exit_code() == 0 and refused.exit_code(strict=True) == 1
    assert failed.exit_code() == 1 and not failed.passed
    with pytest.raises(ValueError):
        _record(0, "maybe")


def test_run_suite_examples():
    rep = run_suite("harmonics")
    assert rep.passed
    dims = {r.id: r for r in rep.records}
    row = dims["harmonics/dimension/r=2"]
    assert row.value == 9 and row.status == "pass"
    rep = run_suite("ball-example")
    assert rep.passed
    assert any(abs(r.value - 39.478417604357425) < 1e-6 for r in rep.records if r.value is not None)
    with pytest.raises(ValueError):
        run_suite("nonsense")


def test_halved_resolution_never_misses_silently():
    rep = run_suite("reproduce", RunConfig(resolution=(16, 16, 12)))
    assert all(r.status in ("pass", "refused") for r in rep.records)


def test_cli_json_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["cr-test", "--format", "json", "--out", str(a), "--seed", "3"]) == 0
    assert main(["cr-test", "--format", "json", "--out", str(b), "--seed", "3"]) == 0
    assert a.read_bytes() == b.read_bytes()
    doc = json.loads(a.read_text())
    assert doc["suite"] == "cr"
    assert doc["environment"]["seed"] == 3


def test_cli_dump_config_and_errors(tmp_path, capsys):
    assert main(["pairing", "--n", "3", "--dump-config"]) == 0
    out = capsys.readouterr().out
    assert "n = 3" in out
    cfg = tmp_path / "c.cfg"
    cfg.write_text(out)
    assert RunConfig.load(cfg).n == 3
    assert main(["pairing", "--tol-pairing", "-1"]) == 2
    assert main(["pairing", "--config", str(tmp_path / "missing.cfg")]) == 2
    assert main(["harmonics", "--out", str(tmp_path / "no" / "dir" / "r.json")]) == 2
    with pytest.raises(SystemExit):
        main(["frobnicate"])


def test_cli_table_and_strict(tmp_path, capsys):
    table = tmp_path / "t.csv"
    assert main(["pairing", "--table", str(table), "--resolution", "16x16x12"]) == 0
    assert table.read_text().startswith("s,q_or_p,value_re,value_im,method,discrepancy")
    # n = 1 refuses the singular projection; strict turns that into a nonzero status
    assert main(["dirichlet", "--n", "1"]) == 0
    assert main(["dirichlet", "--n", "1", "--strict"]) == 1
