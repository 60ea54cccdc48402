import json

import numpy as np
import pytest

from krein_realize import ArgumentError, ConfigError, ConvergenceError, DivergenceError
from krein_realize.cli import (
    _thread_budget,
    emit_report,
    main,
    parse_config,
    run_pipeline,
)
from krein_realize.scalars import Quaternion


def base_doc(**extra):
    # N must start at 16: the degree-one moment errors decay like
    # (r/r0)^(2N) and only drop under the 1e-6 assertion there
    doc = {
        "field": "complex",
        "dim": 1,
        "coeffs": [[[1.0]], [[3.0]]],
        "r": 0.5,
        "r0": 0.8,
        "N_list": [16, 24],
    }
    doc.update(extra)
    return doc


def quick_doc(**extra):
    # constant series: every assertion is exact at any truncation; nmax
    # stays well below N so the observable span avoids the truncation edge
    doc = base_doc(coeffs=[[[1.0]]], N_list=[6], nmax=2)
    doc.update(extra)
    return doc


def write_config(tmp_path, doc, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


# --- parse_config ------------------------------------------------------------


def test_parse_minimal_defaults():
    cfg = parse_config(json.dumps(base_doc()))
    assert cfg.field == "complex"
    assert cfg.dim == 1
    assert cfg.cutoff == 1e-12
    assert cfg.nmax == 6
    assert cfg.n_list == [16, 24]
    assert cfg.grid == [0.0 + 0j, 0.15 + 0j, 0.3 + 0j, 0.45 + 0j]
    assert cfg.seed is None and cfg.out is None
    series = cfg.series()
    assert series.radius == 0.8
    assert series.coeffs[1][0, 0] == 3.0 + 0j


def test_parse_accepts_bytes():
    cfg = parse_config(json.dumps(base_doc()).encode("utf-8"))
    assert cfg.r == 0.5


def test_config_immutable():
    cfg = parse_config(json.dumps(base_doc()))
    with pytest.raises(AttributeError):
        cfg.r = 0.4


def test_parse_complex_entry_encodings():
    doc = base_doc(coeffs=[[[2]], [[[1.5, -0.5]]]])
    cfg = parse_config(json.dumps(doc))
    assert cfg.coeffs[0][0, 0] == 2.0 + 0j
    assert cfg.coeffs[1][0, 0] == 1.5 - 0.5j


def test_parse_quaternion_entries():
    doc = base_doc(
        field="quaternion",
        coeffs=[[[1]], [[[0.0, 0.0, 0.5, 0.0]]]],
        grid=[0.0, 0.1],
    )
    cfg = parse_config(json.dumps(doc))
    assert cfg.coeffs[1].entry(0, 0) == Quaternion(0.0, 0.0, 0.5, 0.0)


def test_parse_rejects_unknown_key():
    with pytest.raises(ConfigError, match="unknown field"):
        parse_config(json.dumps(base_doc(radius=0.5)))


def test_parse_missing_dim_message():
    doc = base_doc()
    del doc["dim"]
    with pytest.raises(ConfigError, match=r"config\.dim: required field is missing"):
        parse_config(json.dumps(doc))


def test_parse_rejects_malformed_json():
    with pytest.raises(ConfigError, match="malformed JSON"):
        parse_config("{not json")
    with pytest.raises(ConfigError, match="top level"):
        parse_config("[1, 2]")
    with pytest.raises(ConfigError, match="UTF-8"):
        parse_config(b"\xff\xfe{}")


def test_parse_radius_ordering():
    with pytest.raises(ConfigError, match="r = 0.8 and r0 = 0.5"):
        parse_config(json.dumps(base_doc(r=0.8, r0=0.5)))
    with pytest.raises(ConfigError):
        parse_config(json.dumps(base_doc(r0=1.0)))


def test_parse_n_list_validation():
    with pytest.raises(ConfigError, match="strictly ascending"):
        parse_config(json.dumps(base_doc(N_list=[16, 8])))
    with pytest.raises(ConfigError, match="positive integer"):
        parse_config(json.dumps(base_doc(N_list=[0])))
    with pytest.raises(ConfigError, match="nonempty"):
        parse_config(json.dumps(base_doc(N_list=[])))


def test_parse_rejects_bool_masquerading_as_int():
    with pytest.raises(ConfigError, match="expected int, got bool"):
        parse_config(json.dumps(base_doc(dim=True)))


def test_parse_coefficient_shape_errors():
    with pytest.raises(ConfigError, match=r"coeffs\[0\]: expected 2 rows"):
        parse_config(json.dumps(base_doc(dim=2)))
    with pytest.raises(ConfigError, match="number or"):
        parse_config(json.dumps(base_doc(coeffs=[[["x"]]])))
    with pytest.raises(ConfigError, match="at least one"):
        parse_config(json.dumps(base_doc(coeffs=[])))


def test_parse_cutoff_and_nmax_bounds():
    with pytest.raises(ConfigError, match="cutoff"):
        parse_config(json.dumps(base_doc(cutoff=0.0)))
    with pytest.raises(ConfigError, match="cutoff"):
        parse_config(json.dumps(base_doc(cutoff=2.0)))
    with pytest.raises(ConfigError, match="nmax"):
        parse_config(json.dumps(base_doc(nmax=-1)))


def test_parse_coefficient_symmetry():
    doc = base_doc(
        dim=2,
        coeffs=[[[1.0, 0.0], [0.0, 1.0]]],
        coefficient_symmetry=[1, -1],
    )
    cfg = parse_config(json.dumps(doc))
    assert list(cfg.j_c) == [1.0, -1.0]
    # the signature is folded into the series the pipeline sees
    assert cfg.series().coeffs[0][1, 1] == -1.0 + 0j
    with pytest.raises(ConfigError, match="expected 2 entries"):
        parse_config(json.dumps(dict(doc, coefficient_symmetry=[1])))
    with pytest.raises(ConfigError, match="1 or -1"):
        parse_config(json.dumps(dict(doc, coefficient_symmetry=[1, 0])))
    with pytest.raises(ConfigError, match="1 or -1"):
        parse_config(json.dumps(dict(doc, coefficient_symmetry=[1, True])))


def test_parse_grid_validation():
    cfg = parse_config(json.dumps(base_doc(grid=[0.1, [0.0, 0.2]])))
    assert cfg.grid == [0.1 + 0j, 0.2j]
    with pytest.raises(ConfigError, match="below r"):
        parse_config(json.dumps(base_doc(grid=[0.5])))
    with pytest.raises(ConfigError, match="nonempty"):
        parse_config(json.dumps(base_doc(grid=[])))
    quat = base_doc(field="quaternion", coeffs=[[[1]]], grid=[[0.0, 0.1]])
    with pytest.raises(ConfigError, match="real points only"):
        parse_config(json.dumps(quat))


def test_parse_seed_and_out_types():
    cfg = parse_config(json.dumps(base_doc(seed=7, out="report.json")))
    assert cfg.seed == 7 and cfg.out == "report.json"
    with pytest.raises(ConfigError):
        parse_config(json.dumps(base_doc(seed="7")))
    with pytest.raises(ConfigError):
        parse_config(json.dumps(base_doc(out=3)))


# --- thread budget -----------------------------------------------------------


def test_thread_budget(monkeypatch):
    monkeypatch.delenv("KREIN_REALIZE_THREADS", raising=False)
    assert _thread_budget(1) == 1
    monkeypatch.setenv("KREIN_REALIZE_THREADS", "2")
    assert _thread_budget(8) == 2
    assert _thread_budget(1) == 1
    monkeypatch.setenv("KREIN_REALIZE_THREADS", "frog")
    with pytest.raises(ConfigError, match="expected a positive integer, got 'frog'"):
        _thread_budget(4)
    monkeypatch.setenv("KREIN_REALIZE_THREADS", "0")
    with pytest.raises(ConfigError):
        _thread_budget(4)


# --- run_pipeline ------------------------------------------------------------


def test_run_pipeline_records_ordered(monkeypatch):
    monkeypatch.delenv("KREIN_REALIZE_THREADS", raising=False)
    cfg = parse_config(json.dumps(base_doc(N_list=[16, 24, 32])))
    report = run_pipeline(cfg)
    assert [rec["n_trunc"] for rec in report["records"]] == [16, 24, 32]
    assert report["passed"] is True
    for rec in report["records"]:
        assert rec["signature"][1] >= 1  # the indefinite direction is found
        names = [a["name"] for a in rec["assertions"]]
        assert names == [
            "moment_identity",
            "coisometry_observable",
            "kernel_three_way",
            "krein_gram",
            "norm_bound",
        ]


def test_run_pipeline_skew_constant(monkeypatch):
    monkeypatch.delenv("KREIN_REALIZE_THREADS", raising=False)
    doc = base_doc(coeffs=[[[[0.0, 1.0]]]], N_list=[6])
    report = run_pipeline(parse_config(json.dumps(doc)))
    rec = report["records"][0]
    assert rec["signature"] == [0, 0, 6]
    assert all(e == 0.0 for e in rec["moment_errors"])
    assert report["passed"] is True


def test_run_pipeline_quaternionic(monkeypatch):
    monkeypatch.delenv("KREIN_REALIZE_THREADS", raising=False)
    doc = base_doc(
        field="quaternion",
        coeffs=[[[1]], [[[0.0, 0.0, 0.5, 0.0]]]],
        N_list=[16, 24],
        grid=[0.0, 0.1, 0.2],
    )
    report = run_pipeline(parse_config(json.dumps(doc)))
    assert report["passed"] is True
    assert report["records"][1]["moment_max"] <= 1e-6


def test_run_pipeline_aggressive_cutoff_fails(monkeypatch):
    monkeypatch.delenv("KREIN_REALIZE_THREADS", raising=False)
    cfg = parse_config(json.dumps(base_doc(N_list=[32], cutoff=1e-4)))
    report = run_pipeline(cfg)
    assert report["passed"] is False
    failed = {a["name"] for rec in report["records"]
              for a in rec["assertions"] if not a["passed"]}
    assert "moment_identity" in failed


def test_run_pipeline_thread_invariance(monkeypatch):
    doc = base_doc()
    monkeypatch.setenv("KREIN_REALIZE_THREADS", "1")
    serial = run_pipeline(parse_config(json.dumps(doc)))
    monkeypatch.setenv("KREIN_REALIZE_THREADS", "2")
    threaded = run_pipeline(parse_config(json.dumps(doc)))
    assert serial["environment"]["threads"] == 1
    assert threaded["environment"]["threads"] == 2
    serial["environment"] = threaded["environment"] = None
    assert emit_report(serial) == emit_report(threaded)


# --- emit_report -------------------------------------------------------------


@pytest.fixture(scope="module")
def small_report():
    cfg = parse_config(json.dumps(base_doc()))
    return run_pipeline(cfg)


def test_emit_json_shape(small_report):
    payload = emit_report(small_report, "json")
    assert payload.endswith(b"\n")
    doc = json.loads(payload)
    assert doc["passed"] is True
    assert doc["config"]["N_list"] == [16, 24]
    assert doc["environment"]["eig_backend"] in ("compiled", "python")


def test_emit_json_sorted_and_deterministic(small_report):
    payload = emit_report(small_report, "json")
    assert payload == emit_report(small_report, "json")
    text = payload.decode("utf-8")
    assert text.index('"config"') < text.index('"environment"') \
        < text.index('"passed"') < text.index('"records"')


def test_emit_json_floats_roundtrip(small_report):
    # %.17g preserves every double, so parse and re-emit is the identity
    payload = emit_report(small_report, "json")
    reparsed = json.loads(payload)
    assert emit_report(reparsed, "json") == payload


def test_emit_csv_table(small_report):
    lines = emit_report(small_report, "csv").decode("utf-8").splitlines()
    head = lines[0].split(",")
    assert head[:4] == ["n_trunc", "n_plus", "n_minus", "n_zero"]
    assert head[4] == "moment_e0" and "moment_e6" in head
    assert head[-8:] == [
        "coisometry_observable",
        "coisometry_raw",
        "kernel_max",
        "kernel_tol",
        "norm_estimate",
        "norm_bound",
        "krein_gram_defect",
        "passed",
    ]
    assert len(lines) == 1 + len(small_report["records"])
    first = lines[1].split(",")
    assert first[0] == "16"
    assert first[-1] == "true"


def test_emit_rejects_unknown_format(small_report):
    with pytest.raises(ArgumentError, match="format"):
        emit_report(small_report, "yaml")


# --- main --------------------------------------------------------------------


def test_main_writes_report_and_exits_zero(tmp_path):
    out = tmp_path / "report.json"
    path = write_config(tmp_path, base_doc())
    code = main(["--config", path, "--out", str(out)])
    assert code == 0
    doc = json.loads(out.read_bytes())
    assert doc["passed"] is True


def test_main_stdout_dash(tmp_path, capfdbinary):
    path = write_config(tmp_path, quick_doc())
    code = main(["--config", path, "--out", "-"])
    assert code == 0
    captured = capfdbinary.readouterr()
    assert json.loads(captured.out)["passed"] is True


def test_main_csv_format(tmp_path):
    out = tmp_path / "report.csv"
    path = write_config(tmp_path, quick_doc())
    assert main(["--config", path, "--format", "csv", "--out", str(out)]) == 0
    assert out.read_text().startswith("n_trunc,")


def test_main_out_flag_overrides_config(tmp_path):
    cfg_out = tmp_path / "from_config.json"
    flag_out = tmp_path / "from_flag.json"
    path = write_config(tmp_path, quick_doc(out=str(cfg_out)))
    assert main(["--config", path, "--out", str(flag_out)]) == 0
    assert flag_out.exists() and not cfg_out.exists()
    assert main(["--config", path]) == 0
    assert cfg_out.exists()


def test_main_byte_deterministic(tmp_path, monkeypatch):
    monkeypatch.delenv("KREIN_REALIZE_THREADS", raising=False)
    path = write_config(tmp_path, base_doc())
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    assert main(["--config", path, "--out", str(a)]) == 0
    assert main(["--config", path, "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_main_assertion_failure_exit_one(tmp_path):
    out = tmp_path / "report.json"
    path = write_config(tmp_path, base_doc(N_list=[32], cutoff=1e-4))
    code = main(["--config", path, "--out", str(out)])
    assert code == 1
    # the report is still written so the failure can be inspected
    assert json.loads(out.read_bytes())["passed"] is False


def test_main_config_errors_exit_two(tmp_path, capsys):
    assert main(["--config", str(tmp_path / "absent.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{broken")
    assert main(["--config", str(bad)]) == 2
    missing = write_config(tmp_path, {k: v for k, v in base_doc().items()
                                      if k != "dim"}, "missing.json")
    assert main(["--config", missing]) == 2
    err = capsys.readouterr().err
    assert "config.dim" in err


def test_main_bad_thread_env_exit_two(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("KREIN_REALIZE_THREADS", "frog")
    path = write_config(tmp_path, quick_doc())
    assert main(["--config", path]) == 2
    assert "KREIN_REALIZE_THREADS" in capsys.readouterr().err


def test_main_unwritable_out_exit_two(tmp_path):
    path = write_config(tmp_path, quick_doc())
    assert main(["--config", path, "--out", str(tmp_path)]) == 2


def test_main_numerical_failure_exit_three(tmp_path, monkeypatch, capsys):
    path = write_config(tmp_path, quick_doc())

    def boom_conv(cfg):
        raise ConvergenceError("N=6: sweep budget exhausted")

    monkeypatch.setattr("krein_realize.cli.run_pipeline", boom_conv)
    assert main(["--config", path]) == 3
    assert "numerical failure" in capsys.readouterr().err

    def boom_div(cfg):
        raise DivergenceError("N=6: outside the certified disc")

    monkeypatch.setattr("krein_realize.cli.run_pipeline", boom_div)
    assert main(["--config", path]) == 3
