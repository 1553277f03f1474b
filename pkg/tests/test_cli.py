"""CLI: subcommand dispatch, JSON schema, exit codes, determinism, CSV."""

import json
import re

import pytest

from holoflow import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out)


# ---------------------------------------------------------------------------
# dispatch and report contents
# ---------------------------------------------------------------------------

def test_classify_example(capsys):
    code, doc = run_json(capsys, "classify", "--generator", "-z")
    assert code == cli.EXIT_OK
    assert doc["kind"] == "elliptic"
    assert doc["tau"] == {"re": "0", "im": "0"}
    assert doc["lambda"]["re"] == "1"


def test_flow_example_closed_form(capsys):
    code, doc = run_json(capsys, "flow", "--generator", "(1 - z)^2",
                         "--z0", "0", "--t", "1")
    assert code == cli.EXIT_OK
    assert float(doc["value"]["re"]) == pytest.approx(0.5, abs=1e-8)


def test_minimality_example(capsys):
    code, doc = run_json(capsys, "minimality", "--generator", "i*z")
    assert code == cli.EXIT_OK
    assert doc["elliptic"] is True
    assert doc["lvb"] == "vanishes"
    assert doc["lvmo"] == "vanishes"
    assert doc["minimal"] is True


def test_every_report_embeds_config_and_version(capsys):
    for argv in (("classify", "--generator", "-z"),
                 ("norm", "--function", "z", "--space", "bloch"),
                 ("condition", "--generator", "-z", "--which", "lvb")):
        code, doc = run_json(capsys, *argv)
        assert code == cli.EXIT_OK
        assert doc["version"] == cli.SCHEMA_VERSION
        assert doc["artifact"]
        cfg = doc["config"]
        assert cfg["precision_bits"] == 256
        assert float(cfg["atol"]) > 0 and cfg["j_hi"] > cfg["j_lo"]


def test_numbers_rendered_as_decimal_strings(capsys):
    _, doc = run_json(capsys, "norm", "--function", "log(e/(1 - z))",
                      "--space", "bmoa", "--J", "6")
    val = doc["value"]
    assert isinstance(val, str)
    assert re.fullmatch(r"-?\d+(\.\d+)?([eE][-+]?\d+)?", val)
    # 17 significant digits available on a non-terminating value
    assert len(val.replace("-", "").replace(".", "").lstrip("0")) >= 15


# ---------------------------------------------------------------------------
# exit codes
# ---------------------------------------------------------------------------

def test_parse_error_exits_2(capsys):
    code, doc = run_json(capsys, "classify", "--generator", "z*(")
    assert code == cli.EXIT_PARSE
    assert doc["error"]["exit_code"] == 2


def test_unknown_flag_exits_2(capsys):
    code, _ = run(capsys, "classify", "--nope", "x")
    assert code == cli.EXIT_PARSE


def test_domain_error_exits_3(capsys):
    # z^3 is not an admissible generator (Berkson-Porta p = -z^2)
    code, doc = run_json(capsys, "classify", "--generator", "z^3")
    assert code == cli.EXIT_DOMAIN
    assert doc["error"]["exit_code"] == 3


def test_construct_negative_control_reports_failure_outcome(capsys):
    code, doc = run_json(capsys, "construct", "--steps", "1",
                         "--symbol", "linear")
    assert code == cli.EXIT_OK          # documented outcome, not an error
    assert doc["outcome"] == "failure"
    assert "divergence evidence insufficient" in doc["reason"]


# ---------------------------------------------------------------------------
# determinism and sidecar
# ---------------------------------------------------------------------------

def test_byte_identical_reports(capsys):
    a = run(capsys, "minimality", "--generator", "-z")[1]
    b = run(capsys, "minimality", "--generator", "-z")[1]
    assert a == b


def test_csv_sidecar_schema(tmp_path, capsys):
    path = tmp_path / "series.csv"
    code, _ = run(capsys, "flow", "--generator", "-z", "--z0", "0.5",
                  "--t", "1", "--csv", str(path))
    assert code == cli.EXIT_OK
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "series,parameter,value"
    assert all(len(line.split(",")) == 3 for line in lines[1:])
    assert any(line.startswith("trajectory_re,") for line in lines[1:])


def test_precision_bits_env_var(capsys, monkeypatch):
    monkeypatch.setenv("HOLOFLOW_PRECISION_BITS", "320")
    _, doc = run_json(capsys, "classify", "--generator", "-z")
    assert doc["config"]["precision_bits"] == 320


def test_block_verify_subcommand(capsys):
    code, doc = run_json(capsys, "block-verify", "--w", "0.5")
    assert code == cli.EXIT_OK
    assert doc["passed"] is True
    assert float(doc["c4"]) >= 0.4
