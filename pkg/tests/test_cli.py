import csv
import io
import json
import math

import pytest

from hardyz import __version__
from hardyz.cli import (
    CSV_COLUMNS,
    ConfigError,
    ScenarioConfig,
    config_from_args,
    main,
    parse_grid,
    parse_number,
    run_scenario,
)


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def table(text):
    body = [ln for ln in text.splitlines() if not ln.startswith("#")]
    rows = list(csv.reader(body))
    return rows[0], rows[1:]


def meta(text):
    return {ln[2:].split(":", 1)[0]: json.loads(ln.split(":", 1)[1]) for ln in text.splitlines() if ln.startswith("# ")}


@pytest.mark.parametrize(
    "text, value",
    [("1e6", 1e6), ("0.5", 0.5), ("pi", math.pi), ("pi/2", math.pi / 2), ("-pi/4", -math.pi / 4),
     ("3pi/4", 3 * math.pi / 4), ("2*pi/3", 2 * math.pi / 3), (" PI/8 ", math.pi / 8)],
)
def test_parse_number(text, value):
    assert parse_number(text) == pytest.approx(value, rel=1e-15)


@pytest.mark.parametrize("bad", ["", "pie", "1e", "pi/x", "two"])
def test_parse_number_rejects(bad):
    with pytest.raises(ValueError):
        parse_number(bad)


def test_parse_grid():
    assert parse_grid("0,1,pi/2,-pi/2") == [0.0, 1.0, math.pi / 2, -math.pi / 2]


def test_defaults():
    cfg = config_from_args(["verify-t1"])
    assert (cfg.T, cfg.H, cfg.remainder_order, cfg.format) == (1e6, 1e3, 2, "csv")
    assert cfg.x_grid == [math.pi / 4, math.pi / 2]


@pytest.mark.parametrize(
    "argv, field",
    [
        (["sets", "--T", "500"], "T:"),
        (["sets", "--H", "0"], "H:"),
        (["sets", "--H", "2e6"], "H:"),
        (["sets", "--x", "2"], "x:"),
        (["nupoints", "--tau", "4"], "tau:"),
        (["eval"], "t:"),
        (["eval", "--t", "10"], "t:"),
        (["verify-t1", "--tol", "0"], "tol:"),
        (["verify-t1", "--safety", "-1"], "safety:"),
        (["verify-t1", "--band", "t1_g1=2:1"], "band:"),
        (["ladder", "--T", "1e4", "--H", "5e3"], "H:"),
        (["verify-t1", "--remainder-order", "0"], "remainder-order:"),
        (["sets", "--output", "/no/such/dir/r.csv"], "output:"),
    ],
)
def test_invalid_config_fails_fast_naming_the_field(argv, field, capsys):
    code, out, err = run(argv, capsys)
    assert code == 1 and out == ""
    assert "invalid configuration" in err and field in err


@pytest.mark.parametrize(
    "argv", [["verify-t1", "--frobnicate"], ["nosuch"], ["sets", "--T", "abc"], ["sets", "-T", "1e6"]]
)
def test_bad_command_line_exits_1(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 1


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert __version__ in capsys.readouterr().out


def test_validation_happens_before_any_work():
    with pytest.raises(ConfigError):
        run_scenario(ScenarioConfig("verify-t1", T=1e6, H=1e3, x_grid=[]))


@pytest.fixture(scope="module")
def t1_report():
    buf = io.StringIO()
    code = run_scenario(config_from_args(["verify-t1", "--T", "1e6", "--H", "1e3", "--x", "pi/4,pi/2",
                                          "--timing", "off"]), stdout=buf)
    return code, buf.getvalue()


def test_verify_t1_rows_and_header(t1_report):
    code, text = t1_report
    assert code == 0
    header, rows = table(text)
    assert tuple(header) == CSV_COLUMNS
    names = [r[0] for r in rows]
    assert names.count("t1_g1") == 2 and names.count("t1_g2") == 2
    assert names.count("c29_union") == 4
    assert names == sorted(names)
    m = meta(text)
    assert m["version"] == __version__ and m["cells"] == len(rows)
    assert m["config"]["T"] == 1e6 and m["config"]["x_grid"] == [math.pi / 4, math.pi / 2]
    assert m["total_z_evals"] > 0
    assert "wall_time" not in m
    assert all(r[-1] == "0.0" for r in rows)


def test_verify_t1_values_are_reasonable(t1_report):
    _, text = t1_report
    _, rows = table(text)
    for r in rows:
        if r[0] == "t1_g1":
            assert 0.8 <= float(r[7]) <= 1.2
        assert r[9] == "true"


def test_exit_2_when_a_band_fails(capsys):
    code, out, _ = run(["nupoints", "--T", "1e6", "--H", "1e3", "--tau", "0", "--band", "nu_gap_min=2:3",
                        "--timing", "off"], capsys)
    assert code == 2
    _, rows = table(out)
    assert any(r[0] == "nu_gap_min" and r[9] == "false" for r in rows)


def test_json_output(capsys):
    code, out, _ = run(["nupoints", "--T", "1e5", "--H", "200", "--tau", "0,1", "--format", "json"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert set(doc["metadata"]) >= {"version", "config", "total_z_evals", "wall_time"}
    assert doc["cells"] and set(CSV_COLUMNS) <= set(doc["cells"][0])
    assert doc["metadata"]["cells"] == len(doc["cells"])


def test_output_file(tmp_path, capsys):
    path = tmp_path / "r.csv"
    code, out, _ = run(["nupoints", "--T", "1e5", "--H", "200", "--output", str(path)], capsys)
    assert code == 0 and out == ""
    header, rows = table(path.read_text())
    assert tuple(header) == CSV_COLUMNS and rows


def test_eval_rows(capsys):
    code, out, _ = run(["eval", "--t", "1e4,1e6", "--remainder-order", "1"], capsys)
    assert code == 0
    _, rows = table(out)
    assert {float(r[4]) for r in rows} >= {1e4, 1e6}


def test_eval_accepts_order_zero(capsys):
    code, _, _ = run(["eval", "--t", "1e6", "--remainder-order", "0"], capsys)
    assert code == 0


def test_bench(capsys):
    code, out, _ = run(["bench", "--T", "1e6", "--n", "2000"], capsys)
    assert code == 0
    _, rows = table(out)
    names = {r[0] for r in rows}
    assert len(names) >= 2
    for r in rows:
        assert math.isfinite(float(r[5]))


@pytest.mark.parametrize("command", ["nupoints", "sets"])
def test_reports_identical_across_thread_counts(command, threads):
    argv = [command, "--T", "1e6", "--H", "300", "--timing", "off"]
    texts = []
    for n in (1, 4):
        threads(n)
        buf = io.StringIO()
        run_scenario(config_from_args(argv), stdout=buf)
        texts.append(buf.getvalue())
    assert texts[0] == texts[1]
