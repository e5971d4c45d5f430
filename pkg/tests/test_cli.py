import csv
import io
import json
import subprocess
import sys

import pytest

from meinardus.cli import ConfigError, RunConfig, fmt_value, main, parse_n_range, parse_weights_spec


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_count_partitions(capsys):
    code, out, _ = run(["count", "--weights", "power-law:rho=1,r=1", "--kind", "multiset", "--n", "10"], capsys)
    assert code == 0
    assert out.splitlines()[0] == "n,c_n"
    assert "10,42" in out.splitlines()


def test_count_labelled_forest(capsys):
    code, out, _ = run(["count", "--weights", "forest", "--kind", "assembly", "--n", "3", "--labelled"], capsys)
    assert code == 0
    assert out.splitlines()[-1] == "3,13/6,13"


def test_count_zero(capsys):
    code, out, _ = run(["count", "--n", "0"], capsys)
    assert code == 0 and out.splitlines() == ["n,c_n", "0,1"]


def test_count_log_and_list(capsys):
    code, out, _ = run(["count", "--n", "50,100", "--log"], capsys)
    r = rows(out)
    assert r[0] == ["n", "c_n", "log_c_n"]
    assert r[1][:2] == ["50", "204226"] and r[2][1] == "190569292"


def test_exit_codes(capsys):
    code, _, err = run(["count", "--weights", "power-law:rho=1/2,r=1", "--kind", "selection", "--n", "4"], capsys)
    assert code == 3 and "IntegralityError" in err
    code, _, err = run(["count", "--weights", "nonsense", "--n", "4"], capsys)
    assert code == 2 and "configuration" in err
    code, _, err = run(["count", "--n", "4", "--labelled"], capsys)
    assert code == 2
    code, _, _ = run(["delta", "--weights", "@/nonexistent/file", "--n", "4"], capsys)
    assert code == 2
    with pytest.raises(SystemExit) as exc:
        main(["count", "--format", "xml", "--n", "3"])
    assert exc.value.code == 2
    capsys.readouterr()


def test_missing_meta_is_precondition(tmp_path, capsys):
    f = tmp_path / "w.txt"
    f.write_text("1\n2\n3\n")
    code, _, err = run(["asymptote", "--weights", f"@{f}", "--n", "5"], capsys)
    assert code == 3 and "MissingMetaError" in err
    code, out, _ = run(["count", "--weights", f"@{f}", "--n", "4"], capsys)
    assert code == 0 and out.splitlines()[-1] == "4,9"  # 3+1: 3, 2+2: 3, 2+1+1: 2, 1^4: 1


def test_compare_csv_and_json(capsys):
    code, out, _ = run(["compare", "--n", "100,500,1000"], capsys)
    assert code == 0
    r = rows(out)
    assert r[0] == ["n", "log_exact", "log_meinardus", "log_khintchine", "ratio_meinardus", "ratio_khintchine"]
    assert sum(1 for row in r if row[0] == "n") == 1
    ratios = [float(row[4]) for row in r[1:]]
    assert all(abs(b - 1) < abs(a - 1) for a, b in zip(ratios, ratios[1:]))
    assert 0.97 <= ratios[-1] <= 1.03
    code, js, _ = run(["compare", "--n", "100,500,1000", "--format", "json"], capsys)
    objs = json.loads(js)
    for obj, row in zip(objs, r[1:]):
        assert obj["n"] == int(row[0])
        for key, val in zip(r[0][1:], row[1:]):
            assert obj[key] == float(val)


def test_check_example2(capsys):
    code, out, _ = run(["check", "--weights", "example2", "--condition", "iii", "--format", "json",
                        "--delta-grid", "0.01,0.001"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["verdict"] == "fail" and rep["witness_alpha"] == 0.25
    code, out, _ = run(["check", "--weights", "example2", "--delta-grid", "0.01,0.001"], capsys)
    assert "verdict: fail" in out and "witness alpha: 0.25" in out


def test_check_iii_prime(capsys):
    code, out, _ = run(["check", "--condition", "iii-prime", "--kind", "assembly", "--delta-grid", "0.001",
                        "--epsilon", "0.1", "--format", "csv"], capsys)
    r = rows(out)
    assert code == 0 and r[1][-1] == "pass"


def test_delta_and_llt(capsys):
    code, out, _ = run(["delta", "--weights", "power-law:rho=1,r=1", "--kind", "multiset", "--n", "100"], capsys)
    r = rows(out)
    assert float(r[1][1]) == pytest.approx(0.1258, abs=1e-4)
    assert abs(float(r[1][3])) < 1e-9
    code, out, _ = run(["llt", "--n", "200"], capsys)
    r = rows(out)
    pc, pq = float(r[1][3]), float(r[1][4])
    assert abs(pc - pq) <= 1e-8 * pc


def test_special(capsys):
    code, out, _ = run(["special", "--function", "zeta", "--x", "0,-1,2"], capsys)
    vals = [float(row[2]) for row in rows(out)[1:]]
    assert vals[0] == -0.5 and abs(vals[1] + 1 / 12) < 1e-15
    code, out, _ = run(["special", "--function", "zeta", "--x", "2", "--rel-tol", "0.5"], capsys)
    assert code == 2


def test_table_and_output_file(tmp_path, capsys):
    code, out, _ = run(["asymptote", "--n", "1000", "--format", "table"], capsys)
    assert out.splitlines()[0].split() == ["n", "log_meinardus", "mantissa", "exponent10", "log_khintchine"]
    target = tmp_path / "o.csv"
    code, out, _ = run(["count", "--n", "5", "--output", str(target)], capsys)
    assert out == "" and target.read_text().splitlines()[-1] == "5,7"


def test_determinism(capsys):
    argv = ["compare", "--n", "100,200", "--kind", "selection", "--format", "json"]
    _, a, _ = run(argv, capsys)
    _, b, _ = run(argv, capsys)
    assert a == b


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "meinardus", "count", "--n", "4"],
                          capture_output=True, text=True, check=True)
    assert proc.stdout.splitlines()[-1] == "4,5"


def test_run_config_round_trip():
    cfg = RunConfig.build("check", "power-law:r=2, rho=1/2", "2", "10:30:10", "json", 1e-10,
                          {"condition": "iii-prime", "epsilon": "0.2"})
    assert cfg.weights_spec == "power-law:rho=1/2,r=2"
    assert cfg.n == (10, 20, 30)
    text = cfg.to_text()
    again = RunConfig.from_text(text)
    assert again == cfg and again.to_text() == text
    with pytest.raises(ConfigError):
        RunConfig.from_text("command=count")


def test_parsers_and_format():
    assert parse_n_range("5") == (5,)
    assert parse_n_range("1:3,7") == (1, 2, 3, 7)
    for bad in ("", "a", "3:1:0", "-2"):
        with pytest.raises(ConfigError):
            parse_n_range(bad)
    assert parse_weights_spec("example3")[0] == "example3"
    with pytest.raises(ConfigError):
        parse_weights_spec("power-law:rho=1")
    with pytest.raises(ConfigError):
        parse_weights_spec("forest:x=1")
    assert fmt_value(0.1) == "0.10000000000000001"
    assert fmt_value(10 ** 30) == "1" + "0" * 30
    assert fmt_value(float("-inf")) == "-inf"
