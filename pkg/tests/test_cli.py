import json
from pathlib import Path

import jsonschema
import pytest

from askey_zeros.cli import UsageError, main, parse_degrees, parse_params

SCHEMA = json.loads((Path(__file__).resolve().parents[1] / "docs" / "report_schema.json").read_text())
VALIDATOR = jsonschema.Draft202012Validator(SCHEMA)
AW = ["--family", "askey_wilson", "--params", "a1=0.3,a2=0.2+0.1i,a3=0.2-0.1i,a4=0.4"]


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def load(path):
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    VALIDATOR.validate(data)
    return data


def test_schema_is_valid():
    jsonschema.Draft202012Validator.check_schema(SCHEMA)


def test_list_all(capsys):
    code, out, _ = run(capsys, "list")
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "32 families"
    assert len(lines) == 33


def test_list_hermite(capsys):
    code, out, _ = run(capsys, "list", "--family", "hermite")
    assert code == 0
    assert "parameters: none; eta=x; E(n)=2n" in out


def test_list_q_racah(capsys):
    _, out, _ = run(capsys, "list", "--family", "q_racah")
    assert "parameters: a, b, d, N, q with c = q^-N" in out


def test_list_unknown_family(capsys):
    code, _, err = run(capsys, "list", "--family", "nope")
    assert code == 2 and "unknown family" in err


def test_verify_hermite(capsys, tmp_path):
    out_file = tmp_path / "h.json"
    code, out, _ = run(capsys, "verify", "--family", "hermite", "--N", "6", "--out", str(out_file))
    assert code == 0
    assert "PASS hermite N=6 eigenvalues {12, 10, 8, 6, 4, 2}" in out
    rep = load(out_file)
    assert rep["passed"] and rep["schema_version"] == 1
    assert rep["spectrum"]["theoretical"] == [12, 10, 8, 6, 4, 2]
    assert "wall_time" not in rep


def test_verify_askey_wilson(capsys, tmp_path):
    out_file = tmp_path / "aw.json"
    code, _, _ = run(capsys, "verify", *AW, "--q", "0.5", "--N", "5", "--out", str(out_file), "--timing")
    assert code == 0
    rep = load(out_file)
    # b4 = a1 a2 a3 a4 with a3 = conj(a2)
    q, b4 = 0.5, 0.3 * abs(0.2 + 0.1j) ** 2 * 0.4

    def E(n):
        return (q**-n - 1) * (1 - b4 * q ** (n - 1))

    assert rep["spectrum"]["theoretical"] == pytest.approx([E(5) - E(m) for m in range(5)], rel=1e-14)
    assert rep["wall_time"] >= 0


def test_verify_askey_wilson_needs_q(capsys):
    code, _, err = run(capsys, "verify", *AW, "--N", "5")
    assert code == 2 and "q" in err


def test_verify_range_violation(capsys):
    code, _, err = run(capsys, "verify", "--family", "jacobi", "--params", "g=-1")
    assert code == 2 and "g > -1/2" in err


def test_verify_degree_beyond_lattice(capsys):
    code, _, err = run(capsys, "verify", "--family", "hahn", "--params", "a=1,b=1,N=4", "--N", "4")
    assert code == 2 and "max_degree" in err


def test_verify_check_failure(capsys):
    code, out, _ = run(capsys, "verify", "--family", "hermite", "--N", "4", "--tol-eig", "0")
    assert code == 1 and out.startswith("FAIL")


def test_verify_dump_matrix(capsys, tmp_path):
    csv_file = tmp_path / "m.csv"
    code, _, _ = run(capsys, "verify", "--family", "hermite", "--N", "2", "--dump-matrix", str(csv_file))
    rows = csv_file.read_text().splitlines()
    assert code == 0 and rows[0] == "row,col,re,im" and len(rows) == 5
    assert float(rows[1].split(",")[2]) == pytest.approx(3.0)


def test_sweep_run_count(capsys, tmp_path):
    code, out, _ = run(capsys, "sweep", "--family", "racah,q_racah", "--N", "3", "--draws", "10",
                       "--out", str(tmp_path))
    summary = load(tmp_path / "summary.json")
    assert code == 0 and summary["runs"] == 20 and summary["passed"]
    assert out.startswith("20/20 runs passed")
    runs = sorted(tmp_path.glob("*_N3_draw*.json"))
    assert len(runs) == 20
    for p in runs:
        load(p)


def test_sweep_is_byte_identical(capsys, tmp_path):
    args = ["sweep", "--family", "hermite,meixner,askey_wilson", "--N", "2..4", "--draws", "2", "--seed", "42"]
    run(capsys, *args, "--out", str(tmp_path / "a"))
    run(capsys, *args, "--out", str(tmp_path / "b"), "--jobs", "2")
    a, b = sorted((tmp_path / "a").iterdir()), sorted((tmp_path / "b").iterdir())
    assert [p.name for p in a] == [p.name for p in b]
    assert all(x.read_bytes() == y.read_bytes() for x, y in zip(a, b))


def test_sweep_usage_errors(capsys):
    assert run(capsys, "sweep")[0] == 2
    assert run(capsys, "sweep", "--family", "hermite,bogus")[0] == 2


def test_diophantine_hermite(capsys, tmp_path):
    out_file = tmp_path / "d.json"
    code, out, _ = run(capsys, "diophantine", "--family", "hermite", "--N", "4", "--trials", "100",
                       "--seed", "1", "--out", str(out_file))
    assert code == 0 and "spectrum {8, 6, 4, 2} invariant" in out
    rep = load(out_file)
    assert rep["spectrum"] == [8, 6, 4, 2] and rep["max_deviation"] <= 1e-8


def test_diophantine_laguerre(capsys):
    code, out, _ = run(capsys, "diophantine", "--family", "laguerre", "--params", "alpha=1.5", "--N", "3",
                       "--trials", "50")
    assert code == 0 and "{12, 8, 4}" in out


@pytest.mark.parametrize("argv", [
    ["diophantine", "--family", "hahn"],
    ["diophantine", "--family", "hermite", "--N", "11"],
    ["verify", "--family", "hermite", "--params", "junk"],
    ["verify", "--family", "hermite", "--N", "2..3"],
    ["verify"],
])
def test_usage_errors_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


@pytest.mark.parametrize("text, expected", [("5", [5]), ("2..4", [2, 3, 4]), ("2,4,6", [2, 4, 6])])
def test_parse_degrees(text, expected):
    assert parse_degrees(text) == expected


@pytest.mark.parametrize("text", ["", "0", "a..b", "3..1"])
def test_parse_degrees_rejects(text):
    with pytest.raises(UsageError):
        parse_degrees(text)


def test_parse_params():
    assert parse_params("a=1,b=0.2+0.1i, c=-3") == {"a": 1, "b": 0.2 + 0.1j, "c": -3}
    with pytest.raises(UsageError):
        parse_params("a=1,a=2")


@pytest.mark.parametrize("argv", [
    ["verify", "--family", "hermite", "--N", "3", "--out", "-"],
    ["diophantine", "--family", "hermite", "--N", "3", "--trials", "5", "--out", "-"],
])
def test_report_on_stdout_is_pure_json(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 0
    VALIDATOR.validate(json.loads(out))
    assert err.startswith("PASS")
