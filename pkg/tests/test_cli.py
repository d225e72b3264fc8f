import io
import json
from pathlib import Path

import jsonschema
import pytest

from checkerxi.cli import main

SCHEMAS = Path(__file__).resolve().parent.parent / "docs" / "schemas"


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(map(str, argv)), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def schema(name):
    return json.loads((SCHEMAS / f"{name}.schema.json").read_text())


@pytest.fixture
def delta2_csv(tmp_path):
    p = tmp_path / "delta2.csv"
    p.write_text("0.375,0.125\n0.125,0.375\n")
    return p


@pytest.fixture
def como_csv(tmp_path):
    p = tmp_path / "como.csv"
    p.write_text("x,y\n1,1\n2,2\n3,3\n4,4\n")
    return p


def report_lines(text):
    return dict(line.split("=", 1) for line in text.splitlines() if "=" in line and not line.startswith("#"))


class TestMeasures:
    def test_check_min(self, delta2_csv):
        code, out, _ = run("measures", "--matrix", delta2_csv, "--family", "min")
        assert code == 0
        assert "ξ=0.4375" in out.splitlines()
        assert out.startswith("# seed=0\n")

    def test_identity_shuffle(self):
        code, out, _ = run("measures", "--shuffle", "1,2,3")
        r = report_lines(out)
        assert code == 0
        assert [r[k] for k in ("τ", "ρ_S", "ξ", "λL", "λU")] == ["1"] * 5

    @pytest.mark.parametrize("family", ["pi", "min", "w", "bernstein"])
    def test_json(self, delta2_csv, family):
        code, out, _ = run("measures", "--matrix", delta2_csv, "--family", family, "--json", "--seed", 4)
        assert code == 0
        doc = json.loads(out)
        jsonschema.validate(doc, schema("measures"))
        assert doc["family"] == family and doc["seed"] == 4

    def test_json_shuffle(self):
        doc = json.loads(run("measures", "--shuffle", "2,3,1", "--json")[1])
        jsonschema.validate(doc, schema("measures"))
        assert doc["tau"] == pytest.approx(1 / 9, abs=1e-15)

    def test_json_matrix_input(self, tmp_path):
        p = tmp_path / "d.json"
        p.write_text(json.dumps({"m": 2, "n": 2, "entries": [[0.375, 0.125], [0.125, 0.375]]}))
        doc = json.loads(run("measures", "--matrix", p, "--family", "pi", "--json")[1])
        assert doc["rho_s"] == pytest.approx(3 / 8, abs=1e-15)

    def test_invalid_matrix(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("0.375,0.125\n0.125,0.125\n")
        code, out, err = run("measures", "--matrix", p)
        assert code == 1 and out == ""
        assert err.startswith("error: RowSumViolation")

    def test_missing_file(self, tmp_path):
        code, _, err = run("measures", "--matrix", tmp_path / "nope.csv")
        assert code == 1 and "error:" in err

    def test_bad_permutation_is_usage_error(self, capsys):
        assert run("measures", "--shuffle", "1,1,2")[0] == 2

    def test_usage_errors(self, capsys):
        assert run()[0] == 2
        assert run("measures")[0] == 2
        assert run("measures", "--shuffle", "1", "--family", "nope")[0] == 2

    def test_help(self, capsys):
        assert run("--help")[0] == 0
        assert "measures" in capsys.readouterr().out


class TestEstimate:
    def test_lower_comonotone(self, como_csv):
        code, out, _ = run("estimate", "--in", como_csv, "--variant", "lower", "--kappa", 0.5)
        assert code == 0 and report_lines(out)["ξ"] == "0.5"

    @pytest.mark.parametrize("variant", ["avg", "upper", "lower", "classical"])
    def test_json(self, como_csv, variant):
        code, out, _ = run("estimate", "--in", como_csv, "--variant", variant, "--kappa", 0.5, "--json")
        doc = json.loads(out)
        jsonschema.validate(doc, schema("estimate"))
        assert code == 0 and doc["n"] == 4 and doc["variant"] == variant

    def test_bad_row(self, tmp_path):
        p = tmp_path / "s.csv"
        p.write_text("x,y\n1,2\n3,oops\n")
        code, _, err = run("estimate", "--in", p)
        assert code == 1 and "InvalidSample" in err and "line 3" in err

    def test_bad_kappa(self, como_csv):
        assert run("estimate", "--in", como_csv, "--kappa", 2)[0] == 1

    def test_degenerate(self, tmp_path):
        p = tmp_path / "s.csv"
        p.write_text("x,y\n1,2\n3,2\n4,2\n")
        code, _, err = run("estimate", "--in", p, "--variant", "classical")
        assert code == 1 and "DegenerateY" in err


class TestSample:
    def test_round_trip(self, tmp_path):
        out = tmp_path / "s.csv"
        assert run("sample", "--shuffle", "1,2,3,4", "--count", 400, "--seed", 3, "--out", out)[0] == 0
        text = out.read_text()
        assert text.startswith("# seed=3\nx,y\n")
        code, res, _ = run("estimate", "--in", out, "--variant", "lower", "--kappa", 0.5)
        # comonotone data, g = 20: lower = 1 - 1/20
        assert code == 0 and float(report_lines(res)["ξ"]) == pytest.approx(0.95, abs=1e-12)

    def test_matrix(self, delta2_csv):
        code, out, _ = run("sample", "--matrix", delta2_csv, "--family", "min", "--count", 5)
        assert code == 0 and len(out.splitlines()) == 7

    def test_stdout_deterministic(self):
        a = run("sample", "--shuffle", "2,1", "--count", 50, "--seed", 8)
        b = run("sample", "--shuffle", "2,1", "--count", 50, "--seed", 8)
        assert a == b and a[0] == 0

    def test_count(self):
        assert run("sample", "--shuffle", "2,1", "--count", 0)[0] == 1


class TestOracle:
    def test_text(self, delta2_csv):
        code, out, _ = run("oracle", "--matrix", delta2_csv, "--family", "min")
        rows = {line.split(",")[0]: line.split(",") for line in out.splitlines()[3:]}
        assert code == 0
        assert float(rows["ξ"][1]) == 0.4375 and abs(float(rows["ξ"][3])) < 1e-8

    @pytest.mark.parametrize(
        "argv",
        [("--matrix", "M", "--family", "w"), ("--matrix", "M", "--family", "bernstein"), ("--shuffle", "2,3,1")],
    )
    def test_json(self, delta2_csv, argv):
        argv = [delta2_csv if a == "M" else a for a in argv]
        code, out, _ = run("oracle", *argv, "--json", "--points", 6)
        doc = json.loads(out)
        jsonschema.validate(doc, schema("oracle"))
        assert code == 0
        for key in ("rho_s", "tau"):
            assert abs(doc["difference"][key]) < 1e-6


class TestExperiment:
    def test_convergence(self, tmp_path):
        out = tmp_path / "c.csv"
        argv = ("experiment", "convergence", "--ns", "200,400", "--kappas", "0.5", "--replicates", 2,
                "--seed", 5, "--out", out)
        assert run(*argv)[0] == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "# seed=5" and lines[1] == "model,n,kappa,replicate,variant,value"
        assert len(lines) == 2 + 2 * 2 * 4
        first = out.read_text()
        run(*argv)
        assert out.read_text() == first

    def test_threads_do_not_change_output(self):
        base = ("experiment", "convergence", "--model", "independence", "--ns", "300", "--replicates", 3)
        assert run(*base, "--threads", 1)[1] == run(*base, "--threads", 3)[1]

    def test_timing(self):
        code, out, _ = run("experiment", "timing", "--ns", "500,1000", "--repeats", 1)
        lines = out.splitlines()
        assert code == 0 and lines[1] == "estimator,n,millis" and len(lines) == 2 + 6

    def test_bad_list(self):
        assert run("experiment", "convergence", "--ns", "a,b")[0] == 2


class TestReproducibility:
    @pytest.mark.parametrize(
        "argv",
        [
            ("measures", "--shuffle", "3,1,2"),
            ("measures", "--shuffle", "3,1,2", "--json"),
            ("oracle", "--shuffle", "3,1,2"),
        ],
    )
    def test_byte_identical(self, argv):
        assert run(*argv) == run(*argv)


def test_module_entry_point():
    import subprocess
    import sys

    proc = subprocess.run(
        [sys.executable, "-m", "checkerxi", "measures", "--shuffle", "2,3,1"], capture_output=True, text=True
    )
    assert proc.returncode == 0 and "ρ_S=-0.333333333333333" in proc.stdout
