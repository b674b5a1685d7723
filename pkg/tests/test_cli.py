import csv
import io
import json
from collections import Counter

import pytest

from hyperhiggs.cli import (
    EXIT_CONFIG,
    EXIT_INCOMPLETE,
    EXIT_OK,
    EXIT_VERIFY_FAILED,
    ConfigError,
    canonical_json,
    format_complex,
    main,
    parse_complex,
    parse_window,
    svg_dataset,
    worker_count,
)

PLANE = ["--model", "plane", "--omega2", "0-100i"]
HALF_CYLINDER = ["--model", "half-cylinder", "--ell", "6.283185307179586", "--omega2", "0-100i"]


def run(tmp_path, *argv, name="out"):
    path = tmp_path / name
    code = main([*argv, "--out", str(path)])
    return code, (path.read_text() if path.exists() else None)


def csv_multiset(text):
    rows = list(csv.DictReader(io.StringIO(text)))
    return Counter((r["kind"], int(r["m"]), int(r["n"]), float(r["z_re"]), float(r["z_im"]),
                    r["flags"]) for r in rows)


def json_multiset(text):
    doc = json.loads(text)
    return Counter((p["kind"], p["m"], p["n"], p["z"]["re"], p["z"]["im"], ";".join(p["flags"]))
                   for p in doc["points"])


class TestParsing:
    @pytest.mark.parametrize("text,value", [
        ("0-100i", -100j), ("3+4i", 3 + 4j), ("-1.5e2+0.25i", -150 + 0.25j),
        ("+.5-2i", 0.5 - 2j), ("9+0i", 9),
    ])
    def test_complex(self, text, value):
        assert parse_complex(text) == value

    @pytest.mark.parametrize("text", ["3", "3+4j", "3 + 4i", "i", "1+i", "abc"])
    def test_complex_rejects(self, text):
        with pytest.raises(ConfigError):
            parse_complex(text)

    def test_complex_round_trip(self):
        z = 0.1 - 1e-300j
        assert parse_complex(format_complex(z)) == z

    def test_window(self):
        w = parse_window("-100,1,-1,1")
        assert (w.re_min, w.re_max, w.im_min, w.im_max) == (-100, 1, -1, 1)
        with pytest.raises(ConfigError):
            parse_window("1,0,0,1")
        with pytest.raises(ConfigError):
            parse_window("1,2,3")

    def test_canonical_json(self):
        assert canonical_json({"b": [0.1, -0.0, 2], "a": None}) == '{"b":[0.10000000000000001,0,2],"a":null}'


class TestExitCodes:
    @pytest.mark.parametrize("argv", [
        [],
        ["spectrum"],
        ["spectrum", "--model", "torus"],
        ["spectrum", "--model", "plane", "--omega2", "1+i"],
        ["spectrum", "--model", "plane", "--omega2", "0-100i", "--m-max", "-1"],
        ["spectrum", "--model", "eckart", "--omega2", "1+0i"],
        ["spectrum", "--model", "half-cylinder", "--omega2", "1+0i"],
        ["spectrum", "--model", "half-cylinder", "--omega2", "1+0i", "--ell", "0"],
        ["spectrum", "--model", "plane", "--omega2", "1+0i", "--modes", "-1"],
        ["spectrum", "--model", "eckart", "--omega2", "1+0i", "--alpha", "0+0i", "--modes", "1"],
        ["spectrum", "--model", "plane", "--omega2", "1+0i", "--modes", "a,b"],
        ["resonances", "--model", "plane", "--omega2", "1+0i"],
        ["resonances", "--model", "plane", "--omega2", "1+0i", "--window", "1,0,0,1"],
        ["plot", "--model", "plane", "--omega2", "1+0i", "--window", "0,1,0,1", "--format", "csv"],
        ["verify", "--format", "csv"],
        ["verify", "--suite", "nonsense"],
        ["verify", "--reproduce", "fig1"],
        ["spectrum", "--reproduce", "fig3"],
        ["spectrum", "--model", "plane", "--omega2", "0+0i", "--out", "/nonexistent/dir/x.csv"],
    ])
    def test_config_errors(self, argv, capsys):
        assert main(argv) == EXIT_CONFIG
        assert "error" in capsys.readouterr().err

    def test_empty_plane_spectrum(self, tmp_path):
        code, text = run(tmp_path, "spectrum", "--model", "plane", "--omega2", "0+0i")
        assert code == EXIT_OK
        assert text.splitlines() == ["model,kind,m,n,z_re,z_im,flags"]

    def test_incomplete(self, tmp_path):
        argv = ["spectrum", *PLANE, "--m-max", "1", "--n-max", "40"]
        assert run(tmp_path, *argv)[0] == EXIT_INCOMPLETE
        assert run(tmp_path, *argv, "--allow-incomplete")[0] == EXIT_OK

    def test_incomplete_resonances(self, tmp_path):
        argv = ["resonances", "--model", "plane", "--omega2", "0+0i", "--window", "-1000,1,-1,1",
                "--m-max", "2", "--n-max", "2"]
        assert run(tmp_path, *argv)[0] == EXIT_INCOMPLETE

    def test_empty_plot(self, tmp_path):
        argv = ["plot", "--model", "plane", "--omega2", "0+0i", "--window", "1,2,1,2"]
        assert run(tmp_path, *argv)[0] == EXIT_CONFIG
        code, text = run(tmp_path, *argv, "--allow-empty")
        assert code == EXIT_OK
        assert text.startswith("<svg") or text.startswith("<?xml")
        assert svg_dataset(text)["points"] == []

    def test_thread_variable(self, monkeypatch, tmp_path):
        monkeypatch.setenv("HIGGS_SPEC_THREADS", "zero")
        with pytest.raises(ConfigError):
            worker_count()
        assert main(["verify", "--suite", "unitarity", "--out", str(tmp_path / "r")]) == EXIT_CONFIG
        monkeypatch.setenv("HIGGS_SPEC_THREADS", "0")
        with pytest.raises(ConfigError):
            worker_count()
        monkeypatch.setenv("HIGGS_SPEC_THREADS", "3")
        assert worker_count() == 3


class TestOutputs:
    def test_figure_one_eigenvalues(self, tmp_path):
        code, text = run(tmp_path, "spectrum", *PLANE, "--m-max", "40", "--n-max", "40",
                         "--format", "json")
        assert code == EXIT_OK
        doc = json.loads(text)
        assert doc["meta"]["branch"] == "principal" and doc["meta"]["complete"] is True
        assert len(doc["points"]) == 16
        assert all(p["kind"] == "eigenvalue" for p in doc["points"])

    def test_half_cylinder_modes(self, tmp_path):
        code, text = run(tmp_path, "spectrum", *HALF_CYLINDER, "--modes", "0,10,20",
                         "--format", "json")
        assert code == EXIT_OK
        assert {p["m"] for p in json.loads(text)["points"]} <= {0, 10, 20}

    def test_csv_json_same_points(self, tmp_path):
        argv = ["resonances", *PLANE, "--window", "-300,100,-150,20", "--m-max", "40",
                "--n-max", "40", "--reference"]
        _, as_csv = run(tmp_path, *argv, "--format", "csv", name="a.csv")
        _, as_json = run(tmp_path, *argv, "--format", "json", name="a.json")
        assert csv_multiset(as_csv) == json_multiset(as_json)
        assert sum(csv_multiset(as_csv).values()) > 0

    def test_json_round_trip(self, tmp_path):
        _, text = run(tmp_path, "resonances", *HALF_CYLINDER, "--modes", "0,10,20",
                      "--window", "-300,500,-250,250", "--n-max", "40", "--format", "json")
        assert canonical_json(json.loads(text)) + "\n" == text

    def test_omega_zero_resonances_real(self, tmp_path):
        _, text = run(tmp_path, "resonances", "--model", "plane", "--omega2", "0+0i",
                      "--window", "-100,1,-1,1")
        rows = list(csv.DictReader(io.StringIO(text)))
        assert rows and all(float(r["z_im"]) == 0 for r in rows)

    def test_resonances_contain_eigenvalues(self, tmp_path):
        window = ["--window", "-300,100,-150,20", "--m-max", "40", "--n-max", "40"]
        _, eig = run(tmp_path, "spectrum", *PLANE, *window, name="e")
        _, res = run(tmp_path, "resonances", *PLANE, *window, name="r")
        res_points = {k[1:] for k in csv_multiset(res)}
        for key in csv_multiset(eig):
            assert key[1:] in res_points

    def test_reference_rows(self, tmp_path):
        _, text = run(tmp_path, "resonances", "--reproduce", "fig2", "--format", "json")
        refs = [p for p in json.loads(text)["points"] if "reference" in p["flags"]]
        assert refs and {p["m"] for p in refs} == {0, 10, 20}

    def test_svg_deterministic(self, tmp_path):
        first = run(tmp_path, "plot", "--reproduce", "fig1", name="a.svg")
        second = run(tmp_path, "plot", "--reproduce", "fig1", name="b.svg")
        assert first[0] == second[0] == EXIT_OK
        assert first[1] == second[1]
        data = svg_dataset(first[1])
        kinds = Counter(p["kind"] for p in data["points"])
        assert kinds["eigenvalue"] == 16 and kinds["resonance"] > 0
        assert data["meta"]["model"] == "plane"

    def test_negative_window_values_accepted(self, tmp_path):
        code, _ = run(tmp_path, "resonances", "--model", "eckart", "--omega2", "-5-1i",
                      "--alpha", "-2+0i", "--window", "-100,10,-10,10")
        assert code == EXIT_OK


class TestVerify:
    def test_unitarity(self, tmp_path):
        code, text = run(tmp_path, "verify", "--suite", "unitarity")
        report = json.loads(text)
        assert code == EXIT_OK and report["pass"] is True
        suite = report["suites"][0]
        assert suite["name"] == "unitarity" and suite["max_error"] <= 1e-10

    def test_eigen_oracle(self, tmp_path):
        code, text = run(tmp_path, "verify", "--suite", "eigen-oracle", *PLANE)
        suite = json.loads(text)["suites"][0]
        assert code == EXIT_OK and suite["max_error"] <= 1e-4

    def test_eckart_condition(self, tmp_path):
        code, text = run(tmp_path, "verify", "--suite", "eckart-condition",
                         "--omega2", "9+0i", "--alpha", "5+0i")
        suite = json.loads(text)["suites"][0]
        assert code == EXIT_OK
        assert (suite["details"]["count_nu_with_alpha"], suite["details"]["count_printed_without_alpha"]) == (2, 3)

    def test_failing_suite_exit(self, tmp_path, monkeypatch):
        import hyperhiggs.cli as cli

        def broken(config, rng):
            return cli._result("unitarity", [1.0], 1e-10)

        monkeypatch.setitem(cli.SUITE_FUNCS, "unitarity", broken)
        code, text = run(tmp_path, "verify", "--suite", "unitarity")
        assert code == EXIT_VERIFY_FAILED and json.loads(text)["pass"] is False

    def test_all_suites_default(self, tmp_path):
        code, text = run(tmp_path, "verify")
        report = json.loads(text)
        assert code == EXIT_OK and report["pass"] is True
        assert len(report["suites"]) == 8
