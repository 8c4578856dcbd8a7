import csv
import io
import json
import os
import unittest
from unittest.mock import patch

import pytest
from pytest import approx

from cube_core.cube_config import N_CAP_ENV_VAR, TOLERANCE_ENV_VAR
from main import main


def run(capsys, *argv: str) -> tuple[int, str]:
    status = main(list(argv))
    return status, capsys.readouterr().out


def test_check_hyper_on_antitribes(capsys):
    status, out = run(capsys, "check-hyper", "--theorem", "13", "--fn", "antitribes:s=2,w=3", "--p", "0.2")
    assert status == 0
    document = json.loads(out)
    assert document["schema"] == 1
    (verdict,) = document["verdicts"]
    assert verdict["instance"] == "antitribes:s=2,w=3@p=0.2"
    assert verdict["theorem"] == "13"
    assert verdict["pass"] is True
    assert "runtime_ms" not in verdict


def test_threshold_curve_of_a_dictator(capsys):
    """The measure of a dictator is p itself."""
    status, out = run(capsys, "threshold", "--fn", "dictator", "--grid", "16", "--format", "csv")
    assert status == 0
    records = list(csv.DictReader(io.StringIO(out)))
    assert len(records) == 16
    for record in records:
        assert float(record["mu"]) == approx(float(record["p"]))


@pytest.mark.parametrize(
    "argv",
    [
        ["check-hyper", "--fn", "antitribes:s=2,w"],
        ["check-hyper", "--fn", "nosuch"],
        ["check-hyper", "--fn", "dictator", "--theorem", "99"],
        ["check-hyper", "--fn", "dictator", "--param", "bogus=1"],
        ["threshold", "--fn", "dictator", "--sweep", "p=0.1;p=0.2"],
        ["threshold"],
        ["product", "--product", "missing.prod"],
    ],
)
def test_configuration_errors_exit_2_without_a_report(capsys, argv):
    status, out = run(capsys, *argv)
    assert status == 2
    assert out == ""


def test_reports_are_reproducible(tmp_path, capsys):
    argv = ["stability", "--fn", "majority:k=3", "--sweep", "p=0.2,0.4", "--rho", "0.3/0.6", "--format", "csv"]
    first, second = tmp_path / "first.csv", tmp_path / "second.csv"
    assert main([*argv, "--output", str(first)]) == 0
    assert main([*argv, "--output", str(second)]) == 0
    assert capsys.readouterr().out == ""
    assert first.read_bytes() == second.read_bytes()
    records = list(csv.DictReader(io.StringIO(first.read_text(encoding="utf-8"))))
    assert [r["instance"] for r in records] == ["majority:k=3@p=0.2"] * 2 + ["majority:k=3@p=0.4"] * 2


def test_timings_are_opt_in(capsys):
    status, out = run(capsys, "influences", "--fn", "and:k=2", "--p", "0.3", "--timings")
    assert status == 0
    verdicts = json.loads(out)["verdicts"]
    assert verdicts and all("runtime_ms" in v for v in verdicts)


def test_truth_table_and_polynomial_files(tmp_path, capsys):
    table = tmp_path / "and.tt"
    table.write_text("2 0.3\n0\n0\n0\n1\n", encoding="utf-8")
    status, out = run(capsys, "transform", "--table", str(table), "--p", "0.25")
    assert status == 0
    document = json.loads(out)
    assert {row["instance"] for row in document["rows"]} == {"and.tt@p=0.25"}
    assert document["rows"][0]["coeff"] == approx(0.25**2)

    poly = tmp_path / "f.poly"
    poly.write_text("1 1.0\n2 1.0\n3 0.5\n", encoding="utf-8")
    status, out = run(capsys, "invariance", "--poly", str(poly), "--theorem", "telescoping")
    assert status == 0
    assert [v["theorem"] for v in json.loads(out)["verdicts"]] == ["telescoping"]


def test_influence_rows_carry_beta(capsys):
    status, out = run(capsys, "influences", "--fn", "tribes:s=2,w=2", "--p", "0.3")
    assert status == 0
    rows = json.loads(out)["rows"]
    measure = 1.0 - (1.0 - 0.3**2) ** 2
    assert {row["beta"] for row in rows} == {rows[0]["beta"]}
    assert rows[0]["beta"] == approx(max(row["I_S"] for row in rows) / measure)


def test_noise_route_theorem_is_asserted_only_with_its_constant(capsys):
    argv = ["threshold", "--theorem", "noise-route", "--fn", "and", "--n", "3"]
    argv += ["--param", "lo=0.02", "--param", "hi=0.03", "--param", "eps=0.25"]
    status, out = run(capsys, *argv)
    assert status == 0
    document = json.loads(out)
    theorem = next(v for v in document["verdicts"] if v["theorem"] == "noise_route.theorem")
    assert theorem["pass"] is False and theorem["asserted"] is False
    assert document["rows"][0]["min_constant"] > 2.0

    status, _ = run(capsys, *argv, "--param", "C0=2")
    assert status == 1


def test_zoo_lists_the_generators(capsys):
    status, out = run(capsys, "zoo")
    assert status == 0
    names = {row["name"] for row in json.loads(out)["rows"]}
    assert {"dictator", "tribes", "antitribes", "majority"} <= names


class TestEnvironmentOverrides(unittest.TestCase):
    @patch.dict(os.environ, {N_CAP_ENV_VAR: "4"})
    def test_dimension_cap_from_the_environment(self):
        with patch("sys.stdout", new_callable=io.StringIO):
            self.assertEqual(main(["transform", "--fn", "and:k=6"]), 2)
            self.assertEqual(main(["transform", "--fn", "and:k=4"]), 0)

    @patch.dict(os.environ, {N_CAP_ENV_VAR: "4"})
    def test_flag_beats_the_environment(self):
        with patch("sys.stdout", new_callable=io.StringIO):
            self.assertEqual(main(["transform", "--fn", "and:k=6", "--n-cap", "8"]), 0)

    @patch.dict(os.environ, {N_CAP_ENV_VAR: "many"})
    def test_malformed_cap(self):
        self.assertEqual(main(["transform", "--fn", "dictator"]), 2)

    @patch.dict(os.environ, {TOLERANCE_ENV_VAR: "-1"})
    def test_malformed_tolerance(self):
        self.assertEqual(main(["transform", "--fn", "dictator"]), 2)
        self.assertEqual(main(["transform", "--fn", "dictator", "--tolerance", "-1"]), 2)
