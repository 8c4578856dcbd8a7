import csv
import io
import json

import numpy as np
import pytest

from report_writers.csv_writer import CsvReportWriter, flatten_verdict
from report_writers.json_writer import JsonReportWriter
from verification_core.models import Report, VerdictRow


@pytest.fixture
def report() -> Report:
    verdicts = [
        VerdictRow("antitribes@p=0.2", "qnorm", {"q": 4, "rho": 0.05}, 0.5, 0.75, 0.25, True),
        VerdictRow("antitribes@p=0.3", "qnorm.beta", {"q": np.int64(6)}, 1.0, 0.5, -0.5, False, asserted=False),
    ]
    return Report("check-hyper", [], verdicts)


def written(writer, report: Report) -> str:
    stream = io.StringIO()
    writer.write(report, stream)
    return stream.getvalue()


def test_json_report_layout(report: Report):
    document = json.loads(written(JsonReportWriter(), report))
    assert document["schema"] == 1
    assert document["command"] == "check-hyper"
    assert document["rows"] == []
    first, second = document["verdicts"]
    assert first == {
        "instance": "antitribes@p=0.2",
        "theorem": "qnorm",
        "params": {"q": 4, "rho": 0.05},
        "lhs": 0.5,
        "rhs": 0.75,
        "margin": 0.25,
        "pass": True,
        "asserted": True,
    }
    assert second["params"] == {"q": 6}
    assert second["asserted"] is False


def test_json_report_carries_timings_only_when_measured(report: Report):
    report.verdicts[0].runtime_ms = 1.5
    verdicts = json.loads(written(JsonReportWriter(), report))["verdicts"]
    assert verdicts[0]["runtime_ms"] == 1.5
    assert "runtime_ms" not in verdicts[1]


def test_json_is_deterministic(report: Report):
    assert written(JsonReportWriter(), report) == written(JsonReportWriter(), report)


def test_csv_flattens_verdict_parameters(report: Report):
    assert flatten_verdict(report.verdicts[0])["param.rho"] == 0.05
    records = list(csv.DictReader(io.StringIO(written(CsvReportWriter(), report))))
    assert len(records) == 2
    assert records[0]["param.q"] == "4"
    assert records[0]["param.rho"] == "0.05"
    assert records[1]["param.rho"] == ""
    assert records[1]["pass"] == "False"


def test_csv_prefers_data_rows(report: Report):
    report.rows = [
        {"instance": "dictator", "p": 0.1, "mu": 0.1},
        {"instance": "dictator", "p": 0.5, "mu": 0.5, "S": (0, 2)},
    ]
    text = written(CsvReportWriter(), report)
    header, *lines = text.splitlines()
    assert header == "instance,p,mu,S"
    assert lines == ["dictator,0.1,0.1,", 'dictator,0.5,0.5,"[0, 2]"']
