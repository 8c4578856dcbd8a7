import csv
import json
from typing import Any, TextIO

from verification_core.converters import plain
from verification_core.interfaces import AbstractReportWriter
from verification_core.models import Report, VerdictRow

from .report_config import PARAM_PREFIX


def flatten_verdict(verdict: VerdictRow) -> dict:
    """One flat record per verdict, its parameters spread into ``param.<name>`` columns."""
    out = verdict.to_dict()
    params = out.pop("params")
    for key, value in params.items():
        out[PARAM_PREFIX + key] = value
    return out


def cell(value: Any) -> Any:
    value = plain(value)
    if isinstance(value, list | dict):
        return json.dumps(value, default=plain, sort_keys=True)
    return value


class CsvReportWriter(AbstractReportWriter):
    """
    Writes one table: the command's data rows when it produced any, the verdicts otherwise.

    Columns follow first appearance, so every sweep point lands under the same header.
    """

    def write(self, report: Report, stream: TextIO) -> None:
        records = report.rows if report.rows else [flatten_verdict(v) for v in report.verdicts]
        columns: dict[str, None] = {}
        for record in records:
            columns.update(dict.fromkeys(record))
        writer = csv.DictWriter(stream, fieldnames=list(columns), lineterminator="\n")
        writer.writeheader()
        for record in records:
            writer.writerow({k: cell(v) for k, v in record.items()})
