import json
from typing import TextIO

from verification_core.converters import plain
from verification_core.interfaces import AbstractReportWriter
from verification_core.models import Report

from .report_config import JSON_INDENT, SCHEMA_VERSION


class JsonReportWriter(AbstractReportWriter):
    """Writes the whole report as one JSON document: table rows and verdicts side by side."""

    def write(self, report: Report, stream: TextIO) -> None:
        document = {
            "schema": SCHEMA_VERSION,
            "command": report.command,
            "rows": report.rows,
            "verdicts": [v.to_dict() for v in report.verdicts],
        }
        json.dump(document, stream, indent=JSON_INDENT, default=plain, allow_nan=True)
        stream.write("\n")
