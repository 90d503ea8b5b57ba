"""Validation reports and their text and JSON renderings.

Text layout::

    Validation of <instanceName> at <timestamp>
    <name> [<status>] <violating ids, comma separated>
    ...
    <s> satisfied, <v> violated, <u> undefined
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Any

from .errors import OvcError


class Verdict(str, Enum):
    SATISFIED = "Satisfied"
    VIOLATED = "Violated"
    UNDEFINED = "Undefined"


class ReportFormatError(OvcError):
    pass


@dataclass(frozen=True)
class ConstraintResult:
    constraint_name: str
    context_class: str
    status: Verdict
    violating_object_ids: tuple[str, ...] = ()
    message: str = ""


@dataclass(frozen=True)
class Summary:
    satisfied: int = 0
    violated: int = 0
    undefined: int = 0

    @classmethod
    def tally(cls, results: tuple[ConstraintResult, ...]) -> Summary:
        statuses = [r.status for r in results]
        return cls(
            statuses.count(Verdict.SATISFIED),
            statuses.count(Verdict.VIOLATED),
            statuses.count(Verdict.UNDEFINED),
        )

    def __str__(self) -> str:
        return f"{self.satisfied} satisfied, {self.violated} violated, {self.undefined} undefined"


@dataclass(frozen=True)
class ValidationReport:
    instance_name: str
    timestamp: datetime
    results: tuple[ConstraintResult, ...] = ()
    summary: Summary = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        tally = Summary.tally(self.results)
        if self.summary is None:
            object.__setattr__(self, "summary", tally)
        elif self.summary != tally:
            raise ValueError(f"summary {self.summary} does not match results ({tally})")

    def result(self, name: str) -> ConstraintResult:
        for res in self.results:
            if res.constraint_name == name:
                return res
        raise KeyError(name)

    @property
    def all_satisfied(self) -> bool:
        return self.summary.violated == 0 and self.summary.undefined == 0


def utcnow() -> datetime:
    return datetime.now(timezone.utc)


def format_timestamp(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).isoformat(timespec="microseconds").replace("+00:00", "Z")


def parse_timestamp(text: str) -> datetime:
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    return datetime.fromisoformat(text)


def render_text(report: ValidationReport) -> str:
    lines = [f"Validation of {report.instance_name} at {format_timestamp(report.timestamp)}"]
    for res in report.results:
        line = f"{res.constraint_name} [{res.status.value}]"
        if res.violating_object_ids:
            line += " " + ", ".join(res.violating_object_ids)
        lines.append(line)
    lines.append(str(report.summary))
    return "\n".join(lines) + "\n"


def report_to_dict(report: ValidationReport) -> dict[str, Any]:
    return {
        "instanceName": report.instance_name,
        "timestamp": format_timestamp(report.timestamp),
        "results": [
            {
                "constraintName": res.constraint_name,
                "contextClass": res.context_class,
                "status": res.status.value,
                "violatingObjectIds": list(res.violating_object_ids),
                "message": res.message,
            }
            for res in report.results
        ],
        "summary": {
            "satisfied": report.summary.satisfied,
            "violated": report.summary.violated,
            "undefined": report.summary.undefined,
        },
    }


def report_from_dict(doc: dict[str, Any]) -> ValidationReport:
    try:
        results = tuple(
            ConstraintResult(
                constraint_name=item["constraintName"],
                context_class=item["contextClass"],
                status=Verdict(item["status"]),
                violating_object_ids=tuple(item["violatingObjectIds"]),
                message=item["message"],
            )
            for item in doc["results"]
        )
        summary = Summary(**doc["summary"])
        return ValidationReport(doc["instanceName"], parse_timestamp(doc["timestamp"]), results, summary)
    except (KeyError, TypeError, ValueError) as exc:
        raise ReportFormatError(f"malformed report document: {exc}") from exc


def render_json(report: ValidationReport) -> str:
    return json.dumps(report_to_dict(report), indent=2, ensure_ascii=False) + "\n"


def parse_json(text: str | bytes) -> ValidationReport:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ReportFormatError(f"report is not JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ReportFormatError("report document must be an object")
    return report_from_dict(doc)
