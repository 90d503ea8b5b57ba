from __future__ import annotations

import json
from datetime import datetime, timedelta, timezone

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ovc.report import (
    ConstraintResult,
    ReportFormatError,
    Summary,
    ValidationReport,
    Verdict,
    parse_json,
    render_json,
    render_text,
)

TS = datetime(2025, 3, 4, 5, 6, 7, 890, tzinfo=timezone.utc)

_text = st.text(st.characters(codec="utf-8", exclude_categories=("Cs",)), max_size=12)
results = st.builds(
    ConstraintResult,
    st.from_regex(r"[A-Za-z_]\w{0,10}", fullmatch=True),
    st.from_regex(r"[A-Z]\w{0,10}", fullmatch=True),
    st.sampled_from(list(Verdict)),
    st.lists(st.from_regex(r"[A-Za-z][\w/]{0,10}", fullmatch=True), max_size=3).map(tuple),
    _text,
)
reports = st.builds(
    ValidationReport,
    _text,
    st.datetimes(timezones=st.just(timezone.utc)),
    st.lists(results, max_size=5).map(tuple),
)


@given(reports)
def test_json_round_trip(report):
    assert parse_json(render_json(report)) == report


@given(reports)
def test_summary_is_tally_and_matches_text(report):
    counts = json.loads(render_json(report))["summary"]
    statuses = [r.status for r in report.results]
    assert counts == {
        "satisfied": statuses.count(Verdict.SATISFIED),
        "violated": statuses.count(Verdict.VIOLATED),
        "undefined": statuses.count(Verdict.UNDEFINED),
    }
    last = render_text(report).splitlines()[-1]
    assert last == f"{counts['satisfied']} satisfied, {counts['violated']} violated, {counts['undefined']} undefined"


def test_text_layout():
    report = ValidationReport(
        "Demo",
        TS,
        (
            ConstraintResult("A", "C", Verdict.SATISFIED),
            ConstraintResult("B", "C", Verdict.VIOLATED, ("x", "y"), "bad"),
        ),
    )
    assert render_text(report) == (
        "Validation of Demo at 2025-03-04T05:06:07.000890Z\n"
        "A [Satisfied]\n"
        "B [Violated] x, y\n"
        "1 satisfied, 1 violated, 0 undefined\n"
    )


def test_timestamp_normalized_to_utc():
    local = TS.astimezone(timezone(timedelta(hours=2)))
    assert render_text(ValidationReport("D", local)) == render_text(ValidationReport("D", TS))


def test_inconsistent_summary_rejected():
    with pytest.raises(ValueError):
        ValidationReport("D", TS, (), Summary(1, 0, 0))
    doc = json.loads(render_json(ValidationReport("D", TS)))
    doc["summary"]["violated"] = 2
    with pytest.raises(ReportFormatError):
        parse_json(json.dumps(doc))


@pytest.mark.parametrize("bad", [b"", b"[]", b"{}", b'{"instanceName": 1}'])
def test_malformed_documents(bad):
    with pytest.raises(ReportFormatError):
        parse_json(bad)
