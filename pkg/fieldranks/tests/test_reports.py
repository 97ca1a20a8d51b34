import csv
import io

import msgspec
import pytest

import sys
import pathlib
sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent))
from fieldranks.reports import (PrintReport, Report, WriteReport, decimal, input_digest, render, to_csv,
                                to_json)
from fieldranks.stages import Pipeline


def sample_report() -> Report:
    report = Report(command="ar", arguments={"mode": [3]}, digest=input_digest({"mode": [3]}, b"payload"))
    report.exact["modes"] = [{"mode": 3, "m": 4, "zero_count": "12"}]
    report.approx["ar.mode3"] = decimal(0.41503749927884376)
    report.annotations.append("a note")
    return report


def test_decimal_rendering():
    assert decimal(2.0) == "2"
    assert decimal(0.41503749927884376) == "0.415037499279"
    assert decimal(None) == "undefined"


def test_input_digest_is_stable():
    assert input_digest({"a": 1, "b": 2}, b"x") == input_digest({"b": 2, "a": 1}, b"x"), "argument order is irrelevant"
    assert input_digest({"a": 1}, b"x") != input_digest({"a": 1}, b"y")
    assert len(input_digest({})) == 64


def test_report_filename():
    report = sample_report()
    assert report.filename == f"ar-{report.digest[:12]}"


def test_reports_do_not_share_defaults():
    first, second = Report(command="a", arguments={}, digest="0"), Report(command="b", arguments={}, digest="1")
    first.exact["x"] = 1
    assert second.exact == {}


def test_json_round_trip():
    report = sample_report()
    decoded = msgspec.json.decode(to_json(report), type=Report)
    assert decoded == report
    assert render(report, "json") == to_json(report).decode("utf-8")


def test_exact_fields_ignore_timing_and_workers():
    first, second = sample_report(), sample_report()
    second.timing, second.workers = 12.5, 8
    assert first.exact_fields() == second.exact_fields()


def test_csv_rows():
    rows = list(csv.DictReader(io.StringIO(to_csv(sample_report()))))
    assert rows[0] == {"section": "report", "key": "command", "value": "ar"}
    keys = {(row["section"], row["key"]): row["value"] for row in rows}
    assert keys[("exact", "modes[0].zero_count")] == "12"
    assert keys[("approx", "ar.mode3")] == "0.415037499279"
    assert keys[("annotation", "")] == "a note"


def test_unknown_format():
    with pytest.raises(ValueError):
        render(sample_report(), "xml")


def test_print_and_write_stages(tmp_path):
    stream = io.StringIO()
    writer = WriteReport(str(tmp_path / "out"), fmt="csv")
    pipeline = Pipeline[Report, Report]([PrintReport(fmt="csv", stream=stream), writer])
    [report] = pipeline(sample_report())
    assert stream.getvalue().startswith("section,key,value")
    assert writer.written == [tmp_path / "out" / f"{report.filename}.csv"]
    assert writer.written[0].read_text(encoding="utf-8") == to_csv(report)
