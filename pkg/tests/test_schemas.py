"""
Unit tests for report schemas
"""

import json

from app.schemas import SCHEMA_VERSION, AssertionRecord, CommandReport


class TestAssertionRecord:

    def test_pass_alias(self):
        record = AssertionRecord(name="in_W", passed=True)
        assert record.model_dump(by_alias=True) == {"name": "in_W", "pass": True, "witness": None}

    def test_populate_by_alias(self):
        record = AssertionRecord.model_validate({"name": "x", "pass": False})
        assert record.passed is False


class TestCommandReport:

    def test_top_level_keys(self):
        report = CommandReport(command="dim", params={"N": 7}, results={"dimW": 8})
        assert set(report.to_dict()) == {"schema_version", "command", "params", "results", "assertions"}
        assert report.to_dict()["schema_version"] == SCHEMA_VERSION

    def test_timings_included_when_set(self):
        report = CommandReport(command="dim", timings={"build_W": 0.5})
        assert report.to_dict()["timings"] == {"build_W": 0.5}

    def test_add_and_all_passed(self):
        report = CommandReport(command="verify-t2")
        assert report.all_passed
        report.add("anomaly_as_expected", True, {"anomaly": 0})
        assert report.all_passed
        report.add("surjective", 0)
        assert not report.all_passed
        assert report.assertions[1].passed is False

    def test_json_sorted_and_aliased(self):
        report = CommandReport(command="dim", results={"b": 1, "a": 2})
        report.add("ok", True)
        text = report.to_json()
        payload = json.loads(text)
        assert payload["assertions"] == [{"name": "ok", "pass": True, "witness": None}]
        assert text.index('"a"') < text.index('"b"')

    def test_json_deterministic(self):
        def build():
            report = CommandReport(command="trace", params={"N": 14, "M": 7})
            report.add("trace_in_W", True)
            return report.to_json()
        assert build() == build()

    def test_compact_json(self):
        report = CommandReport(command="dim")
        assert "\n" not in report.to_json(indent=None)
