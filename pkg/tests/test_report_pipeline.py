"""Unit tests for the report pipeline"""
import json

import pytest

from src.report_pipeline import ReportPipeline, flatten_record, report_pipeline


class TestReportPipeline:
    """Test rendering, loading and comparison of result records"""

    def setup_method(self):
        self.pipeline = ReportPipeline()
        self.records = [
            {"n": 2, "ok": True, "value": [0.1, -0.2], "extra": {"gamma": 0.5}},
            {"n": 3, "ok": False, "value": [1.0, 0.0], "extra": {"gamma": 0.25}},
        ]

    def test_flatten_splits_complex_pairs(self):
        flat = flatten_record(self.records[0])
        assert flat["value_re"] == 0.1
        assert flat["value_im"] == -0.2
        assert flat["extra.gamma"] == 0.5

    def test_flatten_keeps_other_lists_as_json(self):
        flat = flatten_record({"zs": [0.5, 1.0, 2.0]})
        assert json.loads(flat["zs"]) == [0.5, 1.0, 2.0]

    def test_json_lines_round_trip_floats(self):
        text = self.pipeline.render([{"x": 0.1 + 0.2}], "json")
        assert text.endswith("\n")
        assert json.loads(text)["x"] == 0.1 + 0.2

    def test_json_is_deterministic(self):
        a = self.pipeline.render(self.records, "json")
        b = self.pipeline.render([dict(reversed(list(r.items()))) for r in self.records], "json")
        assert a == b
        assert len(a.splitlines()) == 2

    def test_csv_columns(self):
        text = self.pipeline.render(self.records, "csv")
        header = text.splitlines()[0].split(",")
        assert header == sorted(header)
        assert "value_re" in header
        assert len(text.splitlines()) == 3

    def test_human(self):
        text = self.pipeline.render(self.records, "human")
        assert "value_im" in text

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            self.pipeline.render(self.records, "xml")

    def test_write_to_file(self, tmp_path):
        path = tmp_path / "out.json"
        self.pipeline.write(self.records, "json", str(path))
        lines = path.read_text().splitlines()
        assert json.loads(lines[1])["n"] == 3

    def test_write_to_stdout(self, capsys):
        self.pipeline.write(self.records[:1], "json")
        assert json.loads(capsys.readouterr().out)["n"] == 2

    def test_load_single_json_document(self, tmp_path):
        path = tmp_path / "report.json"
        path.write_text(json.dumps(self.records, indent=2))
        assert self.pipeline.load_report(str(path)) == self.records

    def test_matches_saved_json_lines(self, tmp_path):
        path = str(tmp_path / "report.jsonl")
        self.pipeline.write(self.records, "json", path)
        assert self.pipeline.matches_report(self.records, path)
        changed = [dict(self.records[0], ok=False), self.records[1]]
        assert not self.pipeline.matches_report(changed, path)
        assert not self.pipeline.matches_report(self.records[:1], path)

    def test_matches_saved_csv(self, tmp_path):
        path = str(tmp_path / "report.csv")
        self.pipeline.write(self.records, "csv", path)
        assert self.pipeline.matches_report(self.records, path)
        changed = [self.records[0], dict(self.records[1], value=[1.0, 1e-9])]
        assert not self.pipeline.matches_report(changed, path)

    def test_load_json_lines_file(self, tmp_path):
        path = tmp_path / "report.json"
        path.write_text(self.pipeline.render(self.records, "json"))
        assert self.pipeline.load_report(str(path)) == self.records

    def test_load_csv(self, tmp_path):
        path = tmp_path / "report.csv"
        path.write_text(self.pipeline.render(self.records, "csv"))
        rows = self.pipeline.load_report(str(path))
        assert rows[0]["value_re"] == 0.1

    def test_load_unsupported(self):
        with pytest.raises(ValueError):
            self.pipeline.load_report("report.parquet")


def test_global_instance():
    assert isinstance(report_pipeline, ReportPipeline)
