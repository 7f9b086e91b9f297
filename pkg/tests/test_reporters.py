"""Tests for CSV, JSON and console output."""

import io
import json
from fractions import Fraction

import pandas as pd
import pytest

from catalan_functionals.errors import ArgumentError
from catalan_functionals.exact_moments import centered_moments, raw_moments
from catalan_functionals.limit_law import limit_law
from catalan_functionals.montecarlo import run_experiment
from catalan_functionals.numeric import make_field
from catalan_functionals.reporters import (constant_frame, experiment_document, experiment_human,
                                           experiment_to_json, fmt, histogram_frame, limit_frame,
                                           table_document, table_frame, table_from_json, table_to_json, to_csv,
                                           to_human, validate_document)
from catalan_functionals.series_constants import c0_constant
from catalan_functionals.tolls import parse_toll
from catalan_functionals.types import ExperimentSpec


@pytest.fixture(scope="module")
def report():
    return run_experiment(ExperimentSpec(parse_toll("pow:1"), n=15, samples=600, seed=9, K=3))


class TestFormatting:
    def test_numbers(self):
        assert fmt(Fraction(29, 5)) == "29/5"
        assert fmt(Fraction(6)) == "6"
        assert fmt(0.25) == "0.25"


class TestMomentTableJson:
    def test_rational_round_trip(self):
        table = raw_moments(parse_toll("pow:1", field="rational"), 8, 3, make_field("rational"))
        back = table_from_json(table_to_json(table))
        assert back.values == table.values
        assert back.weights == table.weights
        assert back.toll.label == "pow:1"
        assert back.field == "rational" and back.prec is None

    def test_double_round_trip(self):
        table = raw_moments(parse_toll("log"), 12, 2, make_field("float", 53))
        back = table_from_json(table_to_json(table))
        assert back.values == table.values

    def test_linear_centering_kept(self):
        table = centered_moments(parse_toll("pow:1", field="rational"), Fraction(1, 3), 5, 2, make_field("rational"))
        document = json.loads(table_to_json(table))
        assert document["centering"] == {"kind": "linear", "c0": "1/3", "profile": None}
        assert table_from_json(json.dumps(document)).centering.c0 == Fraction(1, 3)

    def test_values_are_row_major(self):
        table = raw_moments(parse_toll("pow:1", field="rational"), 3, 2, make_field("rational"))
        document = table_document(table)
        assert document["values"][0] == ["1", "0", "0"]
        assert document["values"][3] == ["1", "29/5", "169/5"]

    def test_rejects_bad_documents(self):
        table = raw_moments(parse_toll("pow:1", field="rational"), 4, 2, make_field("rational"))
        document = table_document(table)
        with pytest.raises(ArgumentError):
            table_from_json("{not json")
        missing = {k: v for k, v in document.items() if k != "K"}
        with pytest.raises(ArgumentError):
            table_from_json(json.dumps(missing))
        short = dict(document, values=document["values"][:-1])
        with pytest.raises(ArgumentError):
            table_from_json(json.dumps(short))
        ragged = dict(document, values=document["values"][:-1] + [document["values"][-1][:-1]])
        with pytest.raises(ArgumentError):
            table_from_json(json.dumps(ragged))
        bad_value = dict(document, values=[["x", "0", "0"]] + document["values"][1:])
        with pytest.raises(ArgumentError):
            validate_document(bad_value, "moment_table.schema.json")


class TestFrames:
    def test_table_csv_long_format(self):
        table = raw_moments(parse_toll("pow:1", field="rational"), 3, 2, make_field("rational"))
        lines = to_csv(table_frame(table)).splitlines()
        assert lines[0] == "n,k,value"
        assert len(lines) == 1 + 4 * 3
        assert lines[1:4] == ["0,0,1", "0,1,0", "0,2,0"]
        assert lines[11] == "3,1,29/5"
        assert lines[12] == "3,2,169/5"

    def test_limit_frame(self):
        frame = limit_frame(limit_law(1, 3))
        assert list(frame.columns) == ["k", "C_k", "EY^k", "E(Y-EY)^k"]
        assert len(frame) == 3

    def test_constant_frame(self):
        frame = constant_frame(c0_constant(parse_toll("log")))
        assert frame.loc[0, "name"] == "C0"
        assert frame.loc[0, "toll"] == "log"

    def test_csv_file(self, tmp_path):
        path = tmp_path / "rows.csv"
        to_csv(pd.DataFrame({"a": [1, 2]}), path=str(path))
        assert path.read_text(encoding="utf-8") == "a\n1\n2\n"

    def test_human_output(self):
        stream = io.StringIO()
        to_human(pd.DataFrame({"k": [1], "value": ["2.5"]}), title="Sample table", summary=["one line"],
                 stream=stream)
        text = stream.getvalue()
        assert "Sample table" in text and "one line" in text and "2.5" in text


class TestExperimentReport:
    def test_json_validates(self, report):
        document = json.loads(experiment_to_json(report))
        assert document["spec"]["n"] == 15
        assert [row["k"] for row in document["raw"]] == [1, 2, 3]
        assert document["counts"]["checked"] == 3
        assert len(document["histogram"]) == 40

    def test_histogram_csv(self, report, tmp_path):
        path = tmp_path / "hist.csv"
        to_csv(histogram_frame(report), path=str(path))
        frame = pd.read_csv(path)
        assert list(frame.columns) == ["bin_left", "bin_right", "count"]
        assert frame["count"].sum() <= 600

    def test_document_rejects_missing_spec(self, report):
        document = experiment_document(report)
        del document["spec"]
        with pytest.raises(ArgumentError):
            validate_document(document, "experiment_report.schema.json")

    def test_human(self, report):
        stream = io.StringIO()
        experiment_human(report, stream=stream)
        text = stream.getvalue()
        assert "Monte Carlo experiment" in text
        assert "Raw moments" in text
