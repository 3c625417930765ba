# tests/test_metrics.py
import json

import pytest

from classifier.metrics import compute_metrics, format_report, metrics_from_confusion

NAMES = ["alto", "bass"]


def test_reconstructed_report_table():
    m = metrics_from_confusion([[48, 0], [2, 46]], NAMES)
    assert m.accuracy == pytest.approx(94 / 96)
    alto, bass = m.per_class
    assert alto.precision == pytest.approx(0.96)
    assert alto.recall == pytest.approx(1.0)
    assert bass.precision == pytest.approx(1.0)
    assert bass.recall == pytest.approx(46 / 48)
    assert round(alto.f1, 2) == 0.98
    assert round(bass.f1, 2) == 0.98
    assert (alto.support, bass.support) == (48, 48)
    assert m.weighted_avg.f1 == pytest.approx((48 * alto.f1 + 48 * bass.f1) / 96)
    assert m.macro_avg.precision == pytest.approx(0.98)


def test_report_layout():
    report = format_report(metrics_from_confusion([[48, 0], [2, 46]], NAMES))
    lines = report.splitlines()
    assert lines[0].split() == ["precision", "recall", "f1-score", "support"]
    assert lines[2].split() == ["alto", "0.96", "1.00", "0.98", "48"]
    assert lines[3].split() == ["bass", "1.00", "0.96", "0.98", "48"]
    assert lines[5].split() == ["accuracy", "0.98", "96"]
    assert lines[6].split() == ["macro", "avg", "0.98", "0.98", "0.98", "96"]
    assert lines[7].split() == ["weighted", "avg", "0.98", "0.98", "0.98", "96"]


def test_perfect_predictions():
    m = compute_metrics([0, 1, 1, 0], [0, 1, 1, 0], NAMES)
    assert m.confusion == [[2, 0], [0, 2]]
    assert m.accuracy == 1.0
    assert all(r.f1 == 1.0 for r in m.per_class)


def test_constant_predictor():
    m = compute_metrics([0, 0, 1, 1], [0, 0, 0, 0], NAMES)
    assert m.accuracy == 0.5
    assert m.per_class[1].recall == 0.0
    assert m.per_class[1].precision == 0.0
    assert m.per_class[1].f1 == 0.0
    assert sum(map(sum, m.confusion)) == m.total == 4


def test_json_serialization():
    payload = json.loads(metrics_from_confusion([[3, 1], [0, 4]], NAMES).to_json())
    assert payload["accuracy"] == pytest.approx(7 / 8)
    assert payload["confusion"] == [[3, 1], [0, 4]]
    assert payload["per_class"][0]["name"] == "alto"
    assert set(payload) >= {"macro_avg", "weighted_avg", "class_names"}


def test_confusion_rows_are_true_classes():
    m = compute_metrics([0, 0, 0, 1], [0, 1, 1, 1], NAMES)
    assert m.confusion == [[1, 2], [0, 1]]
    assert m.per_class[0].recall == pytest.approx(1 / 3)
    assert m.per_class[1].precision == pytest.approx(1 / 3)


def test_class_missing_from_both_sides_counts_as_zero():
    m = compute_metrics([0, 0, 1], [0, 0, 1], ["alto", "bass", "tenor"])
    tenor = m.per_class[2]
    assert (tenor.precision, tenor.recall, tenor.f1, tenor.support) == (0.0, 0.0, 0.0, 0)
    assert m.confusion[2] == [0, 0, 0]
    assert m.macro_avg.f1 == pytest.approx(2 / 3)
    assert m.weighted_avg.f1 == pytest.approx(1.0)


def test_confusion_and_label_lists_agree():
    from_pairs = compute_metrics([0, 0, 1, 1, 1], [0, 1, 1, 1, 0], NAMES)
    from_matrix = metrics_from_confusion([[1, 1], [1, 2]], NAMES)
    assert from_pairs == from_matrix
