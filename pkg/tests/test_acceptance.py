# tests/test_acceptance.py
"""Experimento completo de dos locutores (2x100 huellas). Tarda unos minutos."""
import json
import os

import pytest

from main import run

pytestmark = pytest.mark.skipif(
    os.getenv("AUDIOFP_RUN_SLOW") != "1", reason="experimento largo; usar AUDIOFP_RUN_SLOW=1"
)


@pytest.mark.slow
def test_two_speaker_pipeline_is_accurate_and_reproducible(tmp_path, capsys):
    runs = []
    for name in ("first", "second"):
        data = tmp_path / name / "data"
        model = tmp_path / name / "model.bin"
        assert run(["dataset", "--out", str(data), "--per-speaker", "100", "--seed", "2024", "--workers", "4"]) == 0
        assert run(["train", "--manifest", str(data / "manifest.csv"), "--model", str(model), "--seed", "2024"]) == 0
        capsys.readouterr()
        assert run(["eval", "--manifest", str(data / "manifest.csv"), "--model", str(model), "--report", "json"]) == 0
        runs.append((data, model, capsys.readouterr().out))

    (data_a, model_a, metrics_a), (data_b, model_b, metrics_b) = runs
    assert metrics_a == metrics_b
    assert model_a.read_bytes() == model_b.read_bytes()
    assert (data_a / "manifest.csv").read_bytes() == (data_b / "manifest.csv").read_bytes()
    for png in sorted(data_a.rglob("*.png")):
        assert png.read_bytes() == (data_b / png.relative_to(data_a)).read_bytes()

    metrics = json.loads(metrics_a)
    assert sum(map(sum, metrics["confusion"])) == 20
    assert metrics["accuracy"] >= 0.90
