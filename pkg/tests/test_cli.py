# tests/test_cli.py
import json

import numpy as np
import pytest
from PIL import Image

from audio.audio_io import AudioClip, load_wav, save_wav
from main import run

SR = 22050


@pytest.fixture
def wav(tmp_path, voiced_clip):
    path = tmp_path / "a.wav"
    save_wav(voiced_clip, path)
    return path


def test_encode_decode_round_trip(tmp_path, wav):
    png = tmp_path / "a.png"
    out = tmp_path / "b.wav"
    assert run(["encode", str(wav), str(png)]) == 0
    with Image.open(png) as im:
        assert im.mode == "RGB"
        assert im.size == (512, 512)
    assert run(["decode", str(png), str(out)]) == 0

    original, decoded = load_wav(wav), load_wav(out)
    assert len(decoded) == len(original)
    assert decoded.sample_rate == original.sample_rate
    assert np.max(np.abs(decoded.samples - original.samples)) <= 1 / 255 + 1 / 32767


def test_encode_is_byte_identical(tmp_path, wav):
    assert run(["encode", str(wav), str(tmp_path / "1.png"), "--seed", "3"]) == 0
    assert run(["encode", str(wav), str(tmp_path / "2.png"), "--seed", "3"]) == 0
    assert (tmp_path / "1.png").read_bytes() == (tmp_path / "2.png").read_bytes()


def test_encode_too_long_is_data_error(tmp_path, capsys):
    path = tmp_path / "long.wav"
    save_wav(AudioClip(np.zeros(300000), SR), path)
    assert run(["encode", str(path), str(tmp_path / "long.png")]) == 2
    assert "CapacityExceeded" in capsys.readouterr().err
    assert not (tmp_path / "long.png").exists()


def test_decode_corrupted_header(tmp_path, wav, capsys):
    png = tmp_path / "a.png"
    assert run(["encode", str(wav), str(png)]) == 0
    with Image.open(png) as im:
        pixels = np.array(im)
    pixels[0, :4, 1] = ord("?")
    Image.fromarray(pixels).save(png)
    assert run(["decode", str(png), str(tmp_path / "x.wav")]) == 2
    assert "MalformedHeader" in capsys.readouterr().err


def test_features_json_on_silence(tmp_path, capsys):
    path = tmp_path / "silence.wav"
    save_wav(AudioClip(np.zeros(SR), SR), path)
    assert run(["features", str(path), "--json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["f0_median"] == 0
    assert len(payload["mfcc_median"]) == 13


def test_features_text_table(wav, capsys):
    assert run(["features", str(wav)]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0].split() == ["descriptor", "mediana", "media"]
    assert out[1].startswith("f0")
    assert any(line.startswith("chroma[11]") for line in out)


def test_features_too_short(tmp_path, capsys):
    path = tmp_path / "short.wav"
    save_wav(AudioClip(np.zeros(100), SR), path)
    assert run(["features", str(path)]) == 2
    assert "TooShort" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [[], ["bogus"], ["encode"], ["encode", "a.wav"], ["features", "a.wav", "--nope"], ["eval", "--manifest", "m.csv", "--model", "x", "--report", "xml"]],
)
def test_usage_errors(argv, capsys):
    assert run(argv) == 1
    assert "usage" in capsys.readouterr().err


def test_help_exits_cleanly(capsys):
    assert run(["--help"]) == 0
    assert "encode" in capsys.readouterr().out


def test_wave_codec_and_planes(tmp_path, wav):
    gray = tmp_path / "wave.png"
    out = tmp_path / "wave.wav"
    assert run(["wave-encode", str(wav), str(gray)]) == 0
    with Image.open(gray) as im:
        assert im.mode == "L"
        assert im.size[0] == im.size[1] == 149
    assert run(["wave-decode", str(gray), str(out)]) == 0
    assert np.max(np.abs(load_wav(out).samples - load_wav(wav).samples)) <= 1 / 255 + 1 / 32767

    rgb = tmp_path / "rgb.png"
    assert run(["encode", str(wav), str(rgb)]) == 0
    assert run(["planes", str(rgb), str(tmp_path / "planes")]) == 0
    for name in ("red", "green", "blue"):
        with Image.open(tmp_path / "planes" / f"{name}.png") as im:
            assert im.mode == "L"
    # El plano verde es por sí solo una imagen de forma de onda válida.
    assert run(["wave-decode", str(tmp_path / "planes" / "green.png"), str(tmp_path / "g.wav")]) == 0
    assert len(load_wav(tmp_path / "g.wav")) == len(load_wav(wav))


def test_dataset_train_eval_predict(tmp_path, capsys):
    data = tmp_path / "data"
    manifest = data / "manifest.csv"
    assert run(["dataset", "--out", str(data), "--per-speaker", "3", "--seed", "5"]) == 0
    assert len(manifest.read_text(encoding="utf-8").splitlines()) == 7

    model_a, model_b = tmp_path / "a.bin", tmp_path / "b.bin"
    train_args = ["--manifest", str(manifest), "--split", "0.67", "--epochs", "30", "--seed", "2"]
    assert run(["train", *train_args, "--model", str(model_a)]) == 0
    assert run(["train", *train_args, "--model", str(model_b)]) == 0
    assert model_a.read_bytes() == model_b.read_bytes()

    capsys.readouterr()
    assert run(["eval", "--manifest", str(manifest), "--model", str(model_a), "--report", "json"]) == 0
    first = capsys.readouterr().out
    assert run(["eval", "--manifest", str(manifest), "--model", str(model_b), "--report", "json"]) == 0
    assert capsys.readouterr().out == first
    metrics = json.loads(first)
    assert metrics["class_names"] == ["alto", "bass"]
    assert sum(map(sum, metrics["confusion"])) == 2

    assert run(["eval", "--manifest", str(manifest), "--model", str(model_a)]) == 0
    assert "precision" in capsys.readouterr().out

    assert run(["predict", "--model", str(model_a), str(data / "bass" / "0.png")]) == 0
    prediction = json.loads(capsys.readouterr().out)
    assert prediction["label"] in ("alto", "bass")
    assert sum(prediction["probabilities"].values()) == pytest.approx(1.0)


def test_train_on_single_class_is_data_error(tmp_path, capsys):
    manifest = tmp_path / "m.csv"
    image = np.zeros((512, 512, 3), dtype=np.uint8)
    for i in range(2):
        Image.fromarray(image).save(tmp_path / f"{i}.png")
    manifest.write_text("path,label,seed\n0.png,alto,0\n1.png,alto,1\n", encoding="utf-8")
    assert run(["train", "--manifest", str(manifest), "--model", str(tmp_path / "m.bin"), "--split", "1.0"]) == 2
    assert "DegenerateDataset" in capsys.readouterr().err
