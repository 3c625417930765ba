# tests/test_audio_io.py
import numpy as np
import pytest
import soundfile as sf

from audio.audio_io import AudioClip, load_wav, save_wav, to_pcm16
from core.errors import BadParameter, EmptyAudio, IoFailure, NotWav, UnsupportedEncoding


def _write_pcm(path, frames, sr=22050):
    sf.write(str(path), np.asarray(frames, dtype=np.int16), sr, subtype="PCM_16", format="WAV")


def test_load_max_positive_sample(tmp_path):
    path = tmp_path / "max.wav"
    _write_pcm(path, [32767])
    clip = load_wav(path)
    assert clip.sample_rate == 22050
    assert clip.samples.tolist() == [32767 / 32768]


def test_load_min_sample_is_minus_one(tmp_path):
    path = tmp_path / "min.wav"
    _write_pcm(path, [-32768])
    assert load_wav(path).samples.tolist() == [-1.0]


def test_stereo_is_averaged_to_mono(tmp_path):
    path = tmp_path / "stereo.wav"
    _write_pcm(path, [[16384, -16384], [16384, 16384]])
    clip = load_wav(path)
    assert clip.samples.tolist() == [0.0, 0.5]


def test_save_clamps_full_scale(tmp_path):
    path = tmp_path / "out.wav"
    save_wav(AudioClip(np.array([1.0, 0.0, -1.0]), 22050), path)
    data, sr = sf.read(str(path), dtype="int16")
    assert sr == 22050
    assert data.tolist() == [32767, 0, -32768]
    assert sf.info(str(path)).subtype == "PCM_16"


def test_save_load_round_trip_error_bound(tmp_path):
    rng = np.random.default_rng(3)
    clip = AudioClip(rng.uniform(-1.0, 1.0, 5000), 16000)
    path = tmp_path / "rt.wav"
    save_wav(clip, path)
    back = load_wav(path)
    assert back.sample_rate == 16000
    assert len(back) == len(clip)
    assert np.max(np.abs(back.samples - clip.samples)) <= 1 / 32767


def test_to_pcm16_extremes():
    assert to_pcm16(np.array([1.0, -1.0, 0.5])).tolist() == [32767, -32768, 16384]


def test_not_wav(tmp_path):
    path = tmp_path / "x.wav"
    path.write_bytes(b"not a riff file at all")
    with pytest.raises(NotWav):
        load_wav(path)


def test_float_wav_is_unsupported(tmp_path):
    path = tmp_path / "float.wav"
    sf.write(str(path), np.zeros(100, dtype=np.float32), 22050, subtype="FLOAT", format="WAV")
    with pytest.raises(UnsupportedEncoding):
        load_wav(path)


def test_missing_file(tmp_path):
    with pytest.raises(IoFailure):
        load_wav(tmp_path / "nope.wav")


def test_clip_invariants():
    with pytest.raises(EmptyAudio):
        AudioClip(np.array([]), 22050)
    with pytest.raises(BadParameter):
        AudioClip(np.zeros(10), 4000)
    clip = AudioClip(np.array([2.0, -3.0, 0.25]), 8000)
    assert clip.samples.tolist() == [1.0, -1.0, 0.25]
    assert not clip.samples.flags.writeable
    assert clip.duration == pytest.approx(3 / 8000)
