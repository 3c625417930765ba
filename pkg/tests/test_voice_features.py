# tests/test_voice_features.py
import numpy as np
import pytest

from audio.audio_io import AudioClip
from core.errors import BadAlpha, BandEmpty, TooShort
from dsp.dsp_core import AnalysisConfig, frame_signal, stft
from features.voice_features import (
    FeatureSet,
    cepstrum_from_mel_energies,
    chroma,
    contrast_band_masks,
    extract_voice_features,
    harmonic_percussive,
    hnr,
    mfcc,
    pitch_per_frame,
    rms_energy,
    spectral_bandwidth,
    spectral_centroid,
    spectral_contrast,
    spectral_flatness,
    spectral_rolloff,
    zero_crossing_rate,
)

SR = 22050


def _tone(freq, n, sr=SR, amplitude=1.0):
    return amplitude * np.sin(2.0 * np.pi * freq * np.arange(n) / sr)


# ---------- pitch ----------
def test_pitch_of_220_hz_sine():
    f0 = pitch_per_frame(_tone(220.0, 2048), SR)
    assert SR / 101 <= f0 <= SR / 100


@pytest.mark.parametrize("freq", [62.0, 63.0, 75.5, 105.5])
def test_pitch_of_low_tones_lands_on_the_nearest_period(freq):
    f0 = pitch_per_frame(_tone(freq, 2048), SR)
    assert round(SR / f0) == round(SR / freq)


def test_pitch_of_pure_tones_stays_within_one_lag():
    misses = []
    for g in np.arange(60.0, 380.5, 0.5):
        f0 = pitch_per_frame(_tone(g, 2048), SR)
        if f0 is None or abs(f0 - g) > g * g / (SR - g):
            misses.append((float(g), f0))
    assert not misses


def test_pitch_of_noise_is_unvoiced():
    frame = np.random.default_rng(11).standard_normal(2048)
    assert pitch_per_frame(frame, SR) is None


def test_pitch_of_silence_is_unvoiced():
    assert pitch_per_frame(np.zeros(2048), SR) is None


# ---------- centroide, ancho de banda, rolloff ----------
# sr = 16000, N = 32: bins cada 500 Hz.
def test_centroid_and_bandwidth():
    single = np.zeros(17)
    single[2] = 4.0
    assert spectral_centroid(single, 16000, 32) == pytest.approx(1000.0)
    assert spectral_bandwidth(single, 1000.0, 16000, 32) == pytest.approx(0.0)

    pair = np.zeros(17)
    pair[[1, 3]] = 1.0
    c = spectral_centroid(pair, 16000, 32)
    assert c == pytest.approx(1000.0)
    assert spectral_bandwidth(pair, c, 16000, 32) == pytest.approx(500.0)


def test_centroid_of_silence_is_zero():
    assert spectral_centroid(np.zeros(17), 16000, 32) == 0.0


def test_bandwidth_matches_formula_on_noise():
    mag = np.abs(np.random.default_rng(4).standard_normal(1025))
    freqs = np.arange(1025) * SR / 2048
    c = float(np.sum(freqs * mag) / np.sum(mag))
    expected = np.sqrt(np.sum((freqs - c) ** 2 * mag) / np.sum(mag))
    assert spectral_bandwidth(mag, spectral_centroid(mag, SR, 2048), SR, 2048) == pytest.approx(expected, rel=1e-12)


def test_centroid_of_1khz_sine_within_one_bin(make_sine):
    spec = stft(make_sine(1000.0, 1.0))
    centroids = spectral_centroid(spec.magnitude, SR, 2048)
    assert abs(np.median(centroids) - 1000.0) <= SR / 2048


def test_rolloff():
    single = np.zeros(17)
    single[6] = 2.0
    for alpha in (0.1, 0.5, 0.85, 0.99):
        assert spectral_rolloff(single, alpha, 16000, 32) == pytest.approx(3000.0)
    # Magnitudes uniformes sobre K = 17 bins: bin ceil(0.85·17) − 1 = 14.
    assert spectral_rolloff(np.ones(17), 0.85, 16000, 32) == pytest.approx(14 * 500.0)


@pytest.mark.parametrize("alpha", [0.0, 1.0, 1.5])
def test_rolloff_bad_alpha(alpha):
    with pytest.raises(BadAlpha):
        spectral_rolloff(np.ones(17), alpha, 16000, 32)


# ---------- ZCR, RMS ----------
def test_zero_crossing_rate():
    assert zero_crossing_rate(np.full(64, 0.3)) == 0.0
    alternating = np.tile([1.0, -1.0], 32)
    assert zero_crossing_rate(alternating) == 1.0
    frame = _tone(100.0, 2048, sr=8000)
    assert zero_crossing_rate(frame) == pytest.approx(51 / 2047, abs=1.1 / 2047)


def test_rms():
    assert rms_energy(np.zeros(128)) == 0.0
    assert rms_energy(np.full(128, 0.5)) == pytest.approx(0.5)
    whole_cycles = 0.5 * np.sin(2.0 * np.pi * 10 * np.arange(2048) / 2048)
    assert rms_energy(whole_cycles) == pytest.approx(0.5 / np.sqrt(2.0), abs=1e-3)


def test_rms_over_frames_matrix():
    frames = np.stack([np.zeros(8), np.full(8, 2.0)])
    assert rms_energy(frames).tolist() == [0.0, 2.0]


# ---------- MFCC ----------
def test_cepstrum_of_constant_energies():
    c = cepstrum_from_mel_energies(np.full(26, np.e), 13)
    assert c[0] == pytest.approx(26.0)
    assert np.allclose(c[1:], 0.0, atol=1e-9)


def test_mfcc_of_zero_power_row():
    eps = 1e-10
    c = mfcc(np.zeros(1025), SR, 2048, epsilon=eps)
    assert c.shape == (13,)
    assert c[0] == pytest.approx(26 * np.log(eps))
    assert np.allclose(c[1:], 0.0, atol=1e-9)


def test_cepstrum_matches_direct_summation():
    energies = np.random.default_rng(8).uniform(0.1, 50.0, 26)
    m = np.arange(26)
    direct = np.array([np.sum(np.log(energies) * np.cos(np.pi * n / 26 * (m + 0.5))) for n in range(13)])
    assert np.allclose(cepstrum_from_mel_energies(energies, 13), direct, atol=1e-8)


# ---------- planitud ----------
def test_flatness():
    assert spectral_flatness(np.full(64, 3.0)) == pytest.approx(1.0, abs=1e-9)
    spiky = np.full(64, 1e-10)
    spiky[5] = 1e6
    assert spectral_flatness(spiky) < 1e-6


def test_flatness_matches_product_form():
    p = np.random.default_rng(9).uniform(0.5, 2.0, 8)
    expected = np.prod(p) ** (1 / 8) / np.mean(p)
    assert spectral_flatness(p) == pytest.approx(expected, abs=1e-9)


# ---------- contraste ----------
def test_contrast_flat_and_ratio():
    flat = np.ones(1025)
    assert np.allclose(spectral_contrast(flat, SR, 2048), 0.0)
    masks = contrast_band_masks(SR, 2048)
    ratio = np.ones(1025)
    ratio[np.flatnonzero(masks[0])[3]] = 10.0
    sc = spectral_contrast(ratio, SR, 2048)
    assert sc[0] == pytest.approx(10.0)
    assert np.allclose(sc[1:], 0.0)


def test_contrast_masks_partition_bins():
    masks = contrast_band_masks(SR, 2048)
    assert len(masks) == 6
    assert np.all(np.sum(masks, axis=0) <= 1)
    assert masks[-1][-1]


def test_contrast_tone_in_one_band():
    rng = np.random.default_rng(12)
    floor = np.abs(rng.normal(1.0, 0.05, 1025))
    # 1000 Hz cae en la banda [800, 1600).
    floor[int(round(1000 / (SR / 2048)))] = 1000.0
    sc = spectral_contrast(floor, SR, 2048)
    assert sc[2] > 20.0
    assert np.all(np.delete(sc, 2) < 5.0)


def test_contrast_needs_high_sample_rate():
    with pytest.raises(BandEmpty):
        contrast_band_masks(8000, 2048)


# ---------- croma ----------
@pytest.mark.parametrize("freq, pitch_class", [(440.0, 9), (261.63, 0)])
def test_chroma_argmax(make_sine, freq, pitch_class):
    spec = stft(make_sine(freq, 1.0))
    profile = chroma(spec.magnitude, SR, 2048).sum(axis=0)
    assert int(np.argmax(profile)) == pitch_class


def test_chroma_of_zero_row():
    assert np.all(chroma(np.zeros(1025), SR, 2048) == 0)


# ---------- HPSS / HNR ----------
def test_hnr(make_sine, make_noise, silence):
    assert hnr(make_sine(220.0, 1.0)) > 10.0
    assert hnr(make_noise(1.0, seed=3)) < 2.0
    assert hnr(silence) == 0.0


def test_harmonic_percussive_lengths(make_sine):
    clip = make_sine(220.0, 0.5)
    harmonic, percussive = harmonic_percussive(clip)
    spec = stft(clip)
    assert harmonic.size == percussive.size == (spec.n_frames - 1) * 512 + 2048


# ---------- rangos por trama ----------
def _range_signals():
    rng = np.random.default_rng(21)
    n = SR
    return {
        "ruido": rng.uniform(-1.0, 1.0, n),
        "grave": _tone(100.0, n),
        "agudo": _tone(3000.0, n, amplitude=0.3),
        "mezcla": _tone(220.0, n, amplitude=0.6) + 0.05 * rng.standard_normal(n),
        "cuadrada": np.sign(_tone(440.0, n)),
        "silencio": np.zeros(n),
    }


@pytest.mark.parametrize("name", sorted(_range_signals()))
def test_per_frame_values_stay_in_range(name):
    samples = _range_signals()[name]
    spec = stft(AudioClip(samples, SR))
    mag, power = spec.magnitude, spec.power
    frames = frame_signal(samples, 2048, 512)

    flatness = spectral_flatness(power)
    zcr = zero_crossing_rate(frames)
    rolloff = spectral_rolloff(mag, 0.85, SR, 2048)
    bandwidth = spectral_bandwidth(mag, spectral_centroid(mag, SR, 2048), SR, 2048)
    contrast = spectral_contrast(mag, SR, 2048)

    assert flatness.shape == zcr.shape == rolloff.shape == bandwidth.shape == (spec.n_frames,)
    assert contrast.shape == (spec.n_frames, 6)
    assert np.all((flatness >= 0.0) & (flatness <= 1.0))
    assert np.all((zcr >= 0.0) & (zcr <= 1.0))
    assert np.all((rolloff >= 0.0) & (rolloff <= SR / 2))
    assert np.all(bandwidth >= 0.0)
    assert np.all(contrast >= 0.0)


# ---------- extract_voice_features ----------
def test_features_of_sine(make_sine):
    fs = extract_voice_features(make_sine(220.0, 2.0))
    assert fs.f0[0] == pytest.approx(220.0, abs=3.0)
    assert fs.flatness[0] < 0.1
    assert fs.hnr[0] == fs.hnr[1]


def test_features_of_noise(make_noise):
    fs = extract_voice_features(make_noise(2.0, seed=1))
    assert fs.flatness[0] > 0.3
    assert fs.zcr[0] > 0.2


def test_features_of_silence():
    fs = extract_voice_features(AudioClip(np.zeros(2 * SR), SR))
    assert fs.f0 == (0.0, 0.0)
    assert fs.rms == (0.0, 0.0)
    assert fs.centroid == (0.0, 0.0)


def test_features_amplitude_scaling(voiced_clip):
    a = extract_voice_features(voiced_clip)
    b = extract_voice_features(AudioClip(voiced_clip.samples * 0.5, SR))
    for name in ("f0", "centroid", "bandwidth", "rolloff", "zcr", "flatness"):
        assert np.allclose(getattr(a, name), getattr(b, name), atol=1e-6), name
    assert np.allclose(a.contrast, b.contrast, atol=1e-6)
    assert np.argmax(a.chroma[0]) == np.argmax(b.chroma[0])
    assert b.rms[0] == pytest.approx(0.5 * a.rms[0])
    assert b.rms[1] == pytest.approx(0.5 * a.rms[1])


def test_features_too_short():
    with pytest.raises(TooShort):
        extract_voice_features(AudioClip(np.zeros(100), SR))


def test_feature_set_flat_dict_and_lengths():
    fs = FeatureSet.zeros()
    flat = fs.to_flat_dict()
    assert flat["f0_median"] == 0.0
    assert len(flat["mfcc_mean"]) == 13
    assert len(flat["contrast_median"]) == 6
    assert len(flat["chroma_mean"]) == 12
    assert len(flat) == 22
    with pytest.raises(ValueError):
        FeatureSet(**{**fs.model_dump(), "mfcc": ([0.0] * 12, [0.0] * 13)})


def test_small_frame_config(make_sine):
    fs = extract_voice_features(make_sine(440.0, 0.5), AnalysisConfig(frame_size=1024, hop=256))
    assert int(np.argmax(fs.chroma[0])) == 9
