# src/features/voice_features.py
"""
Las once familias de descriptores de voz, calculadas por trama y agregadas a (mediana, media).

Las funciones espectrales aceptan una fila de magnitudes/potencias (K,) o una matriz
(T, K) y operan sobre el último eje; con una fila devuelven un escalar.
"""
import logging
import math
from functools import lru_cache
from typing import Dict, List, Optional, Tuple, Union

import librosa
import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator
from scipy.fft import dct

from audio.audio_io import AudioClip
from config.settings import analysis_settings
from core.errors import BadAlpha, BandEmpty, TooShort
from dsp.dsp_core import (
    AnalysisConfig,
    autocorrelation,
    bin_frequencies,
    frame_signal,
    istft,
    median_and_mean,
    median_and_mean_columns,
    median_filter_2d,
    stft,
)

logger = logging.getLogger(__name__)

CONTRAST_EDGES_HZ = (200.0, 400.0, 800.0, 1600.0, 3200.0, 6400.0)
N_CONTRAST_BANDS = len(CONTRAST_EDGES_HZ)
N_CHROMA = 12
# Lags revisados alrededor del máximo crudo al afinar el periodo.
PITCH_REFINE_BEFORE = 2
PITCH_REFINE_AFTER = 6
PITCH_CLASSES = ("C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B")

ArrayOrFloat = Union[np.ndarray, float]

ScalarStat = Tuple[float, float]
VectorStat = Tuple[List[float], List[float]]


def _out(values: np.ndarray) -> ArrayOrFloat:
    return float(values) if np.ndim(values) == 0 else values


# =========================
# Descriptores por trama
# =========================
def _refine_lag(x: np.ndarray, tau: int, lag_min: int, lag_max: int) -> int:
    """
    Máximo local de la correlación normalizada por energía
    r[τ] / sqrt(Σ x[n]² · Σ x[n+τ]²) cerca de tau. El factor (N−τ) de la
    autocorrelación cruda desplaza su máximo hacia lags cortos en tonos graves.
    """
    n = x.size
    best, best_score = tau, -np.inf
    for lag in range(max(lag_min, tau - PITCH_REFINE_BEFORE), min(lag_max, tau + PITCH_REFINE_AFTER) + 1):
        head, tail = x[: n - lag], x[lag:]
        energy = math.sqrt(float(np.dot(head, head)) * float(np.dot(tail, tail)))
        if energy <= 0.0:
            continue
        score = float(np.dot(head, tail)) / energy
        if score > best_score:
            best, best_score = lag, score
    return best


def pitch_per_frame(
    frame,
    sr: int,
    fmin: Optional[float] = None,
    fmax: Optional[float] = None,
    threshold: Optional[float] = None,
) -> Optional[float]:
    """
    f0 = sr / τ_peak, con τ_peak el máximo de la autocorrelación en la banda de pitch.
    Devuelve None (trama sorda) si r[τ_peak]/r[0] < threshold; en tramas sonoras
    τ_peak se afina con la correlación normalizada en un entorno de pocos lags.
    """
    fmin = analysis_settings.pitch_fmin if fmin is None else fmin
    fmax = analysis_settings.pitch_fmax if fmax is None else fmax
    threshold = analysis_settings.voicing_threshold if threshold is None else threshold

    r = autocorrelation(frame)
    if r[0] <= 0.0:
        return None

    lag_min = max(1, math.ceil(sr / fmax))
    lag_max = min(r.size - 1, math.floor(sr / fmin))
    if lag_min > lag_max:
        return None

    band = r[lag_min: lag_max + 1]
    tau_peak = lag_min + int(np.argmax(band))
    if r[tau_peak] / r[0] < threshold:
        return None
    x = np.asarray(frame, dtype=np.float64).reshape(-1)
    return sr / _refine_lag(x, tau_peak, lag_min, lag_max)


def spectral_centroid(mag_row, sr: int, frame_size: int, epsilon: float = 1e-10) -> ArrayOrFloat:
    """C = Σ f·|X(f)| / Σ |X(f)|; 0 si no hay energía."""
    mag = np.asarray(mag_row, dtype=np.float64)
    freqs = bin_frequencies(sr, frame_size)
    total = mag.sum(axis=-1)
    weighted = (mag * freqs).sum(axis=-1)
    silent = total <= epsilon
    centroid = np.where(silent, 0.0, weighted / np.where(silent, 1.0, total))
    return _out(centroid)


def spectral_bandwidth(mag_row, centroid, sr: int, frame_size: int, epsilon: float = 1e-10) -> ArrayOrFloat:
    """Desviación estándar de la frecuencia ponderada por magnitud alrededor del centroide."""
    mag = np.asarray(mag_row, dtype=np.float64)
    freqs = bin_frequencies(sr, frame_size)
    centroid = np.asarray(centroid, dtype=np.float64)
    total = mag.sum(axis=-1)
    spread = (((freqs - centroid[..., None]) ** 2) * mag).sum(axis=-1)
    silent = total <= epsilon
    bandwidth = np.sqrt(np.where(silent, 0.0, spread / np.where(silent, 1.0, total)))
    return _out(bandwidth)


def spectral_rolloff(mag_row, alpha: Optional[float], sr: int, frame_size: int) -> ArrayOrFloat:
    """Frecuencia del menor bin cuya suma acumulada de magnitud alcanza alpha·total."""
    alpha = analysis_settings.rolloff_alpha if alpha is None else alpha
    if not 0.0 < alpha < 1.0:
        raise BadAlpha(f"alpha debe estar en (0, 1) (recibido {alpha})")

    mag = np.asarray(mag_row, dtype=np.float64)
    freqs = bin_frequencies(sr, frame_size)
    cumulative = np.cumsum(mag, axis=-1)
    total = cumulative[..., -1]
    k_r = np.argmax(cumulative >= alpha * total[..., None], axis=-1)
    rolloff = np.where(total > 0.0, freqs[k_r], 0.0)
    return _out(rolloff)


def zero_crossing_rate(frame) -> ArrayOrFloat:
    """Cruces estrictos de signo divididos por (N − 1)."""
    x = np.asarray(frame, dtype=np.float64)
    if x.shape[-1] < 2:
        raise TooShort("La ZCR requiere al menos 2 muestras")
    crossings = np.count_nonzero(x[..., 1:] * x[..., :-1] < 0.0, axis=-1)
    return _out(crossings / (x.shape[-1] - 1))


@lru_cache(maxsize=16)
def mel_filterbank(sr: int, frame_size: int, n_mels: int) -> np.ndarray:
    """Banco triangular en escala mel HTK, de 0 a sr/2, sin normalización de área."""
    fb = librosa.filters.mel(
        sr=sr,
        n_fft=frame_size,
        n_mels=n_mels,
        fmin=0.0,
        fmax=sr / 2.0,
        htk=True,
        norm=None,
        dtype=np.float64,
    )
    fb.setflags(write=False)
    return fb


def cepstrum_from_mel_energies(energies, n_coeffs: int, epsilon: float = 1e-10) -> np.ndarray:
    """C_n = Σ_m log(E_m)·cos(πn/M·(m + 1/2)), n = 0..n_coeffs−1."""
    log_e = np.log(np.maximum(np.asarray(energies, dtype=np.float64), epsilon))
    # La DCT-II de scipy sin normalizar vale el doble de la suma.
    return dct(log_e, type=2, axis=-1)[..., :n_coeffs] / 2.0


def mfcc(
    power_row,
    sr: int,
    frame_size: int,
    n_mels: Optional[int] = None,
    n_coeffs: Optional[int] = None,
    epsilon: float = 1e-10,
) -> np.ndarray:
    n_mels = analysis_settings.n_mels if n_mels is None else n_mels
    n_coeffs = analysis_settings.n_mfcc if n_coeffs is None else n_coeffs
    energies = np.asarray(power_row, dtype=np.float64) @ mel_filterbank(sr, frame_size, n_mels).T
    return cepstrum_from_mel_energies(energies, n_coeffs, epsilon)


def rms_energy(frame) -> ArrayOrFloat:
    x = np.asarray(frame, dtype=np.float64)
    return _out(np.sqrt(np.mean(x ** 2, axis=-1)))


def spectral_flatness(power_row, epsilon: float = 1e-10) -> ArrayOrFloat:
    """Media geométrica / media aritmética del espectro de potencia, en dominio logarítmico."""
    power = np.maximum(np.asarray(power_row, dtype=np.float64), epsilon)
    geometric = np.exp(np.mean(np.log(power), axis=-1))
    arithmetic = np.mean(power, axis=-1)
    return _out(np.clip(geometric / arithmetic, 0.0, 1.0))


def contrast_band_masks(sr: int, frame_size: int) -> List[np.ndarray]:
    """Máscaras de bins para las 6 bandas de octava desde 200 Hz; la última incluye sr/2."""
    freqs = bin_frequencies(sr, frame_size)
    nyquist = sr / 2.0
    if nyquist < CONTRAST_EDGES_HZ[-1]:
        raise BandEmpty(f"sr={sr} es demasiado bajo para las bandas de contraste (se requiere >= 12800)")

    edges = list(CONTRAST_EDGES_HZ) + [nyquist]
    masks = []
    for b in range(N_CONTRAST_BANDS):
        lo, hi = edges[b], edges[b + 1]
        last = b == N_CONTRAST_BANDS - 1
        mask = (freqs >= lo) & ((freqs <= hi) if last else (freqs < hi))
        if not mask.any():
            raise BandEmpty(f"La banda [{lo:.0f}, {hi:.0f}) Hz no contiene bins")
        masks.append(mask)
    return masks


def spectral_contrast(mag_row, sr: int, frame_size: int, epsilon: float = 1e-10) -> np.ndarray:
    """SC(b) = 10·log10(P_max(b) / P_min(b)) con P_min acotado inferiormente por epsilon."""
    mag = np.asarray(mag_row, dtype=np.float64)
    bands = []
    for mask in contrast_band_masks(sr, frame_size):
        band = mag[..., mask]
        p_max = np.maximum(band.max(axis=-1), epsilon)
        p_min = np.maximum(band.min(axis=-1), epsilon)
        bands.append(10.0 * np.log10(p_max / p_min))
    return np.stack(bands, axis=-1)


@lru_cache(maxsize=16)
def chroma_assignment(sr: int, frame_size: int) -> np.ndarray:
    """Matriz (K, 12): bin k -> clase (round(12·log2(f_k/440)) + 9) mod 12; el bin DC no cuenta."""
    freqs = bin_frequencies(sr, frame_size)
    assignment = np.zeros((freqs.size, N_CHROMA))
    classes = (np.round(12.0 * np.log2(freqs[1:] / 440.0)).astype(int) + 9) % N_CHROMA
    assignment[np.arange(1, freqs.size), classes] = 1.0
    assignment.setflags(write=False)
    return assignment


def chroma(mag_row, sr: int, frame_size: int) -> np.ndarray:
    """Suma de magnitudes por clase de altura (0 = C, 9 = A)."""
    return np.asarray(mag_row, dtype=np.float64) @ chroma_assignment(sr, frame_size)


def harmonic_percussive(
    clip: AudioClip,
    cfg: Optional[AnalysisConfig] = None,
    kernel: Optional[int] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Separación armónico/percusiva por filtros de mediana y máscaras suaves.
    Devuelve las dos componentes resintetizadas con istft.
    """
    cfg = cfg or AnalysisConfig.from_settings()
    kernel = analysis_settings.hpss_kernel if kernel is None else kernel
    spec = stft(clip, cfg)
    mag = spec.magnitude

    harmonic_mag = median_filter_2d(mag, "time", kernel)
    percussive_mag = median_filter_2d(mag, "frequency", kernel)
    h2, p2 = harmonic_mag ** 2, percussive_mag ** 2
    denom = h2 + p2 + cfg.epsilon
    harmonic = istft(spec.with_mask(h2 / denom), cfg)
    percussive = istft(spec.with_mask(p2 / denom), cfg)
    return harmonic, percussive


def hnr(clip: AudioClip, cfg: Optional[AnalysisConfig] = None) -> float:
    """RMS(armónica) / (RMS(percusiva) + epsilon), a nivel de clip."""
    cfg = cfg or AnalysisConfig.from_settings()
    harmonic, percussive = harmonic_percussive(clip, cfg)
    return float(rms_energy(harmonic) / (rms_energy(percussive) + cfg.epsilon))


# =========================
# FeatureSet
# =========================
SCALAR_FAMILIES = ("f0", "centroid", "bandwidth", "rolloff", "zcr", "rms", "hnr", "flatness")
VECTOR_LENGTHS = {"mfcc": 13, "contrast": N_CONTRAST_BANDS, "chroma": N_CHROMA}


class FeatureSet(BaseModel):
    """Huella estadística completa: (mediana, media) por familia."""

    model_config = ConfigDict(frozen=True)

    f0: ScalarStat
    centroid: ScalarStat
    bandwidth: ScalarStat
    rolloff: ScalarStat
    zcr: ScalarStat
    mfcc: VectorStat
    rms: ScalarStat
    hnr: ScalarStat
    flatness: ScalarStat
    contrast: VectorStat
    chroma: VectorStat

    @field_validator("mfcc", "contrast", "chroma")
    @classmethod
    def _vector_lengths(cls, v: VectorStat, info) -> VectorStat:
        expected = VECTOR_LENGTHS[info.field_name]
        if len(v[0]) != expected or len(v[1]) != expected:
            raise ValueError(f"{info.field_name} debe tener {expected} componentes")
        return v

    def to_flat_dict(self) -> Dict[str, Union[float, List[float]]]:
        """Objeto JSON plano: <familia>_median / <familia>_mean."""
        out: Dict[str, Union[float, List[float]]] = {}
        for name in type(self).model_fields:
            median, mean = getattr(self, name)
            out[f"{name}_median"] = list(median) if isinstance(median, (list, tuple)) else median
            out[f"{name}_mean"] = list(mean) if isinstance(mean, (list, tuple)) else mean
        return out

    @classmethod
    def zeros(cls) -> "FeatureSet":
        scalars = {name: (0.0, 0.0) for name in SCALAR_FAMILIES}
        vectors = {name: ([0.0] * n, [0.0] * n) for name, n in VECTOR_LENGTHS.items()}
        return cls(**scalars, **vectors)


def _vector_stat(m: np.ndarray) -> VectorStat:
    median, mean = median_and_mean_columns(m)
    return [float(v) for v in median], [float(v) for v in mean]


def extract_voice_features(clip: AudioClip, cfg: Optional[AnalysisConfig] = None) -> FeatureSet:
    """Calcula todas las familias por trama y las agrega a (mediana, media)."""
    cfg = cfg or AnalysisConfig.from_settings()
    if len(clip) < cfg.frame_size:
        raise TooShort(f"El clip tiene {len(clip)} muestras; se requieren al menos {cfg.frame_size}")

    sr, n, eps = clip.sample_rate, cfg.frame_size, cfg.epsilon
    frames = frame_signal(clip.samples, n, cfg.hop)
    spec = stft(clip, cfg)
    mag = spec.magnitude
    power = mag ** 2

    voiced = [f for f in (pitch_per_frame(frame, sr) for frame in frames) if f is not None]
    f0 = median_and_mean(voiced) if voiced else (0.0, 0.0)

    centroids = spectral_centroid(mag, sr, n, eps)
    clip_hnr = hnr(clip, cfg)

    features = FeatureSet(
        f0=f0,
        centroid=median_and_mean(centroids),
        bandwidth=median_and_mean(spectral_bandwidth(mag, centroids, sr, n, eps)),
        rolloff=median_and_mean(spectral_rolloff(mag, None, sr, n)),
        zcr=median_and_mean(zero_crossing_rate(frames)),
        mfcc=_vector_stat(mfcc(power, sr, n, epsilon=eps)),
        rms=median_and_mean(rms_energy(frames)),
        hnr=(clip_hnr, clip_hnr),
        flatness=median_and_mean(spectral_flatness(power, eps)),
        contrast=_vector_stat(spectral_contrast(mag, sr, n, eps)),
        chroma=_vector_stat(chroma(mag, sr, n)),
    )
    logger.debug(
        f"Descriptores extraídos: {spec.n_frames} tramas, {len(voiced)} sonoras, "
        f"f0 mediana={features.f0[0]:.1f} Hz, HNR={clip_hnr:.2f}"
    )
    return features
