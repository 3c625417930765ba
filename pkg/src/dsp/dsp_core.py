# src/dsp/dsp_core.py
"""
Núcleos numéricos compartidos: FFT/STFT/ISTFT, ventana Hann, autocorrelación,
filtro de mediana 2-D, interpolación lineal y agregación mediana/media.
Todas las funciones son puras; se pueden paralelizar por trama o por archivo.
"""
import logging
from dataclasses import dataclass
from typing import Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator
from scipy import ndimage, signal

from audio.audio_io import AudioClip
from config.settings import analysis_settings
from core.errors import BadKernel, BadLength, ConfigMismatch, EmptyInput, TooShort

logger = logging.getLogger(__name__)

Axis = Literal["time", "frequency"]


def is_power_of_two(n: int) -> bool:
    return n >= 2 and (n & (n - 1)) == 0


class AnalysisConfig(BaseModel):
    """Framing del análisis: 2048/512 con ventana Hann por defecto."""

    model_config = ConfigDict(frozen=True)

    frame_size: int = 2048
    hop: int = 512
    window: Literal["hann"] = "hann"
    epsilon: float = 1e-10

    @field_validator("frame_size")
    @classmethod
    def _frame_is_pow2(cls, v: int) -> int:
        if not is_power_of_two(v):
            raise ValueError("frame_size debe ser potencia de dos")
        return v

    @field_validator("epsilon")
    @classmethod
    def _epsilon_positive(cls, v: float) -> float:
        if v <= 0:
            raise ValueError("epsilon debe ser > 0")
        return v

    @model_validator(mode="after")
    def _hop_fits(self):
        if not 1 <= self.hop <= self.frame_size:
            raise ValueError("hop debe estar en [1, frame_size]")
        return self

    @property
    def n_bins(self) -> int:
        return self.frame_size // 2 + 1

    @classmethod
    def from_settings(cls) -> "AnalysisConfig":
        return cls(
            frame_size=analysis_settings.frame_size,
            hop=analysis_settings.hop,
            epsilon=analysis_settings.epsilon,
        )


@dataclass(frozen=True)
class Spectrogram:
    """Matriz STFT compleja: filas = tramas T, columnas = bins K = frame_size/2 + 1."""

    bins: np.ndarray
    frame_size: int
    hop: int
    sample_rate: int

    @property
    def n_frames(self) -> int:
        return int(self.bins.shape[0])

    @property
    def magnitude(self) -> np.ndarray:
        return np.abs(self.bins)

    @property
    def power(self) -> np.ndarray:
        return np.abs(self.bins) ** 2

    def frequencies(self) -> np.ndarray:
        return bin_frequencies(self.sample_rate, self.frame_size)

    def with_mask(self, mask: np.ndarray) -> "Spectrogram":
        return Spectrogram(self.bins * mask, self.frame_size, self.hop, self.sample_rate)


def bin_frequencies(sample_rate: int, frame_size: int) -> np.ndarray:
    """Frecuencia en Hz del bin k: k·sr/frame_size."""
    return np.arange(frame_size // 2 + 1) * (sample_rate / frame_size)


def hann_window(frame_size: int) -> np.ndarray:
    # Hann periódica (fftbins=True): la suma OLA con hop = N/4 es constante.
    return signal.get_window("hann", frame_size, fftbins=True)


def fft(frame) -> np.ndarray:
    """DFT de un solo lado (frame_size/2 + 1 bins) de una trama de longitud potencia de dos."""
    x = np.asarray(frame, dtype=np.float64).reshape(-1)
    if not is_power_of_two(x.size):
        raise BadLength(f"La FFT requiere longitud potencia de dos (recibido {x.size})")
    return np.fft.rfft(x)


def frame_signal(samples: np.ndarray, frame_size: int, hop: int) -> np.ndarray:
    """Tramas (T, frame_size) en offsets 0, hop, 2·hop… sin relleno de la última trama."""
    x = np.asarray(samples, dtype=np.float64)
    if x.size < frame_size:
        raise TooShort(f"Se requieren al menos {frame_size} muestras (recibido {x.size})")
    return np.lib.stride_tricks.sliding_window_view(x, frame_size)[::hop]


def stft(clip: AudioClip, cfg: Optional[AnalysisConfig] = None) -> Spectrogram:
    cfg = cfg or AnalysisConfig()
    frames = frame_signal(clip.samples, cfg.frame_size, cfg.hop)
    bins = np.fft.rfft(frames * hann_window(cfg.frame_size), axis=1)
    return Spectrogram(bins, cfg.frame_size, cfg.hop, clip.sample_rate)


def istft(spec: Spectrogram, cfg: Optional[AnalysisConfig] = None) -> np.ndarray:
    """
    Overlap-add con ventana Hann y normalización por la energía de ventana.
    Longitud de salida: (T − 1)·hop + frame_size.
    """
    if spec.bins.ndim != 2 or spec.bins.shape[1] != spec.frame_size // 2 + 1:
        raise ConfigMismatch(f"Forma {spec.bins.shape} incompatible con frame_size={spec.frame_size}")
    if cfg is not None and (cfg.frame_size, cfg.hop) != (spec.frame_size, spec.hop):
        raise ConfigMismatch(
            f"Config ({cfg.frame_size}, {cfg.hop}) distinta de la del espectrograma ({spec.frame_size}, {spec.hop})"
        )

    n_frames, frame_size, hop = spec.n_frames, spec.frame_size, spec.hop
    window = hann_window(frame_size)
    frames = np.fft.irfft(spec.bins, n=frame_size, axis=1) * window

    length = (n_frames - 1) * hop + frame_size
    out = np.zeros(length)
    norm = np.zeros(length)
    w2 = window ** 2
    for t in range(n_frames):
        start = t * hop
        out[start: start + frame_size] += frames[t]
        norm[start: start + frame_size] += w2

    # Donde la ventana es casi cero (bordes) no hay información recuperable.
    covered = norm > 1e-8
    out[covered] /= norm[covered]
    out[~covered] = 0.0
    return out


def autocorrelation(frame) -> np.ndarray:
    """r[τ] = Σ_n x[n]·x[n+τ] para τ = 0..N−1."""
    x = np.asarray(frame, dtype=np.float64).reshape(-1)
    if x.size == 0:
        raise EmptyInput("Trama vacía")
    if not np.any(x):
        return np.zeros(x.size)
    return signal.correlate(x, x, mode="full", method="fft")[x.size - 1:]


def median_filter_2d(m, axis: Axis, kernel: int) -> np.ndarray:
    """Mediana deslizante a lo largo de un eje, con bordes replicados."""
    if kernel < 3 or kernel % 2 == 0:
        raise BadKernel(f"kernel debe ser impar y >= 3 (recibido {kernel})")
    m = np.asarray(m, dtype=np.float64)
    if axis == "time":
        size = (kernel, 1)
    elif axis == "frequency":
        size = (1, kernel)
    else:
        raise BadKernel(f"Eje desconocido: {axis}")
    return ndimage.median_filter(m, size=size, mode="nearest")


def lin_resample(v, target: int) -> np.ndarray:
    """Interpolación lineal que conserva extremos sobre posiciones i·(L−1)/(Z−1)."""
    v = np.asarray(v, dtype=np.float64).reshape(-1)
    if v.size == 0:
        raise EmptyInput("Vector vacío")
    if target < 1:
        raise BadLength(f"target debe ser >= 1 (recibido {target})")
    if v.size == 1:
        return np.full(target, v[0])
    if target == 1:
        return v[:1].copy()
    positions = np.linspace(0.0, v.size - 1, target)
    return np.interp(positions, np.arange(v.size), v)


def median_and_mean(v) -> Tuple[float, float]:
    v = np.asarray(v, dtype=np.float64).reshape(-1)
    if v.size == 0:
        raise EmptyInput("No hay valores para agregar")
    return float(np.median(v)), float(np.mean(v))


def median_and_mean_columns(m) -> Tuple[np.ndarray, np.ndarray]:
    """Agregación elemento a elemento: mediana y media de cada columna sobre las filas (tramas)."""
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] == 0:
        raise EmptyInput("No hay tramas para agregar")
    return np.median(m, axis=0), np.mean(m, axis=0)
