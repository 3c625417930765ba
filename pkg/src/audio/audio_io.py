# src/audio/audio_io.py
"""
Lectura/escritura de WAV PCM de 16 bits y el tipo AudioClip.
Las muestras viven siempre en [-1, 1]; la frecuencia de muestreo mínima es 8000 Hz.
"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np
import soundfile as sf

from core.errors import BadParameter, EmptyAudio, IoFailure, NotWav, UnsupportedEncoding

logger = logging.getLogger(__name__)

MIN_SAMPLE_RATE = 8000
# 2^15, no 32767: al guardar se recorta a int16 (1.0 -> 32767) y el error de
# ida y vuelta queda en 1/32767.
PCM_SCALE = 32768.0
INT16_MIN, INT16_MAX = -32768, 32767

PathLike = Union[str, Path]


@dataclass(frozen=True)
class AudioClip:
    """Señal mono x[n] en [-1, 1] más su frecuencia de muestreo (Hz)."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64).reshape(-1)
        if samples.size == 0:
            raise EmptyAudio("El clip no tiene muestras")
        if int(self.sample_rate) < MIN_SAMPLE_RATE:
            raise BadParameter(f"sample_rate debe ser >= {MIN_SAMPLE_RATE} Hz (recibido {self.sample_rate})")
        samples = np.clip(samples, -1.0, 1.0)
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self) -> int:
        return int(self.samples.size)

    @property
    def duration(self) -> float:
        """Duración en segundos."""
        return len(self) / self.sample_rate


def load_wav(path: PathLike) -> AudioClip:
    """
    Lee un WAV PCM de 16 bits (mono o multicanal) y lo normaliza a [-1, 1].

    Multicanal se promedia a mono. Errores: NotWav, UnsupportedEncoding, EmptyAudio.
    """
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            head = fh.read(12)
    except OSError as e:
        raise IoFailure(f"No se pudo leer {path}: {e}") from e

    if len(head) < 12 or head[:4] != b"RIFF" or head[8:12] != b"WAVE":
        raise NotWav(f"{path} no es un archivo RIFF/WAVE")

    try:
        info = sf.info(str(path))
    except RuntimeError as e:
        raise UnsupportedEncoding(f"{path}: formato no soportado ({e})") from e

    if info.format != "WAV" or info.subtype != "PCM_16":
        raise UnsupportedEncoding(f"{path}: se requiere PCM de 16 bits (encontrado {info.subtype})")
    if info.frames == 0:
        raise EmptyAudio(f"{path} no contiene muestras")

    data, sample_rate = sf.read(str(path), dtype="int16", always_2d=True)
    samples = data.astype(np.float64) / PCM_SCALE
    if samples.shape[1] > 1:
        samples = samples.mean(axis=1)
    else:
        samples = samples[:, 0]

    logger.debug(f"WAV leído: {path} ({samples.size} muestras, {info.channels} canal(es), {sample_rate} Hz)")
    return AudioClip(np.clip(samples, -1.0, 1.0), sample_rate)


def to_pcm16(samples: np.ndarray) -> np.ndarray:
    """Cuantiza muestras en [-1, 1] a enteros de 16 bits (el inverso de la carga)."""
    scaled = np.round(np.asarray(samples, dtype=np.float64) * PCM_SCALE)
    return np.clip(scaled, INT16_MIN, INT16_MAX).astype(np.int16)


def save_wav(clip: AudioClip, path: PathLike) -> None:
    """Escribe el clip como WAV PCM mono de 16 bits."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        sf.write(str(path), to_pcm16(clip.samples), clip.sample_rate, subtype="PCM_16", format="WAV")
    except (OSError, RuntimeError) as e:
        raise IoFailure(f"No se pudo escribir {path}: {e}") from e
    logger.debug(f"WAV escrito: {path} ({len(clip)} muestras @ {clip.sample_rate} Hz)")
