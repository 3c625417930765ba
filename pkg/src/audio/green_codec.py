# src/audio/green_codec.py
"""
Codec forma de onda <-> imagen en escala de grises de 8 bits.

Layout de la imagen (S x S):
- Fila 0: cabecera ASCII "L:<longitud>;SR:<frecuencia>" rellenada con bytes 0.
- Filas 1..S-1: una muestra por píxel en orden row-major, pixel = redondeo((x + 1) / 2 * 255).
- Celdas sobrantes al final: 128 (el código de x = 0).
"""
import logging
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np
from PIL import Image
from pydantic import BaseModel, ConfigDict, Field

from audio.audio_io import MIN_SAMPLE_RATE, AudioClip
from core.errors import (
    BadParameter,
    CapacityExceeded,
    HeaderOutOfRange,
    IoFailure,
    LengthExceedsCapacity,
    MalformedHeader,
    UnsupportedEncoding,
)

logger = logging.getLogger(__name__)

PAD_BYTE = 0
TAIL_PIXEL = 128
HEADER_RE = re.compile(r"L:(\d+);SR:(\d+)")

PathLike = Union[str, Path]


class Header(BaseModel):
    """Metadatos de la fila 0: longitud original L (muestras) y sample rate SR (Hz)."""

    model_config = ConfigDict(frozen=True)

    length: int = Field(ge=1)
    sample_rate: int = Field(ge=MIN_SAMPLE_RATE)


@dataclass(frozen=True)
class GrayImage:
    """Ráster cuadrado de 8 bits, S x S, row-major."""

    pixels: np.ndarray

    def __post_init__(self):
        pixels = np.asarray(self.pixels)
        if pixels.ndim != 2 or pixels.shape[0] != pixels.shape[1] or pixels.shape[0] < 2:
            raise BadParameter(f"Se esperaba una matriz cuadrada con lado >= 2, recibido {pixels.shape}")
        object.__setattr__(self, "pixels", pixels.astype(np.uint8, copy=False))

    @property
    def side(self) -> int:
        return int(self.pixels.shape[0])


def round_half_up(values: np.ndarray) -> np.ndarray:
    return np.floor(np.asarray(values, dtype=np.float64) + 0.5)


def required_side(length: int) -> int:
    """El menor S con S² − S >= length."""
    if length < 1:
        raise BadParameter(f"length debe ser >= 1 (recibido {length})")
    # Raíz positiva de S² − S − L = 0, luego ajuste por errores de redondeo.
    side = max(2, math.ceil((1 + math.sqrt(1 + 4 * length)) / 2))
    while (side - 1) * (side - 1) - (side - 1) >= length and side > 2:
        side -= 1
    while side * side - side < length:
        side += 1
    return side


def format_header(header: Header) -> bytes:
    return f"L:{header.length};SR:{header.sample_rate}".encode("ascii")


def parse_header(row) -> Header:
    """Interpreta la fila 0 hasta el primer byte 0 (o el final de la fila)."""
    raw = bytes(np.asarray(row, dtype=np.uint8).tobytes())
    text_bytes = raw.split(bytes([PAD_BYTE]), 1)[0]
    try:
        text = text_bytes.decode("ascii")
    except UnicodeDecodeError as e:
        raise MalformedHeader("La cabecera contiene bytes no ASCII") from e

    match = HEADER_RE.fullmatch(text)
    if not match:
        raise MalformedHeader(f"Cabecera inválida: {text[:32]!r}")

    length, sample_rate = int(match.group(1)), int(match.group(2))
    if length < 1 or sample_rate < MIN_SAMPLE_RATE:
        raise HeaderOutOfRange(f"Cabecera fuera de rango: L={length}, SR={sample_rate}")
    return Header(length=length, sample_rate=sample_rate)


def samples_to_pixels(samples: np.ndarray) -> np.ndarray:
    x = np.clip(np.asarray(samples, dtype=np.float64), -1.0, 1.0)
    return np.clip(round_half_up((x + 1.0) / 2.0 * 255.0), 0, 255).astype(np.uint8)


def pixels_to_samples(pixels: np.ndarray) -> np.ndarray:
    return np.asarray(pixels, dtype=np.float64) / 255.0 * 2.0 - 1.0


def encode_waveform(clip: AudioClip, fixed_side: Optional[int] = None) -> GrayImage:
    """
    Codifica el clip en una imagen S x S con cabecera.

    Sin fixed_side, S = required_side(L), ampliado si la cabecera no cabe en la fila 0.
    """
    length = len(clip)
    header_bytes = format_header(Header(length=length, sample_rate=clip.sample_rate))

    if fixed_side is None:
        side = max(required_side(length), len(header_bytes))
    else:
        side = int(fixed_side)
        if side < 2 or side * side - side < length:
            raise CapacityExceeded(
                f"{length} muestras no caben en {side}x{side} (capacidad {max(side * side - side, 0)})"
            )
        if len(header_bytes) > side:
            raise CapacityExceeded(f"La cabecera ({len(header_bytes)} bytes) no cabe en una fila de {side}")

    pixels = np.full(side * side, TAIL_PIXEL, dtype=np.uint8)
    pixels[:side] = PAD_BYTE
    pixels[: len(header_bytes)] = np.frombuffer(header_bytes, dtype=np.uint8)
    pixels[side: side + length] = samples_to_pixels(clip.samples)

    logger.debug(f"Forma de onda codificada: L={length}, SR={clip.sample_rate}, S={side}")
    return GrayImage(pixels.reshape(side, side))


def decode_waveform(image: GrayImage) -> AudioClip:
    """Reconstruye el clip: lee la cabecera y recorta a L muestras."""
    header = parse_header(image.pixels[0])
    side = image.side
    capacity = side * side - side
    if header.length > capacity:
        raise LengthExceedsCapacity(f"L={header.length} excede la capacidad {capacity} de la imagen {side}x{side}")

    body = image.pixels[1:].reshape(-1)[: header.length]
    return AudioClip(pixels_to_samples(body), header.sample_rate)


def save_gray_png(image: GrayImage, path: PathLike) -> None:
    """PNG de 8 bits en escala de grises, sin alfa ni entrelazado."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        Image.fromarray(image.pixels).save(path, format="PNG")
    except OSError as e:
        raise IoFailure(f"No se pudo escribir {path}: {e}") from e


def load_gray_png(path: PathLike) -> GrayImage:
    """
    Lee un PNG en escala de grises. Si el PNG es RGB se toma el canal verde,
    que es donde la huella fusionada guarda la forma de onda.
    """
    path = Path(path)
    try:
        with Image.open(path) as img:
            img.load()
            mode = img.mode
            arr = np.asarray(img)
    except FileNotFoundError as e:
        raise IoFailure(f"No existe {path}") from e
    except OSError as e:
        raise UnsupportedEncoding(f"{path} no es una imagen legible: {e}") from e

    if mode == "L":
        return GrayImage(arr)
    if mode == "RGB":
        return GrayImage(arr[:, :, 1])
    raise UnsupportedEncoding(f"{path}: modo de imagen {mode} no soportado (se espera L o RGB)")
