# src/fingerprint/fingerprint_builder.py
"""
Huella RGB de 512x512:
- Rojo: vector plano de 78 descriptores, normalizado min-max y replicado (periodo 78).
- Verde: forma de onda con cabecera (green_codec con lado fijo).
- Azul: rejilla 4x4 de parches de 128x128 (mediana | media), celdas libres en 127.
"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np
from PIL import Image

from audio.audio_io import AudioClip
from audio.green_codec import GrayImage, decode_waveform, encode_waveform
from config.settings import fingerprint_settings
from core.errors import BadParameter, BadZ, CapacityExceeded, IoFailure, TooShort, UnsupportedEncoding
from dsp.dsp_core import AnalysisConfig, lin_resample
from features.voice_features import FeatureSet, extract_voice_features

logger = logging.getLogger(__name__)

EPSILON = 1e-10
# Absorbe el ε del denominador: un valor exactamente a mitad de camino sube al byte superior.
ROUND_TOLERANCE = 1e-6

# Orden congelado del vector plano (78 valores) y de la secuencia de parches (11).
FLAT_ORDER: Tuple[str, ...] = (
    "f0", "centroid", "bandwidth", "rolloff", "zcr", "mfcc",
    "rms", "hnr", "contrast", "flatness", "chroma",
)
PATCH_ORDER: Tuple[str, ...] = (
    "f0", "centroid", "bandwidth", "rolloff", "zcr", "mfcc",
    "rms", "hnr", "contrast", "chroma", "flatness",
)
FLAT_LENGTH = 78

PathLike = Union[str, Path]


@dataclass(frozen=True)
class RgbImage:
    """Tres planos de 8 bits (S, S, 3) en orden R, G, B."""

    pixels: np.ndarray

    def __post_init__(self):
        pixels = np.asarray(self.pixels)
        if pixels.ndim != 3 or pixels.shape[2] != 3 or pixels.shape[0] != pixels.shape[1]:
            raise BadParameter(f"Se esperaba una imagen (S, S, 3), recibido {pixels.shape}")
        object.__setattr__(self, "pixels", pixels.astype(np.uint8, copy=False))

    @property
    def side(self) -> int:
        return int(self.pixels.shape[0])

    @property
    def red(self) -> np.ndarray:
        return self.pixels[:, :, 0]

    @property
    def green(self) -> np.ndarray:
        return self.pixels[:, :, 1]

    @property
    def blue(self) -> np.ndarray:
        return self.pixels[:, :, 2]

    @classmethod
    def merge(cls, red: np.ndarray, green: np.ndarray, blue: np.ndarray) -> "RgbImage":
        return cls(np.stack([red, green, blue], axis=-1).astype(np.uint8))


def to_bytes(values) -> np.ndarray:
    """Redondeo mitad-hacia-arriba a [0, 255]."""
    scaled = np.asarray(values, dtype=np.float64)
    return np.clip(np.floor(scaled + 0.5 + ROUND_TOLERANCE), 0, 255).astype(np.uint8)


def minmax_normalize(values, epsilon: float = EPSILON) -> np.ndarray:
    """x' = (x − min) / (max − min + ε) · 255, sin redondear."""
    v = np.asarray(values, dtype=np.float64)
    lo, hi = v.min(), v.max()
    return (v - lo) / (hi - lo + epsilon) * 255.0


def normalize_scalar(value: float, lo: float, hi: float) -> int:
    """Normalización lineal a un byte sobre un rango físico fijo, con recorte."""
    if hi <= lo:
        raise BadParameter(f"Rango inválido [{lo}, {hi}]")
    clipped = min(max(float(value), lo), hi)
    return int(to_bytes((clipped - lo) / (hi - lo) * 255.0))


# =========================
# Canal rojo
# =========================
def flatten_features(fs: FeatureSet) -> np.ndarray:
    """Concatena el FeatureSet en el orden fijo de 78 valores."""
    values = []
    for name in FLAT_ORDER:
        median, mean = getattr(fs, name)
        for stat in (median, mean):
            if isinstance(stat, (list, tuple)):
                values.extend(float(x) for x in stat)
            else:
                values.append(float(stat))
    flat = np.asarray(values, dtype=np.float64)
    if flat.size != FLAT_LENGTH:
        raise BadParameter(f"El vector plano tiene {flat.size} valores; se esperaban {FLAT_LENGTH}")
    return flat


def build_red(v, side: Optional[int] = None) -> np.ndarray:
    """Normaliza los 78 valores en conjunto, replica hasta side² elementos y da forma side x side."""
    side = side or fingerprint_settings.side
    v = np.asarray(v, dtype=np.float64).reshape(-1)
    if v.size != FLAT_LENGTH:
        raise BadParameter(f"build_red requiere {FLAT_LENGTH} valores (recibido {v.size})")

    normalized = to_bytes(minmax_normalize(v))
    target = side * side
    reps = -(-target // normalized.size)
    replicated = np.tile(normalized, reps)[:target]
    return replicated.reshape(side, side)


# =========================
# Canal azul
# =========================
def _check_z(z: int) -> None:
    if z < 2 or z % 2 != 0:
        raise BadZ(f"Z debe ser par y >= 2 (recibido {z})")


def make_scalar_patch(median_norm: int, mean_norm: int, z: int) -> np.ndarray:
    """Mitad izquierda = mediana normalizada, mitad derecha = media normalizada."""
    _check_z(z)
    patch = np.empty((z, z), dtype=np.uint8)
    patch[:, : z // 2] = median_norm
    patch[:, z // 2:] = mean_norm
    return patch


def make_vector_patch(med_vec: Sequence[float], mean_vec: Sequence[float], z: int) -> np.ndarray:
    """
    Cada vector se normaliza min-max por separado, se interpola a Z puntos y se
    repite verticalmente: Z/2 filas de mediana arriba, Z/2 filas de media abajo.
    """
    _check_z(z)
    med = np.asarray(med_vec, dtype=np.float64).reshape(-1)
    mean = np.asarray(mean_vec, dtype=np.float64).reshape(-1)
    if med.size == 0 or med.size != mean.size:
        raise BadParameter(f"Vectores de longitudes {med.size} y {mean.size}; deben coincidir y no ser vacíos")

    med_row = to_bytes(lin_resample(minmax_normalize(med), z))
    mean_row = to_bytes(lin_resample(minmax_normalize(mean), z))
    patch = np.empty((z, z), dtype=np.uint8)
    patch[: z // 2] = med_row
    patch[z // 2:] = mean_row
    return patch


def scalar_ranges(sr: int) -> Dict[str, Tuple[float, float]]:
    """Rangos físicos fijos de normalización de las familias escalares."""
    nyquist = sr / 2.0
    return {
        "f0": (0.0, fingerprint_settings.f0_max),
        "centroid": (0.0, nyquist),
        "bandwidth": (0.0, nyquist),
        "rolloff": (0.0, nyquist),
        "zcr": (0.0, 1.0),
        "rms": (0.0, 1.0),
        "hnr": (0.0, fingerprint_settings.hnr_max),
        "flatness": (0.0, 1.0),
    }


def cell_slices(index: int, grid: int, z: int) -> Tuple[slice, slice]:
    row, col = divmod(index, grid)
    return slice(row * z, (row + 1) * z), slice(col * z, (col + 1) * z)


def build_blue(fs: FeatureSet, sr: int, side: Optional[int] = None, grid: Optional[int] = None) -> np.ndarray:
    side = side or fingerprint_settings.side
    grid = grid or fingerprint_settings.grid
    if grid * grid < len(PATCH_ORDER) or side % grid != 0:
        raise BadParameter(f"Rejilla {grid}x{grid} inválida para {len(PATCH_ORDER)} parches en {side}px")
    z = side // grid
    ranges = scalar_ranges(sr)

    plane = np.full((side, side), fingerprint_settings.fill_value, dtype=np.uint8)
    for index, name in enumerate(PATCH_ORDER):
        median, mean = getattr(fs, name)
        if name in ranges:
            lo, hi = ranges[name]
            patch = make_scalar_patch(normalize_scalar(median, lo, hi), normalize_scalar(mean, lo, hi), z)
        else:
            patch = make_vector_patch(median, mean, z)
        rows, cols = cell_slices(index, grid, z)
        plane[rows, cols] = patch
    return plane


# =========================
# Fusión y recuperación
# =========================
def fuse_with_features(clip: AudioClip, cfg: Optional[AnalysisConfig] = None) -> Tuple[RgbImage, FeatureSet]:
    cfg = cfg or AnalysisConfig.from_settings()
    side = fingerprint_settings.side
    capacity = side * side - side
    if len(clip) > capacity:
        raise CapacityExceeded(f"El clip tiene {len(clip)} muestras; la capacidad del canal verde es {capacity}")
    if len(clip) < cfg.frame_size:
        raise TooShort(f"El clip tiene {len(clip)} muestras; se requieren al menos {cfg.frame_size}")

    green = encode_waveform(clip, fixed_side=side).pixels
    features = extract_voice_features(clip, cfg)
    red = build_red(flatten_features(features), side)
    blue = build_blue(features, clip.sample_rate, side)
    return RgbImage.merge(red, green, blue), features


def fuse(clip: AudioClip, cfg: Optional[AnalysisConfig] = None) -> RgbImage:
    """I_RGB = merge(rojo, verde, azul)."""
    image, _ = fuse_with_features(clip, cfg)
    return image


def recover_audio(img: RgbImage) -> AudioClip:
    """Solo el canal verde participa; rojo y azul se ignoran."""
    return decode_waveform(GrayImage(img.green))


def split_planes(img: RgbImage) -> Dict[str, GrayImage]:
    return {"red": GrayImage(img.red), "green": GrayImage(img.green), "blue": GrayImage(img.blue)}


def save_rgb_png(img: RgbImage, path: PathLike) -> None:
    """PNG RGB de 8 bits, sin alfa ni entrelazado."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        Image.fromarray(img.pixels).save(path, format="PNG")
    except OSError as e:
        raise IoFailure(f"No se pudo escribir {path}: {e}") from e


def load_rgb_png(path: PathLike) -> RgbImage:
    path = Path(path)
    try:
        with Image.open(path) as im:
            im.load()
            mode = im.mode
            arr = np.asarray(im)
    except FileNotFoundError as e:
        raise IoFailure(f"No existe {path}") from e
    except OSError as e:
        raise UnsupportedEncoding(f"{path} no es una imagen legible: {e}") from e
    if mode != "RGB":
        raise UnsupportedEncoding(f"{path}: se esperaba una imagen RGB (modo {mode})")
    return RgbImage(arr)
