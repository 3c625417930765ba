# src/dataset/augment.py
"""Aumentos de imagen para el entrenamiento: espejo horizontal, rotación y zoom."""
import logging
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy import ndimage

from core.errors import BadParameter
from fingerprint.fingerprint_builder import RgbImage

logger = logging.getLogger(__name__)

MAX_ROTATION = 0.1
MAX_ZOOM_DELTA = 0.1


class AugmentOp(BaseModel):
    """hflip, rotate(θ radianes) o zoom(s fracción)."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["hflip", "rotate", "zoom"]
    value: float = 0.0

    def describe(self) -> str:
        return self.kind if self.kind == "hflip" else f"{self.kind}({self.value:+.4f})"


def _check(op: AugmentOp) -> None:
    if op.kind == "rotate" and not -MAX_ROTATION <= op.value <= MAX_ROTATION:
        raise BadParameter(f"θ debe estar en [−{MAX_ROTATION}, {MAX_ROTATION}] (recibido {op.value})")
    if op.kind == "zoom" and not 1 - MAX_ZOOM_DELTA <= op.value <= 1 + MAX_ZOOM_DELTA:
        raise BadParameter(f"s debe estar en [{1 - MAX_ZOOM_DELTA}, {1 + MAX_ZOOM_DELTA}] (recibido {op.value})")


def _affine(img: RgbImage, matrix: np.ndarray) -> RgbImage:
    """Remuestreo bilineal alrededor del centro; lo que cae fuera del cuadro vale 0."""
    center = np.array([(img.side - 1) / 2.0] * 2)
    offset = center - matrix @ center
    planes = [
        ndimage.affine_transform(
            img.pixels[:, :, c].astype(np.float64), matrix, offset=offset, order=1, mode="constant", cval=0.0
        )
        for c in range(3)
    ]
    out = np.clip(np.rint(np.stack(planes, axis=-1)), 0, 255).astype(np.uint8)
    return RgbImage(out)


def hflip(img: RgbImage) -> RgbImage:
    return RgbImage(img.pixels[:, ::-1, :].copy())


def rotate(img: RgbImage, theta: float) -> RgbImage:
    _check(AugmentOp(kind="rotate", value=theta))
    if theta == 0.0:
        return RgbImage(img.pixels.copy())
    c, s = np.cos(theta), np.sin(theta)
    # affine_transform mapea coordenadas de salida a coordenadas de entrada.
    return _affine(img, np.array([[c, -s], [s, c]]))


def zoom(img: RgbImage, scale: float) -> RgbImage:
    _check(AugmentOp(kind="zoom", value=scale))
    if scale == 1.0:
        return RgbImage(img.pixels.copy())
    return _affine(img, np.eye(2) / scale)


def random_op(rng: np.random.Generator) -> AugmentOp:
    """Una transformación al azar: espejo, rotación en ±0.1 rad o zoom en ±10%."""
    kind = ("hflip", "rotate", "zoom")[int(rng.integers(0, 3))]
    if kind == "rotate":
        return AugmentOp(kind=kind, value=float(rng.uniform(-MAX_ROTATION, MAX_ROTATION)))
    if kind == "zoom":
        return AugmentOp(kind=kind, value=float(rng.uniform(1 - MAX_ZOOM_DELTA, 1 + MAX_ZOOM_DELTA)))
    return AugmentOp(kind=kind)


def augment(img: RgbImage, op: Optional[AugmentOp] = None, seed: int = 0) -> RgbImage:
    """Aplica op; sin op, elige una transformación al azar a partir de seed."""
    if op is None:
        op = random_op(np.random.default_rng(seed))
    _check(op)
    if op.kind == "hflip":
        return hflip(img)
    if op.kind == "rotate":
        return rotate(img, op.value)
    return zoom(img, op.value)
