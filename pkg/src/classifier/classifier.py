# src/classifier/classifier.py
"""
Clasificador base de locutores: regresión logística multinomial sobre píxeles
promediados en bloques de 16x16, entrenada por descenso de gradiente de lote completo.
"""
import logging
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from classifier.metrics import Metrics, compute_metrics
from config.settings import training_settings
from core.errors import (
    BadParameter,
    DegenerateDataset,
    EmptyInput,
    IoFailure,
    UnknownLabel,
    UnsupportedEncoding,
)
from dataset.augment import augment as augment_image
from dataset.synth_dataset import LabeledImage
from fingerprint.fingerprint_builder import RgbImage

logger = logging.getLogger(__name__)

IMAGE_SIDE = 512
POOL = 16
N_FEATURES = 3 * (IMAGE_SIDE // POOL) ** 2 + 1
MODEL_MAGIC = b"AFPLRM01"
LOG_EVERY = 50

PathLike = Union[str, Path]


class TrainConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    learning_rate: float = Field(default=0.1, gt=0.0)
    epochs: int = Field(default=200, ge=0)
    seed: int = 0
    # Fracción de entrenamiento usada para separar el conjunto de evaluación.
    split: float = Field(default=0.9, gt=0.0, le=1.0)

    @classmethod
    def from_settings(cls, **overrides) -> "TrainConfig":
        values = {
            "learning_rate": training_settings.learning_rate,
            "epochs": training_settings.epochs,
            "seed": training_settings.seed,
            "split": training_settings.split,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        try:
            return cls(**values)
        except ValidationError as e:
            raise BadParameter(f"Configuración de entrenamiento inválida: {e}") from e


@dataclass
class Model:
    weights: np.ndarray
    class_names: List[str]
    train_config: TrainConfig
    loss_history: List[float] = field(default_factory=list)

    def __post_init__(self):
        if len(self.class_names) < 2:
            raise DegenerateDataset("El modelo requiere al menos 2 clases")
        if self.weights.shape != (len(self.class_names), N_FEATURES):
            raise BadParameter(f"Pesos con forma {self.weights.shape}; se esperaba ({len(self.class_names)}, {N_FEATURES})")
        if not np.all(np.isfinite(self.weights)):
            raise BadParameter("Los pesos contienen valores no finitos")

    def class_index(self, label: str) -> int:
        try:
            return self.class_names.index(label)
        except ValueError:
            raise UnknownLabel(f"Etiqueta fuera de las clases del modelo: {label}") from None


# =========================
# Núcleo numérico
# =========================
def featurize(img: RgbImage) -> np.ndarray:
    """Cada plano promediado en bloques 16x16 (32x32), concatenados R, G, B, escalados /255, más bias 1."""
    if img.side != IMAGE_SIDE:
        raise BadParameter(f"Se esperaba una imagen de {IMAGE_SIDE}x{IMAGE_SIDE} (recibido {img.side})")
    blocks = IMAGE_SIDE // POOL
    pooled = img.pixels.astype(np.float64).reshape(blocks, POOL, blocks, POOL, 3).mean(axis=(1, 3))
    planes = np.transpose(pooled, (2, 0, 1)).reshape(-1) / 255.0
    return np.append(planes, 1.0)


def softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def one_hot(y: Sequence[int], n_classes: int) -> np.ndarray:
    out = np.zeros((len(y), n_classes))
    out[np.arange(len(y)), np.asarray(y, dtype=int)] = 1.0
    return out


def loss_and_gradient(weights: np.ndarray, x: np.ndarray, y_onehot: np.ndarray) -> Tuple[float, np.ndarray]:
    """Entropía cruzada media y su gradiente respecto a los pesos (clases x atributos)."""
    logits = x @ weights.T
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_probs = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    m = x.shape[0]
    loss = float(-np.sum(y_onehot * log_probs) / m)
    grad = (np.exp(log_probs) - y_onehot).T @ x / m
    return loss, grad


def _augmented_matrix(data: Sequence[LabeledImage], seed: int, epoch: int) -> np.ndarray:
    rng = np.random.default_rng([seed, epoch])
    seeds = rng.integers(0, 2**31 - 1, size=len(data))
    return np.stack([featurize(augment_image(item.image, seed=int(s))) for item, s in zip(data, seeds)])


def train(data: Sequence[LabeledImage], cfg: Optional[TrainConfig] = None, augment: bool = False) -> Model:
    """
    Descenso de gradiente de lote completo con pesos iniciales en cero.
    Determinista dados los datos y cfg (incluido el aumento, que se siembra con cfg.seed).
    """
    cfg = cfg or TrainConfig.from_settings()
    class_names = sorted({item.label for item in data})
    if len(class_names) < 2:
        raise DegenerateDataset(f"Se requieren al menos 2 clases (encontradas: {class_names})")
    counts = {name: sum(1 for item in data if item.label == name) for name in class_names}
    if min(counts.values()) < 2:
        raise DegenerateDataset(f"Se requieren al menos 2 muestras por clase: {counts}")

    y = one_hot([class_names.index(item.label) for item in data], len(class_names))
    x_base = np.stack([featurize(item.image) for item in data])
    weights = np.zeros((len(class_names), N_FEATURES))

    logger.info(
        f"Entrenando: {len(data)} imágenes, clases={class_names}, lr={cfg.learning_rate}, "
        f"epochs={cfg.epochs}, augment={augment}"
    )
    history: List[float] = []
    for epoch in range(cfg.epochs):
        x = _augmented_matrix(data, cfg.seed, epoch) if augment else x_base
        loss, grad = loss_and_gradient(weights, x, y)
        history.append(loss)
        if epoch % LOG_EVERY == 0:
            logger.info(f"  epoch {epoch:4d}/{cfg.epochs}  loss={loss:.6f}")
        weights -= cfg.learning_rate * grad

    final_loss, _ = loss_and_gradient(weights, x_base, y)
    history.append(final_loss)
    logger.info(f"  final  loss={final_loss:.6f}")
    return Model(weights=weights, class_names=class_names, train_config=cfg, loss_history=history)


def predict(model: Model, img: RgbImage) -> Tuple[str, np.ndarray]:
    """Etiqueta argmax (empates: menor índice de clase) y vector de probabilidades."""
    probs = softmax(model.weights @ featurize(img))
    return model.class_names[int(np.argmax(probs))], probs


def evaluate(model: Model, test: Sequence[LabeledImage]) -> Metrics:
    if not test:
        raise EmptyInput("El conjunto de evaluación está vacío")
    y_true = [model.class_index(item.label) for item in test]
    y_pred = [model.class_names.index(predict(model, item.image)[0]) for item in test]
    metrics = compute_metrics(y_true, y_pred, model.class_names)
    logger.info(f"Evaluación: {len(test)} imágenes, accuracy={metrics.accuracy:.4f}")
    return metrics


# =========================
# Persistencia
# =========================
def save_model(model: Model, path: PathLike) -> None:
    """
    Layout little-endian: magic(8) | n_classes u32 | n_features u32 |
    por clase: len u16 + nombre UTF-8 | lr f64 | epochs u32 | seed i64 | split f64 |
    pesos f64 row-major (clases x atributos).
    """
    n_classes, n_features = model.weights.shape
    parts = [MODEL_MAGIC, struct.pack("<II", n_classes, n_features)]
    for name in model.class_names:
        raw = name.encode("utf-8")
        parts.append(struct.pack("<H", len(raw)) + raw)
    cfg = model.train_config
    parts.append(struct.pack("<dIqd", cfg.learning_rate, cfg.epochs, cfg.seed, cfg.split))
    parts.append(np.ascontiguousarray(model.weights, dtype="<f8").tobytes())

    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(b"".join(parts))
    except OSError as e:
        raise IoFailure(f"No se pudo escribir el modelo {path}: {e}") from e


def load_model(path: PathLike) -> Model:
    path = Path(path)
    try:
        blob = path.read_bytes()
    except OSError as e:
        raise IoFailure(f"No se pudo leer el modelo {path}: {e}") from e

    try:
        if blob[:8] != MODEL_MAGIC:
            raise UnsupportedEncoding(f"{path} no es un archivo de modelo")
        offset = 8
        n_classes, n_features = struct.unpack_from("<II", blob, offset)
        offset += 8
        names = []
        for _ in range(n_classes):
            (length,) = struct.unpack_from("<H", blob, offset)
            offset += 2
            names.append(blob[offset: offset + length].decode("utf-8"))
            offset += length
        lr, epochs, seed, split = struct.unpack_from("<dIqd", blob, offset)
        offset += struct.calcsize("<dIqd")
        weights = np.frombuffer(blob, dtype="<f8", count=n_classes * n_features, offset=offset)
    except (struct.error, ValueError, UnicodeDecodeError) as e:
        if isinstance(e, UnsupportedEncoding):
            raise
        raise UnsupportedEncoding(f"{path}: archivo de modelo truncado o corrupto ({e})") from e

    cfg = TrainConfig(learning_rate=lr, epochs=epochs, seed=seed, split=split)
    return Model(weights=weights.reshape(n_classes, n_features).astype(np.float64), class_names=names, train_config=cfg)
