# src/dataset/synth_dataset.py
"""
Corpus sintético de dos locutores: fuente glotal periódica filtrada por tres formantes,
más ruido blanco con semilla. Todo es función pura de las semillas (PCG64 de numpy).
"""
import csv
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator
from scipy import signal

from audio.audio_io import AudioClip
from config.settings import dataset_settings, fingerprint_settings
from core.errors import BadParameter, CapacityExceeded, IoFailure, UnknownLabel
from fingerprint.fingerprint_builder import RgbImage, fuse, load_rgb_png, save_rgb_png

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.csv"
MANIFEST_HEADER = ("path", "label", "seed")
PEAK_LEVEL = 0.9
MIN_SYNTH_RATE = 12800

PathLike = Union[str, Path]


class SpeakerProfile(BaseModel):
    """Parámetros de un locutor sintético."""

    model_config = ConfigDict(frozen=True)

    name: str = Field(min_length=1)
    f0_base: float = Field(ge=60.0, le=350.0)
    f0_jitter: float = Field(ge=0.0)
    formants: Tuple[float, float, float]
    formant_bandwidths: Tuple[float, float, float] = (90.0, 110.0, 170.0)
    noise_level: float = Field(default=0.02, ge=0.0, le=0.5)

    @field_validator("formants")
    @classmethod
    def _ascending(cls, v):
        if not (0 < v[0] < v[1] < v[2]):
            raise ValueError("Los formantes deben ser positivos y ascendentes")
        return v

    @field_validator("formant_bandwidths")
    @classmethod
    def _positive(cls, v):
        if min(v) <= 0:
            raise ValueError("Los anchos de banda deben ser positivos")
        return v


DEFAULT_PROFILES: Tuple[SpeakerProfile, ...] = (
    SpeakerProfile(name="alto", f0_base=210.0, f0_jitter=20.0, formants=(800.0, 1200.0, 2500.0)),
    SpeakerProfile(name="bass", f0_base=120.0, f0_jitter=15.0, formants=(600.0, 900.0, 2200.0)),
)


@dataclass(frozen=True)
class LabeledImage:
    image: RgbImage
    label: str
    source_seed: int


@dataclass(frozen=True)
class ManifestRow:
    path: str
    label: str
    seed: int


@dataclass(frozen=True)
class Manifest:
    path: Path
    rows: List[ManifestRow]

    @property
    def labels(self) -> List[str]:
        """Etiquetas en orden de primera aparición."""
        return list(dict.fromkeys(r.label for r in self.rows))

    def resolve(self, row: ManifestRow) -> Path:
        return self.path.parent / row.path


# =========================
# Síntesis
# =========================
def glottal_source(f0: float, n: int, sr: int) -> np.ndarray:
    """Tren de pulsos limitado en banda con caída de −12 dB/octava (amplitud 1/h²)."""
    t = np.arange(n) / sr
    n_harmonics = int((sr / 2.0 - 1.0) // f0)
    source = np.zeros(n)
    for h in range(1, n_harmonics + 1):
        source += np.cos(2.0 * np.pi * h * f0 * t) / (h * h)
    return source


def resonator(x: np.ndarray, freq: float, bandwidth: float, sr: int) -> np.ndarray:
    """Resonador de segundo orden (polo doble en r·e^{±iθ})."""
    r = np.exp(-np.pi * bandwidth / sr)
    theta = 2.0 * np.pi * freq / sr
    return signal.lfilter([1.0 - r], [1.0, -2.0 * r * np.cos(theta), r * r], x)


def _peak_normalize(x: np.ndarray, level: float) -> np.ndarray:
    peak = np.max(np.abs(x))
    return x * (level / peak) if peak > 0 else x


def synth_utterance(profile: SpeakerProfile, seed: int, duration: float, sr: Optional[int] = None) -> AudioClip:
    """Determinista dado (profile, seed): mismo resultado bit a bit."""
    sr = sr or dataset_settings.sample_rate
    if sr < MIN_SYNTH_RATE:
        raise BadParameter(f"sr debe ser >= {MIN_SYNTH_RATE} (recibido {sr})")
    n = int(round(duration * sr))
    capacity = fingerprint_settings.side ** 2 - fingerprint_settings.side
    if n < 1 or n > capacity:
        raise CapacityExceeded(f"{n} muestras fuera de [1, {capacity}]")

    rng = np.random.default_rng(seed)
    f0 = profile.f0_base + rng.uniform(-profile.f0_jitter, profile.f0_jitter)

    voiced = glottal_source(f0, n, sr)
    for freq, bw in zip(profile.formants, profile.formant_bandwidths):
        voiced = resonator(voiced, freq, bw, sr)
    voiced = _peak_normalize(voiced, 1.0)

    noisy = voiced + profile.noise_level * rng.standard_normal(n)
    return AudioClip(_peak_normalize(noisy, PEAK_LEVEL), sr)


def derive_seed(master_seed: int, speaker_index: int, index: int) -> int:
    state = np.random.SeedSequence([master_seed, speaker_index, index]).generate_state(1, dtype=np.uint32)
    return int(state[0])


def duration_for_seed(seed: int, min_duration: Optional[float] = None, max_duration: Optional[float] = None) -> float:
    """Duración uniforme en [min, max] s, con un flujo aleatorio distinto del de la síntesis."""
    lo = dataset_settings.min_duration if min_duration is None else min_duration
    hi = dataset_settings.max_duration if max_duration is None else max_duration
    return float(np.random.default_rng([seed, 1]).uniform(lo, hi))


# =========================
# Corpus en disco
# =========================
def _render_item(job: Tuple[SpeakerProfile, int, int, Path, int]) -> ManifestRow:
    profile, index, seed, out_dir, sr = job
    clip = synth_utterance(profile, seed, duration_for_seed(seed), sr)
    rel = Path(profile.name) / f"{index}.png"
    save_rgb_png(fuse(clip), out_dir / rel)
    return ManifestRow(path=rel.as_posix(), label=profile.name, seed=seed)


def write_manifest(path: Path, rows: Sequence[ManifestRow]) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(MANIFEST_HEADER)
            for row in rows:
                writer.writerow([row.path, row.label, row.seed])
    except OSError as e:
        raise IoFailure(f"No se pudo escribir el manifiesto {path}: {e}") from e


def read_manifest(path: PathLike) -> Manifest:
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            if tuple(reader.fieldnames or ()) != MANIFEST_HEADER:
                raise BadParameter(f"{path}: cabecera esperada {','.join(MANIFEST_HEADER)}")
            rows = [ManifestRow(path=r["path"], label=r["label"], seed=int(r["seed"])) for r in reader]
    except OSError as e:
        raise IoFailure(f"No se pudo leer el manifiesto {path}: {e}") from e
    return Manifest(path=path, rows=rows)


def generate_dataset(
    profiles: Sequence[SpeakerProfile],
    per_speaker: int,
    out_dir: PathLike,
    seed: int,
    sr: Optional[int] = None,
    workers: Optional[int] = None,
) -> Manifest:
    """
    per_speaker clips por perfil, cada uno fusionado a out_dir/<label>/<index>.png,
    más out_dir/manifest.csv (path,label,seed). La salida paralela es idéntica a la serial.
    """
    if per_speaker < 2:
        raise BadParameter(f"per_speaker debe ser >= 2 (recibido {per_speaker})")
    names = [p.name for p in profiles]
    if not names or len(set(names)) != len(names):
        raise BadParameter("Se requieren perfiles con nombres únicos")

    out_dir = Path(out_dir)
    sr = sr or dataset_settings.sample_rate
    workers = max(1, workers or dataset_settings.workers)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise IoFailure(f"No se pudo crear {out_dir}: {e}") from e

    jobs = [
        (profile, index, derive_seed(seed, speaker_index, index), out_dir, sr)
        for speaker_index, profile in enumerate(profiles)
        for index in range(per_speaker)
    ]
    logger.info(f"Generando {len(jobs)} huellas en {out_dir} con {workers} hilo(s)")

    if workers == 1:
        rows = [_render_item(job) for job in jobs]
    else:
        # map conserva el orden de entrada.
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_render_item, jobs))

    manifest_path = out_dir / MANIFEST_NAME
    write_manifest(manifest_path, rows)
    logger.info(f"Manifiesto escrito: {manifest_path} ({len(rows)} filas)")
    return Manifest(path=manifest_path, rows=rows)


def load_labeled_images(manifest: Manifest, labels: Optional[Sequence[str]] = None) -> List[LabeledImage]:
    """Carga todas las imágenes del manifiesto; con labels, rechaza etiquetas fuera del conjunto."""
    allowed = set(labels) if labels is not None else None
    items = []
    for row in manifest.rows:
        if allowed is not None and row.label not in allowed:
            raise UnknownLabel(f"Etiqueta desconocida en el manifiesto: {row.label}")
        items.append(LabeledImage(image=load_rgb_png(manifest.resolve(row)), label=row.label, source_seed=row.seed))
    return items


def split_dataset(
    items: Sequence[LabeledImage], fraction: float, seed: int
) -> Tuple[List[LabeledImage], List[LabeledImage]]:
    """
    Partición estratificada entrenamiento/prueba con semilla.
    Cada clase aporta round(fraction·n) ítems al entrenamiento, con al menos uno de cada lado
    cuando fraction < 1. Con fraction == 1 todo va a entrenamiento y la prueba queda vacía.
    """
    if not 0.0 < fraction <= 1.0:
        raise BadParameter(f"fraction debe estar en (0, 1] (recibido {fraction})")
    labels = sorted({item.label for item in items})
    train_idx: List[int] = []
    test_idx: List[int] = []
    for class_index, label in enumerate(labels):
        idx = np.array([i for i, item in enumerate(items) if item.label == label])
        idx = np.random.default_rng([seed, class_index]).permutation(idx)
        if fraction >= 1.0:
            n_train = len(idx)
        else:
            n_train = min(max(int(round(fraction * len(idx))), 1), len(idx) - 1)
        train_idx.extend(idx[:n_train].tolist())
        test_idx.extend(idx[n_train:].tolist())
    return [items[i] for i in sorted(train_idx)], [items[i] for i in sorted(test_idx)]
