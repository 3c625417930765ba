# src/services/pipeline_service.py
import logging
import sys
from pathlib import Path
from typing import Dict, Optional, Sequence, Union

# Agregar el directorio src al path para imports
src_path = Path(__file__).parent.parent
sys.path.insert(0, str(src_path))

from audio.audio_io import load_wav, save_wav
from audio.green_codec import encode_waveform, decode_waveform, load_gray_png, save_gray_png
from classifier.classifier import (
    Model,
    TrainConfig,
    evaluate,
    load_model,
    predict,
    save_model,
    train,
)
from classifier.metrics import Metrics
from config.settings import training_settings
from dataset.synth_dataset import (
    DEFAULT_PROFILES,
    Manifest,
    SpeakerProfile,
    generate_dataset,
    load_labeled_images,
    read_manifest,
    split_dataset,
)
from dsp.dsp_core import AnalysisConfig
from features.voice_features import FeatureSet, extract_voice_features
from fingerprint.fingerprint_builder import (
    fuse_with_features,
    load_rgb_png,
    recover_audio,
    save_rgb_png,
    split_planes,
)

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


class FingerprintService:
    """Operaciones de alto nivel sobre archivos (WAV, PNG, CSV, modelo) usadas por la CLI."""

    def __init__(self, cfg: Optional[AnalysisConfig] = None):
        self.cfg = cfg or AnalysisConfig.from_settings()

    # ---------- Huella RGB ----------
    def encode_file(self, wav_path: PathLike, png_path: PathLike) -> FeatureSet:
        """WAV -> huella RGB 512x512 en PNG. Devuelve los descriptores usados."""
        clip = load_wav(wav_path)
        logger.info(f"Codificando {wav_path}: {len(clip)} muestras @ {clip.sample_rate} Hz")
        image, features = fuse_with_features(clip, self.cfg)
        save_rgb_png(image, png_path)
        logger.info(f"Huella escrita en {png_path}")
        return features

    def decode_file(self, png_path: PathLike, wav_path: PathLike) -> None:
        clip = recover_audio(load_rgb_png(png_path))
        save_wav(clip, wav_path)
        logger.info(f"Audio recuperado en {wav_path}: {len(clip)} muestras @ {clip.sample_rate} Hz")

    def planes(self, png_path: PathLike, out_dir: PathLike) -> Dict[str, Path]:
        out_dir = Path(out_dir)
        written = {}
        for name, plane in split_planes(load_rgb_png(png_path)).items():
            target = out_dir / f"{name}.png"
            save_gray_png(plane, target)
            written[name] = target
        logger.info(f"Planos escritos en {out_dir}")
        return written

    # ---------- Forma de onda en escala de grises ----------
    def wave_encode(self, wav_path: PathLike, png_path: PathLike) -> int:
        image = encode_waveform(load_wav(wav_path))
        save_gray_png(image, png_path)
        logger.info(f"Imagen de forma de onda {image.side}x{image.side} escrita en {png_path}")
        return image.side

    def wave_decode(self, png_path: PathLike, wav_path: PathLike) -> None:
        save_wav(decode_waveform(load_gray_png(png_path)), wav_path)
        logger.info(f"Audio recuperado en {wav_path}")

    # ---------- Descriptores ----------
    def features_file(self, wav_path: PathLike) -> FeatureSet:
        return extract_voice_features(load_wav(wav_path), self.cfg)

    # ---------- Corpus y clasificador ----------
    def build_dataset(
        self,
        out_dir: PathLike,
        per_speaker: int,
        seed: int,
        profiles: Sequence[SpeakerProfile] = DEFAULT_PROFILES,
        workers: Optional[int] = None,
    ) -> Manifest:
        return generate_dataset(profiles, per_speaker, out_dir, seed, workers=workers)

    def train_from_manifest(
        self,
        manifest_path: PathLike,
        model_path: PathLike,
        split: Optional[float] = None,
        epochs: Optional[int] = None,
        learning_rate: Optional[float] = None,
        seed: Optional[int] = None,
        augment: bool = False,
    ) -> Model:
        cfg = TrainConfig.from_settings(split=split, epochs=epochs, learning_rate=learning_rate, seed=seed)
        items = load_labeled_images(read_manifest(manifest_path))
        train_items, test_items = split_dataset(items, cfg.split, cfg.seed)
        logger.info(f"Partición: {len(train_items)} entrenamiento / {len(test_items)} prueba (split={cfg.split})")
        model = train(train_items, cfg, augment=augment)
        save_model(model, model_path)
        logger.info(f"Modelo guardado en {model_path}")
        return model

    def evaluate_manifest(self, manifest_path: PathLike, model_path: PathLike) -> Metrics:
        """
        Evalúa sobre la parte de prueba del manifiesto, reconstruida con el split y la
        semilla guardados en el modelo. Con split 1.0 no hay prueba y se evalúa todo el manifiesto.
        """
        model = load_model(model_path)
        items = load_labeled_images(read_manifest(manifest_path), labels=model.class_names)
        _, test_items = split_dataset(items, model.train_config.split, model.train_config.seed)
        if not test_items:
            logger.warning("El modelo no reservó conjunto de prueba; se evalúa el manifiesto completo")
            test_items = items
        return evaluate(model, test_items)

    def predict_file(self, model_path: PathLike, png_path: PathLike) -> Dict[str, object]:
        model = load_model(model_path)
        label, probs = predict(model, load_rgb_png(png_path))
        return {
            "label": label,
            "probabilities": {name: float(p) for name, p in zip(model.class_names, probs)},
        }

    @staticmethod
    def default_seed() -> int:
        return training_settings.seed


# Instancia global del servicio
fingerprint_service = FingerprintService()
