# src/config/settings.py
from config.env_store import get_setting


class AnalysisSettings:
    """Parámetros de análisis espectral (framing, pisos numéricos, bandas)."""

    @property
    def frame_size(self) -> int:
        """Tamaño de trama en muestras (potencia de dos)."""
        return int(get_setting("FRAME_SIZE", "2048") or "2048")

    @property
    def hop(self) -> int:
        """Salto entre tramas en muestras."""
        return int(get_setting("HOP", "512") or "512")

    @property
    def epsilon(self) -> float:
        """Piso para logaritmos y divisiones."""
        return float(get_setting("EPSILON", "1e-10") or "1e-10")

    @property
    def rolloff_alpha(self) -> float:
        return float(get_setting("ROLLOFF_ALPHA", "0.85") or "0.85")

    @property
    def n_mels(self) -> int:
        return int(get_setting("N_MELS", "26") or "26")

    @property
    def n_mfcc(self) -> int:
        return int(get_setting("N_MFCC", "13") or "13")

    @property
    def pitch_fmin(self) -> float:
        return float(get_setting("PITCH_FMIN", "50") or "50")

    @property
    def pitch_fmax(self) -> float:
        return float(get_setting("PITCH_FMAX", "400") or "400")

    @property
    def voicing_threshold(self) -> float:
        """Umbral de autocorrelación normalizada para considerar una trama sonora."""
        return float(get_setting("VOICING_THRESHOLD", "0.3") or "0.3")

    @property
    def hpss_kernel(self) -> int:
        return int(get_setting("HPSS_KERNEL", "17") or "17")


class FingerprintSettings:
    """Geometría de la imagen RGB y rangos de normalización del canal azul."""

    @property
    def side(self) -> int:
        return int(get_setting("IMAGE_SIDE", "512") or "512")

    @property
    def grid(self) -> int:
        """Celdas por lado de la rejilla de parches."""
        return int(get_setting("PATCH_GRID", "4") or "4")

    @property
    def fill_value(self) -> int:
        return int(get_setting("PATCH_FILL", "127") or "127")

    @property
    def f0_max(self) -> float:
        return float(get_setting("F0_MAX", "500") or "500")

    @property
    def hnr_max(self) -> float:
        return float(get_setting("HNR_MAX", "10") or "10")


class DatasetSettings:
    """Configuración del corpus sintético."""

    @property
    def sample_rate(self) -> int:
        return int(get_setting("SAMPLE_RATE", "22050") or "22050")

    @property
    def min_duration(self) -> float:
        return float(get_setting("MIN_DURATION", "2.0") or "2.0")

    @property
    def max_duration(self) -> float:
        return float(get_setting("MAX_DURATION", "5.0") or "5.0")

    @property
    def workers(self) -> int:
        """Hilos para la generación; la salida es idéntica a la serial."""
        return int(get_setting("DATASET_WORKERS", "1") or "1")


class TrainingSettings:
    """Hiperparámetros por defecto del clasificador base."""

    @property
    def learning_rate(self) -> float:
        return float(get_setting("LEARNING_RATE", "0.1") or "0.1")

    @property
    def epochs(self) -> int:
        return int(get_setting("EPOCHS", "200") or "200")

    @property
    def split(self) -> float:
        return float(get_setting("SPLIT", "0.9") or "0.9")

    @property
    def seed(self) -> int:
        return int(get_setting("SEED", "0") or "0")


class LoggingSettings:
    @property
    def level(self) -> str:
        return (get_setting("LOG_LEVEL", "INFO") or "INFO").upper()


# Instancias globales de configuración
analysis_settings = AnalysisSettings()
fingerprint_settings = FingerprintSettings()
dataset_settings = DatasetSettings()
training_settings = TrainingSettings()
logging_settings = LoggingSettings()
