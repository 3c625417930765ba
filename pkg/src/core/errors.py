# src/core/errors.py
"""
Jerarquía de errores del proyecto.
El nombre de cada clase es el que la CLI imprime en stderr (exit code 2).
"""


class FingerprintError(ValueError):
    """Base de todos los errores de datos del proyecto."""


# --- audio_io ---
class NotWav(FingerprintError):
    pass


class UnsupportedEncoding(FingerprintError):
    pass


class EmptyAudio(FingerprintError):
    pass


class IoFailure(FingerprintError, OSError):
    pass


# --- green_codec / fingerprint ---
class CapacityExceeded(FingerprintError):
    pass


class MalformedHeader(FingerprintError):
    pass


class HeaderOutOfRange(FingerprintError):
    pass


class LengthExceedsCapacity(FingerprintError):
    pass


# --- dsp_core / features ---
class BadLength(FingerprintError):
    pass


class TooShort(FingerprintError):
    pass


class ConfigMismatch(FingerprintError):
    pass


class BadKernel(FingerprintError):
    pass


class EmptyInput(FingerprintError):
    pass


class BadAlpha(FingerprintError):
    pass


class BandEmpty(FingerprintError):
    pass


class BadZ(FingerprintError):
    pass


# --- dataset / classifier ---
class BadParameter(FingerprintError):
    pass


class DegenerateDataset(FingerprintError):
    pass


class UnknownLabel(FingerprintError):
    pass
