# tests/conftest.py
import sys
from pathlib import Path

import numpy as np
import pytest

# Agregar el directorio src (y la raíz, para main.py) al path para imports
root_path = Path(__file__).parent.parent
sys.path.insert(0, str(root_path / "src"))
sys.path.insert(0, str(root_path))

from audio.audio_io import AudioClip  # noqa: E402

SR = 22050


@pytest.fixture
def make_sine():
    def _make(freq: float, seconds: float = 1.0, sr: int = SR, amplitude: float = 0.5) -> AudioClip:
        t = np.arange(int(round(seconds * sr))) / sr
        return AudioClip(amplitude * np.sin(2.0 * np.pi * freq * t), sr)

    return _make


@pytest.fixture
def make_noise():
    def _make(seconds: float = 1.0, sr: int = SR, amplitude: float = 0.3, seed: int = 0) -> AudioClip:
        rng = np.random.default_rng(seed)
        n = int(round(seconds * sr))
        return AudioClip(np.clip(amplitude * rng.standard_normal(n), -1.0, 1.0), sr)

    return _make


@pytest.fixture
def voiced_clip(make_sine, make_noise):
    """Tono de 220 Hz con un piso de ruido, 1 s."""
    tone = make_sine(220.0, 1.0, amplitude=0.6)
    noise = make_noise(1.0, amplitude=0.05, seed=7)
    return AudioClip(tone.samples + noise.samples, SR)


@pytest.fixture
def silence():
    return AudioClip(np.zeros(SR), SR)
