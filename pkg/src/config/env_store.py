# src/config/env_store.py

import os
import json
import threading
import logging
from pathlib import Path

from typing import Optional, Dict

# Cargar variables de entorno desde .env si existe (para desarrollo local)
try:
    from dotenv import load_dotenv
    # Buscar .env en el directorio raíz del proyecto (dos niveles arriba desde src/config/)
    env_path = Path(__file__).parent.parent.parent / ".env"
    if env_path.exists():
        load_dotenv(env_path)
except ImportError:
    # python-dotenv no está instalado, continuar sin él
    pass

logger = logging.getLogger(__name__)

ENV_PREFIX = "AUDIOFP_"
SETTINGS_FILE = os.getenv("AUDIOFP_SETTINGS_FILE", "audiofp.json")


class SettingsStore:
    """
    Búsqueda por capas de configuración: ENV (override) > archivo JSON > default.
    El archivo se carga de forma perezosa y un archivo ausente o roto no es un error.
    """

    def __init__(self, settings_file: str = SETTINGS_FILE, prefix: str = ENV_PREFIX):
        self._path = Path(settings_file)
        self._prefix = prefix
        self._data: Dict[str, str] = {}
        self._loaded = False
        self._load_error = False
        self._lock = threading.RLock()

    def _fetch(self) -> Dict[str, str]:
        txt = self._path.read_text(encoding="utf-8")
        data = json.loads(txt)
        if not isinstance(data, dict):
            raise ValueError(f"{self._path} no contiene un objeto JSON")
        return {k.upper(): (str(v) if v is not None else "") for k, v in data.items()}

    def load(self):
        """Intenta cargar el archivo, pero no falla si no existe o no se puede leer."""
        if not self._path.exists():
            self._load_error = True
            return
        try:
            with self._lock:
                self._data = self._fetch()
                self._loaded = True
                self._load_error = False
            logger.debug(f"Configuración cargada desde {self._path} ({len(self._data)} claves)")
        except Exception as e:
            logger.debug(f"No se pudo cargar configuración desde {self._path}: {e}")
            self._load_error = True

    def refresh(self):
        """Vuelve a leer el archivo; conserva los datos existentes si falla."""
        self._loaded = False
        self._load_error = False
        self.load()

    def get(self, key: str, default: Optional[str] = None) -> Optional[str]:
        key = key.upper()
        # ENV (override) > archivo > default
        v = os.getenv(self._prefix + key)
        if v is not None:
            return v

        with self._lock:
            if not self._loaded and not self._load_error:
                self.load()
            if self._loaded:
                return self._data.get(key, default)
            return default


settings_store = SettingsStore()


def get_setting(key: str, default: Optional[str] = None) -> Optional[str]:
    return settings_store.get(key, default)
