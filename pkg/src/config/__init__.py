"""Configuración por capas: variables de entorno, archivo JSON y valores por defecto."""
