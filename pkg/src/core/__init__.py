"""Errores compartidos por todos los módulos."""
