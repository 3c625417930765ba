"""Servicios de orquestación sobre archivos."""
