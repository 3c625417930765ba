"""Clasificador base y métricas de evaluación."""
