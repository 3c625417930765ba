"""Primitivas de señal: STFT, autocorrelación, filtros de mediana, agregación."""
