"""Lectura/escritura WAV y codec forma de onda <-> imagen en escala de grises."""
