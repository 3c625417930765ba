"""Corpus sintético de locutores y aumentos de imagen."""
