"""Descriptores de voz por trama y su agregación en FeatureSet."""
