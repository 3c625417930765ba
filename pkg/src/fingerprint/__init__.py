"""Fusión de la huella RGB 512x512."""
