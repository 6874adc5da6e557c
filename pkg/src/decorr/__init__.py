"""Correlation over decomposed signals."""
