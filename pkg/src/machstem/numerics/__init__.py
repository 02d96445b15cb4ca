"""Shared numerical kernels."""
