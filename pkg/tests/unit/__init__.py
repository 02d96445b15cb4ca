"""
Unit tests for the machstem services, numerics and utilities.
"""
