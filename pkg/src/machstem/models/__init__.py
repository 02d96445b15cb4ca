"""Data structures, error types and input documents."""
