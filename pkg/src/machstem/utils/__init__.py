"""Configuration, logging, serialization and worker pool helpers."""
