"""Single-shot mmWave beam training with true-time-delay arrays."""

__version__ = "0.1.0"
