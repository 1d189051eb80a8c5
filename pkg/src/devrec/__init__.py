"""devrec: knowledge-based, time-aware personalized retrieval of dev artifacts."""

__version__ = "0.1.0"
