"""Sequential community extraction with tabu search, plus partition baselines."""

__version__ = "0.1.0"
