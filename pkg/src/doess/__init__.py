"""Data-driven pulse-sequence design for disordered interacting spin clusters."""

__version__ = "0.1.0"
