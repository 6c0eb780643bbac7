"""Device-independent upper bounds on decoherence from CHSH statistics."""

__version__ = "0.1.0"
