"""Fast-light pulse propagation through four-wave-mixing gain/absorption media."""

__version__ = "0.1.0"
