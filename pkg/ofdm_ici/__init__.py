"""ofdm-ici: exact OFDM channel and ICI coefficients, a BEP approximation and Monte-Carlo checks of it."""

__version__ = "0.1.0"
