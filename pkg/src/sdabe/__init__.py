"""Bandwidth extension of narrowband speech with sampled-data H-infinity
synthesis filters and a learned high-band regressor."""

__version__ = "0.1.0"
