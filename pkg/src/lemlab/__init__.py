"""Numerical bounds for the three-pole Lempert function of the bidisk."""
__version__ = "0.1.0"
