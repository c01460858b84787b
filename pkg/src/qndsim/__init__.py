"""Simulation of a double-quantum-wire QND photon-number detector."""

__version__ = "0.1.0"
