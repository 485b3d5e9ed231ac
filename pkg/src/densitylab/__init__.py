"""Desk-scale experiments on lattice-point counting, optimal lifting and the
spectra of Ramanujan-type graphs."""

__version__ = "0.1.0"
