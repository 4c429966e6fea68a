"""Numerical laboratory for the radial free-Schrodinger propagator:
dispersive decay verification, self-similar blow-up and Strichartz gating."""

__version__ = "0.1.0"
