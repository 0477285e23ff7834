"""Numerical verification of weighted Hardy-type inequalities on radial models."""
__version__ = "0.1.0"
