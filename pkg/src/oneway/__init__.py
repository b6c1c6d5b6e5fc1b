"""Simulator and verifier for measurement-based quantum computation on cluster states."""

__version__ = "0.1.0"
