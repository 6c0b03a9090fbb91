"""Typewriters, type D structures and DD bimodules over the torus algebra."""

__version__ = "0.1.0"
