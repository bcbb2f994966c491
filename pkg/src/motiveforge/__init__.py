"""Hypergeometric motives, Asai factors of Hilbert eigenforms and Ramanujan-type series."""

__version__ = "0.1.0"
