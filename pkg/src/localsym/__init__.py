"""Exact theta/Catalan symbol calculus over F_q((pi)) and its interpolation
through formal-group towers."""

__version__ = "0.1.0"
