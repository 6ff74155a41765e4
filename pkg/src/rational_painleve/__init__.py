"""Rational solutions of the second Painleve equation and their large-index asymptotics."""

__version__ = "0.1.0"
