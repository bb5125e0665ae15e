"""Exact Brauer loop model: link patterns, qKZ solutions, sum rules and orbits."""

__version__ = "0.1.0"
