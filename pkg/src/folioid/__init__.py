"""Groupoid quotients, multiplicative foliations, leaf spaces and Dirac pushforwards."""

__version__ = "0.1.0"
