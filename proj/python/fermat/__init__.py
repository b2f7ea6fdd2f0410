"""Fermat metrics of stationary spacetimes: geodesics, conjugate points, Morse counts."""

from ._fermat import *  # noqa: F401,F403

__version__ = "0.1.0"
