"""Latent ranking inference from noisy pairwise annotations."""

from ._crowdrank import *  # noqa: F401,F403
from ._crowdrank import __doc__  # noqa: F401

__version__ = "0.1.0"
