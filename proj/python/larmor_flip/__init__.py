"""Charged particle in a sign-changing magnetic field."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
