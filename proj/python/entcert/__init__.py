"""Entanglement certification from partial one- and two-body Pauli correlators."""

from ._core import *  # noqa: F401,F403
from ._core import __doc__  # noqa: F401
