"""Index computations for group algebras, covers, Toeplitz operators and spectral flow."""

from ._ncindex import *  # noqa: F401,F403
from ._ncindex import NcIndexError, run_config

__all__ = [
    "NcIndexError",
    "bott_integral",
    "covering_check",
    "relative_index",
    "run_config",
    "spectral_flow",
    "toeplitz_circle",
    "toeplitz_rotation",
    "compare_odd_index",
    "winding_oracle",
]
