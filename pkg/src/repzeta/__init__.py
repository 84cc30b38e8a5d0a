"""Representation zeta functions of arithmetic groups of type A2 and A1.

Exact local factors, the cyclotomic clearing recursion, continuation of the
global Euler product past the abscissa of convergence, coefficient tables and
asymptotic fits, and zeros of the local factors near the natural boundary.
"""

from .algebra import BivarPoly, LaurentQ
from .clearing import run_clearing
from .global_assembly import (
    ContinuationModel,
    GroupConfig,
    continuation_eval,
    dirichlet_coefficients,
    ff_power_series,
    pole_order_and_residue,
)
from .local_a2 import PlaceData, finite_group_zeta, local_zeta_a2, normalized_E

__version__ = "0.1.0"

__all__ = [
    "BivarPoly",
    "ContinuationModel",
    "GroupConfig",
    "LaurentQ",
    "PlaceData",
    "continuation_eval",
    "dirichlet_coefficients",
    "ff_power_series",
    "finite_group_zeta",
    "local_zeta_a2",
    "normalized_E",
    "pole_order_and_residue",
    "run_clearing",
]
