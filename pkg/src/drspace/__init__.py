"""Numerical toolkit for Damek-Ricci spaces.

Builds the solvable extension of a generalized Heisenberg algebra from
Clifford-module data and provides closed-form geodesics, distances,
Busemann functions with gradients and Hessians, the direction-adapted
spectral decomposition, horosphere shape operators with the Riccati
equation, and visibility-axiom diagnostics, each paired with an
independent numerical oracle.
"""

from .algebra import (
    CliffordModuleSpec,
    CliffordValidationError,
    HeisenbergAlgebra,
    build_algebra,
    load_spec,
    save_spec,
    standard_instance,
)
from .space import AlgebraVector, DamekRicciSpace, GroupPoint

__all__ = [
    "CliffordModuleSpec",
    "CliffordValidationError",
    "HeisenbergAlgebra",
    "build_algebra",
    "standard_instance",
    "load_spec",
    "save_spec",
    "AlgebraVector",
    "DamekRicciSpace",
    "GroupPoint",
    "make_space",
]

__version__ = "0.1.0"


def make_space(preset="quaternionic_q", q=1):
    """Convenience constructor: DamekRicciSpace from a catalog preset name."""
    return DamekRicciSpace(build_algebra(standard_instance(preset, q)))
