"""Finite effect algebras, MV-algebras and state operators, with matrix and commutative models.

Submodules:

- ``effect_core``   partial sum tables, axioms, order, ideals, quotients, states
- ``mv_core``       MV-algebra tables and the correspondence with MV-effect algebras
- ``state_ops``     state operators: validation, enumeration, quotients, induced states
- ``jc_matrix``     effects of matrix algebras, positive maps, conditional expectations
- ``commutative_mv`` stochastic idempotents and conditional expectations on finite spaces
- ``cli``           the ``effectalg`` command line
"""
from ._kernels import BACKEND
from .effect_core import FiniteEffectAlgebra, PreconditionError, StructuralError, validate_effect_algebra
from .mv_core import MvAlgebra, validate_mv
from .state_ops import enumerate_state_operators, validate_state_operator

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "FiniteEffectAlgebra",
    "MvAlgebra",
    "PreconditionError",
    "StructuralError",
    "enumerate_state_operators",
    "validate_effect_algebra",
    "validate_mv",
    "validate_state_operator",
]
