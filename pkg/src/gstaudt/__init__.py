"""Exact encodings between polynomial systems and Gaussian conditional independence."""

from .cicore import (
    CIConstraint,
    CIStatement,
    SymMatrix,
    almost_principal_minor,
    check_constraints,
    ci_holds_regular,
    ci_holds_semidefinite,
    is_diagonally_spanning,
    is_positive_definite,
    is_positive_semidefinite,
    is_principally_regular,
    principal_minor,
    realized_structure,
    schur_value,
)
from .encoder import (
    ConstraintSet,
    GroundSet,
    add_semidefinite_guards,
    add_vanishing_constraints,
    encode,
    encode_trace,
)
from .poly import AtomicSystem, Polynomial, atomize, eliminate_inequalities, parse_system
from .projective import Trace, build_trace, evaluate_trace
from .reduction import GenericSystem, gci_to_system, minor_equations
from .scalar import QuadraticNumber, format_scalar, parse_scalar, sqrt_exact
from .witness import WitnessConfig, build_model, extract_solution

__version__ = "0.1.0"
