"""
Exact prolongation of finite-type overdetermined linear PDE systems.

Submodules: ``liealg`` (root systems, Weyl dimensions, weight multiplicities),
``kostant`` (graded profiles of the prolongation module), ``tensorlab``
(classical prolongations by brute force), ``hodge`` (the graded module with
its differential and splitting), ``flatjet`` (polynomial solutions on flat
space and the splitting operator), ``curved`` (closed systems on flat space
and the round sphere, symbolic) and ``cli``.
"""

from .catalog import CATALOG, ESpec, catalog_cases, parse_espec
from .errors import ConfigurationError, ProlongationError, ResourceError, VerificationError
from .exact import ExactMatrix, ExactSubspace
from .flatjet import solution_space, splitting_L
from .hodge import build_model, verify_phi
from .kostant import GradedProfile, graded_profile, make_structure, profile_for
from .liealg import build_root_system, weight_multiplicities, weyl_dimension
from .tensorlab import classical_prolongations, symbol_projector

__version__ = "0.1.0"

__all__ = [
    "CATALOG",
    "ConfigurationError",
    "ESpec",
    "ExactMatrix",
    "ExactSubspace",
    "GradedProfile",
    "ProlongationError",
    "ResourceError",
    "VerificationError",
    "build_model",
    "build_root_system",
    "catalog_cases",
    "classical_prolongations",
    "graded_profile",
    "make_structure",
    "parse_espec",
    "profile_for",
    "solution_space",
    "splitting_L",
    "symbol_projector",
    "verify_phi",
    "weight_multiplicities",
    "weyl_dimension",
]
