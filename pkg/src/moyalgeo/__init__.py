"""Quantum lengths and spectral distances on the Moyal plane, in a truncated number basis."""

from .core import (ModelParams, TruncatedOperator, commutator, deriv_z, deriv_zbar, displacement,
                   energies, hamiltonian, hermitian_function, identity, ladder, number_op,
                   operator_norm, position_ops)
from .errors import (ContractViolation, DomainError, FormulaInapplicable, InvalidTruncation,
                     MoyalGeoError, TruncationTooSmall, UndefinedLimit, UnsupportedPair)
from .quantum_length import d_L, d_L2, d_L_mod, lambda_inv2
from .reports import DistanceReport
from .solver import (SolverConfig, candidate_elements, geodesic_residual, optimal_element_l0,
                     seminorm, solve_distance)
from .spectral import (DoubledTripleParams, dist_bounds, dist_eigenstates, dist_sphere_pair,
                       dist_translates, doubled_distance, fix_lambda, ratio_convergence,
                       riemann_comparison, sphere_ratio_limit, spectral_distance_analytic)
from .states import Coherent, Eigenstate, Sphere, Vector, parse_state, realize
from .tensor import ground_kernel, length, length_sq, spectrum_L, uncertainty

__all__ = [
    "ModelParams", "TruncatedOperator", "commutator", "deriv_z", "deriv_zbar", "displacement",
    "energies", "hamiltonian", "hermitian_function", "identity", "ladder", "number_op",
    "operator_norm", "position_ops", "ContractViolation", "DomainError", "FormulaInapplicable",
    "InvalidTruncation", "MoyalGeoError", "TruncationTooSmall", "UndefinedLimit",
    "UnsupportedPair", "d_L", "d_L2", "d_L_mod", "lambda_inv2", "DistanceReport", "SolverConfig",
    "candidate_elements", "geodesic_residual", "optimal_element_l0", "seminorm", "solve_distance",
    "DoubledTripleParams", "dist_bounds", "dist_eigenstates", "dist_sphere_pair",
    "dist_translates", "doubled_distance", "fix_lambda", "ratio_convergence",
    "riemann_comparison", "sphere_ratio_limit", "spectral_distance_analytic", "Coherent",
    "Eigenstate", "Sphere", "Vector", "parse_state", "realize", "ground_kernel", "length",
    "length_sq", "spectrum_L", "uncertainty",
]

__version__ = "0.1.0"
