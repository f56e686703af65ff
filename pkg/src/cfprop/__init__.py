"""Commutator-free exponential propagators for ``i u' = (T + V(x, t)) u``.

The Hamiltonian is sampled at quadrature nodes within each step, the
kinetic operator is applied with FFTs and each exponential is computed
by a Lanczos process with a-posteriori error control.
"""
from .errors import CapabilityError, ConfigurationError, DomainError, ReferenceMismatch
from .krylov import KrylovConfig, expm_action
from .model import MorseConfig, PotentialModel, SampledPotential, morse_ground_state, walker_preston
from .quadrature import G, QuadratureRule, alpha_weights_for, gl6, make_rule, named_rule
from .schemes import SCHEME_NAMES, SchemeTable, builtin_scheme, propagate, step
from .spectral import FFTCounter, SpatialGrid

__all__ = [
    "CapabilityError",
    "ConfigurationError",
    "DomainError",
    "FFTCounter",
    "G",
    "KrylovConfig",
    "MorseConfig",
    "PotentialModel",
    "QuadratureRule",
    "ReferenceMismatch",
    "SCHEME_NAMES",
    "SampledPotential",
    "SchemeTable",
    "SpatialGrid",
    "alpha_weights_for",
    "builtin_scheme",
    "expm_action",
    "gl6",
    "make_rule",
    "morse_ground_state",
    "named_rule",
    "propagate",
    "step",
    "walker_preston",
]

__version__ = "0.1.0"
