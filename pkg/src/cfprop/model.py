"""Time-dependent potentials ``V(x, t) = V_static(x) + f(t) V_field(x)``.

The Walker-Preston benchmark (a Morse oscillator in a cosine laser field)
is provided ready made.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import CapabilityError, ConfigurationError, DomainError
from .quadrature import QuadratureRule, alpha_weights_for, combine, gl6
from .spectral import FFTCounter, SpatialGrid, normalize, spectral_derivative

#: correction weight of the nested commutator [a2, [a1, a2]] in the two-exponential sixth-order scheme
MODIFIED_Y = 1.0 / 43200.0


@dataclass(frozen=True)
class CosineField:
    """Laser envelope ``f(t) = A cos(omega t)``."""

    amplitude: float
    omega: float

    def __call__(self, t):
        return self.amplitude * np.cos(self.omega * t)


@dataclass(frozen=True)
class ZeroField:
    def __call__(self, t):
        return 0.0 * np.asarray(t, dtype=float)


@dataclass(frozen=True, eq=False)
class PotentialModel:
    """External-field potential sampled on a grid.

    ``field_profile_deriv`` is the spatial derivative of ``V_field``; it is
    only needed by schemes that use the modified potential.
    """

    grid: SpatialGrid
    static_part: np.ndarray
    field_profile: np.ndarray
    envelope: Callable[[float], float]
    mu: float
    field_profile_deriv: np.ndarray | None = None

    def __post_init__(self) -> None:
        if not self.mu > 0:
            raise ConfigurationError(f"reduced mass must be positive, got {self.mu!r}")
        for name in ("static_part", "field_profile", "field_profile_deriv"):
            arr = getattr(self, name)
            if arr is None:
                continue
            arr = np.asarray(arr, dtype=float)
            self.grid.check(arr)
            if not np.all(np.isfinite(arr)):
                raise ConfigurationError(f"{name} has non-finite entries")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def has_derivative(self) -> bool:
        return self.field_profile_deriv is not None

    def potential_at(self, t: float) -> np.ndarray:
        return self.static_part + self.envelope(t) * self.field_profile

    def derivative_at(self, t: float, counter: FFTCounter | None = None) -> np.ndarray:
        """Spatial derivative of the time-dependent part of the potential."""
        if self.field_profile_deriv is None:
            raise CapabilityError("model has no field_profile_deriv")
        return self.envelope(t) * self.field_profile_deriv

    def with_spectral_derivative(self) -> "PotentialModel":
        """Copy whose ``V_field'`` comes from spectral differentiation.

        Only sensible for periodic field profiles; a linear ramp such as
        ``V_field = x`` is not one.
        """
        warnings.warn(
            "field derivative obtained by spectral differentiation; "
            "accuracy requires a smooth periodic field profile",
            stacklevel=2,
        )
        counter = FFTCounter()
        deriv = spectral_derivative(self.field_profile, self.grid, counter)
        return PotentialModel(
            self.grid, self.static_part, self.field_profile, self.envelope, self.mu, deriv
        )


class SampledPotential:
    """General ``V(x, t)`` given by a callback returning grid samples.

    Derivatives for the modified potential are taken spectrally from
    snapshots, each costing one FFT pair on the supplied counter.
    """

    def __init__(self, grid: SpatialGrid, sampler: Callable[[float], np.ndarray], mu: float):
        if not mu > 0:
            raise ConfigurationError(f"reduced mass must be positive, got {mu!r}")
        self.grid = grid
        self.sampler = sampler
        self.mu = mu

    has_derivative = True

    def potential_at(self, t: float) -> np.ndarray:
        v = np.asarray(self.sampler(t), dtype=float)
        self.grid.check(v)
        return v

    def derivative_at(self, t: float, counter: FFTCounter | None = None) -> np.ndarray:
        return spectral_derivative(self.potential_at(t), self.grid, counter)


def modified_potential(
    model,
    t_k: float,
    tau: float,
    nodes: QuadratureRule | None = None,
    counter: FFTCounter | None = None,
) -> np.ndarray:
    """Diagonal correction ``V~`` used by the outer stages of ``cf6-2d``.

    With ``alpha_2 = tau * sum_l W[1, l] V(t_k + c_l tau)`` the double
    commutator is diagonal and

        V~ = -(y / mu) (sum_l W[1, l] V'(t_k + c_l tau))^2,   y = 1/43200,

    which for Gauss-Legendre nodes is ``-(5 y / (3 mu)) (V'_3 - V'_1)^2``.
    The stage exponent adds ``tau^2 V~``.
    """
    if not model.has_derivative:
        raise CapabilityError("modified potential needs spatial derivatives of the potential")
    rule = gl6() if nodes is None else nodes
    w2 = alpha_weights_for(rule)[1]
    derivs = [model.derivative_at(t_k + c * tau, counter) for c in rule.nodes]
    grad = combine(w2, derivs)
    return -(MODIFIED_Y / model.mu) * grad**2


def external_field_modified_potential(model: PotentialModel, t_k: float, tau: float) -> np.ndarray:
    """Closed form of ``V~`` for ``V_field`` and Gauss-Legendre nodes.

    ``V~ = -(1 / (25920 mu)) (f_3 - f_1)^2 V_field'^2``.
    """
    if model.field_profile_deriv is None:
        raise CapabilityError("model has no field_profile_deriv")
    c = gl6().nodes
    df = model.envelope(t_k + c[2] * tau) - model.envelope(t_k + c[0] * tau)
    return -(df**2 / (25920.0 * model.mu)) * model.field_profile_deriv**2


@dataclass(frozen=True)
class MorseConfig:
    """Morse oscillator ``D (1 - exp(-alpha x))^2`` driven by ``A cos(omega t) x``."""

    depth: float = 0.2251
    alpha: float = 1.1741
    mu: float = 1745.0
    amplitude: float = 0.011025
    omega: float = 0.01787

    def __post_init__(self) -> None:
        if not (self.depth > 0 and self.alpha > 0 and self.mu > 0):
            raise ConfigurationError("Morse depth, width and mass must be positive")

    @property
    def w0(self) -> float:
        """Harmonic frequency ``alpha sqrt(2 D / mu)``."""
        return self.alpha * np.sqrt(2 * self.depth / self.mu)

    @property
    def gamma(self) -> float:
        return 2 * self.depth / self.w0

    @property
    def period(self) -> float:
        """Optical period of the driving field."""
        return 2 * np.pi / self.omega

    def ground_energy(self) -> float:
        w0 = self.w0
        return w0 / 2 - w0**2 / (16 * self.depth)


def morse_potential(cfg: MorseConfig, x) -> np.ndarray:
    return cfg.depth * (1 - np.exp(-cfg.alpha * np.asarray(x))) ** 2


def morse_ground_state(cfg: MorseConfig, grid: SpatialGrid) -> np.ndarray:
    """Unit-norm samples of the analytic Morse ground state."""
    g = cfg.gamma

    def log_phi(ax):
        return -(g - 0.5) * ax - g * np.exp(-ax)

    # scale by the peak value so the resolution check below is meaningful
    peak = log_phi(-np.log((g - 0.5) / g))
    phi = np.exp(log_phi(cfg.alpha * grid.x) - peak)
    # u_k = sqrt(dx) psi(x_k)
    u = np.sqrt(grid.dx) * phi
    if not np.linalg.norm(u) > 1e-8:
        raise DomainError("Morse ground state is not resolved on this grid")
    return normalize(u)


def walker_preston(cfg: MorseConfig, grid: SpatialGrid) -> PotentialModel:
    """Morse potential plus the dipole coupling ``f(t) x``."""
    return PotentialModel(
        grid=grid,
        static_part=morse_potential(cfg, grid.x),
        field_profile=grid.x.copy(),
        envelope=CosineField(cfg.amplitude, cfg.omega),
        mu=cfg.mu,
        field_profile_deriv=np.ones(grid.n_points),
    )
