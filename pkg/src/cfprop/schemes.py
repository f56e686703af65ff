"""Commutator-free exponential propagators for ``H(t) = T + V(x, t)``.

A scheme is a product of exponentials ``exp(-i tau H~_j)`` with

    H~_j = a_j T + sum_l w_{j,l} V(t_k + c_l tau)  [+ m_j tau^2 V~].

Stages with ``a_j = 0`` are diagonal in coordinate space and cost no
FFTs; the others are applied with the Lanczos propagator.  Tables are
stored as coefficients of (alpha_1, alpha_2, alpha_3) and lowered to
sample weights for the chosen quadrature rule.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, CapabilityError
from .krylov import KrylovConfig, expm_action
from .model import modified_potential
from .quadrature import G, QuadratureRule, SQRT15, alpha_weights_for, combine, gl6
from .spectral import FFTCounter, apply_kinetic


@dataclass(frozen=True)
class Stage:
    kinetic_coeff: float
    potential_weights: tuple
    modified_weight: float = 0.0

    @property
    def diagonal(self) -> bool:
        return self.kinetic_coeff == 0.0


@dataclass(frozen=True)
class SchemeTable:
    """Stages in application order: ``stages[0]`` acts first on the state."""

    name: str
    order: int
    stages: tuple
    x_coeffs: np.ndarray = field(repr=False, compare=False)
    quadrature: QuadratureRule = field(repr=False, compare=False)
    requires_derivative: bool = False

    @property
    def n_kinetic(self) -> int:
        return sum(not s.diagonal for s in self.stages)

    def is_time_symmetric(self, tol: float = 1e-12) -> bool:
        """``x_{m+1-i, j} = (-1)^{j+1} x_{i, j}`` for every stage."""
        x = self.x_coeffs
        signs = np.array([1.0, -1.0, 1.0])
        mods = np.array([s.modified_weight for s in self.stages])
        return bool(np.allclose(x[::-1], x * signs, atol=tol, rtol=0) and np.allclose(mods[::-1], mods))


def lower(x_coeffs, rule: QuadratureRule, modified=None) -> tuple:
    """Turn alpha-space rows into stages for the given quadrature rule."""
    x = np.asarray(x_coeffs, dtype=float)
    W = alpha_weights_for(rule)
    weights = x @ W
    mods = np.zeros(len(x)) if modified is None else np.asarray(modified, dtype=float)
    stages = []
    for xi, wi, mi in zip(x, weights, mods):
        # alpha_2 and alpha_3 rows of W sum to zero, so the kinetic part is x_{i,1}
        a = float(xi[0])
        stages.append(Stage(a, tuple(float(v) for v in wi), float(mi)))
    return tuple(stages)


def to_alpha_space(sample_rows) -> np.ndarray:
    """Inverse of lowering for Gauss-Legendre sample weights: ``x = a G^{-1}``."""
    return np.linalg.solve(G.T, np.asarray(sample_rows, dtype=float).T).T


# fourth order, two kinetic exponentials
_X_CF42 = np.array(
    [
        [0.0, -1 / 60, 1 / 60],
        [1 / 2, -2 / 15, 1 / 40],
        [1 / 2, 2 / 15, 1 / 40],
        [0.0, 1 / 60, 1 / 60],
    ]
)

CF42_A = {
    (1, 1): (10 + SQRT15) / 180,
    (1, 2): -1 / 9,
    (1, 3): (10 - SQRT15) / 180,
    (2, 1): (15 + 8 * SQRT15) / 90,
    (2, 2): 2 / 3,
    (2, 3): (15 - 8 * SQRT15) / 90,
}

# sixth order, three kinetic exponentials, no derivatives
CF63_A2 = 0.56704071886547742757
CF63_A3 = -0.13408143773095485515
_A11 = 0.01994096265093610745
_A21, _A22, _A23 = 0.4882524910228221957, -0.0046136830175630621, 0.0834019108602182940
_A31, _A32 = -0.29387662410526271191, 0.4536718104795705687
_A_CF63 = np.array(
    [
        [_A11, 0.0, -_A11],
        [_A21, _A22, _A23],
        [_A31, _A32, _A31],
        [_A23, _A22, _A21],
        [-_A11, 0.0, _A11],
    ]
)

# sixth order, five exponentials (reference method of the comparison)
_CF65_TOP = np.array(
    [
        [0.203952578716323, -0.059581898090478, 0.015629319374155],
        [0.133906069544898, 0.314511533222506, -0.060893550742092],
        [-0.014816639115506, -0.065414825819611, -0.014816639115506],
    ]
)
_A_CF65 = np.vstack([_CF65_TOP, _CF65_TOP[1::-1, ::-1]])

_MIDPOINT = np.array([[1.0, 0.0, 0.0]])
_MIDPOINT_AVG = np.array([[1.0, 0.0, 1 / 12]])

_TABLES = {
    "midpoint": (2, _MIDPOINT, None),
    "midpoint-avg": (2, _MIDPOINT_AVG, None),
    "cf4-2": (4, _X_CF42, None),
    "cf6-2d": (6, _X_CF42, [1.0, 0.0, 0.0, 1.0]),
    "cf6-3": (6, to_alpha_space(_A_CF63), None),
    "cf6-5alv": (6, to_alpha_space(_A_CF65), None),
}

SCHEME_NAMES = tuple(_TABLES)


def builtin_scheme(name: str, rule: QuadratureRule | None = None) -> SchemeTable:
    try:
        order, x, mods = _TABLES[name]
    except KeyError:
        raise ConfigurationError(f"unknown scheme {name!r}; choose from {list(SCHEME_NAMES)}") from None
    rule = gl6() if rule is None else rule
    return SchemeTable(
        name=name,
        order=order,
        stages=lower(x, rule, mods),
        x_coeffs=x.copy(),
        quadrature=rule,
        requires_derivative=mods is not None,
    )


@dataclass
class StepStats:
    krylov_dims: list = field(default_factory=list)
    capped: int = 0
    max_est_err: float = 0.0

    def add(self, ks) -> None:
        self.krylov_dims.append(ks.m_used)
        if not ks.converged:
            self.capped += 1
        self.max_est_err = max(self.max_est_err, ks.est_err)


def step(
    scheme: SchemeTable,
    u: np.ndarray,
    t_k: float,
    tau: float,
    model,
    kcfg: KrylovConfig = KrylovConfig(),
    counter: FFTCounter | None = None,
    stats: StepStats | None = None,
) -> np.ndarray:
    """Advance ``u`` from ``t_k`` to ``t_k + tau``.

    A negative ``tau`` runs the scheme backwards in time; for time
    symmetric schemes this is the exact inverse of the forward step.
    """
    if tau == 0:
        raise ConfigurationError("time step must be nonzero")
    grid = model.grid
    mu = model.mu
    samples = [model.potential_at(t_k + c * tau) for c in scheme.quadrature.nodes]
    vmod = None
    if scheme.requires_derivative:
        if not model.has_derivative:
            raise CapabilityError(f"scheme {scheme.name!r} needs potential derivatives")
        vmod = modified_potential(model, t_k, tau, scheme.quadrature, counter)
    for st in scheme.stages:
        diag = combine(st.potential_weights, samples)
        if st.modified_weight:
            diag = diag + st.modified_weight * tau**2 * vmod
        if st.diagonal:
            u = np.exp(-1j * tau * diag) * u
            continue
        a = st.kinetic_coeff

        def apply_H(v, a=a, diag=diag):
            return a * apply_kinetic(v, grid, mu, counter) + diag * v

        u, ks = expm_action(apply_H, u, tau, kcfg)
        if stats is not None:
            stats.add(ks)
    return u


def propagate(
    scheme: SchemeTable,
    u0: np.ndarray,
    t0: float,
    t_f: float,
    n_steps: int,
    model,
    kcfg: KrylovConfig = KrylovConfig(),
    stats: StepStats | None = None,
) -> tuple[np.ndarray, float]:
    """Uniform stepping from ``t0`` to ``t_f``; returns the state and FFT-pair count."""
    if n_steps < 1:
        raise ConfigurationError("n_steps must be at least 1")
    model.grid.check(u0)
    tau = (t_f - t0) / n_steps
    counter = FFTCounter()
    u = np.asarray(u0, dtype=complex)
    for k in range(n_steps):
        u = step(scheme, u, t0 + k * tau, tau, model, kcfg, counter, stats)
    return u, counter.pairs
