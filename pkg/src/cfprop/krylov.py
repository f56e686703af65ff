"""Lanczos approximation of ``exp(-i tau H) u`` for Hermitian ``H``.

The operator is only accessed through its action ``v -> H v``.  The
Krylov space is grown one vector at a time until the a-posteriori
estimate

    err = beta_{m+1} (2/3 |e_m^T exp(-i T_m / 2) e_1| + 1/6 |e_m^T exp(-i T_m) e_1|)

drops below the tolerance or the dimension cap is reached.  ``T_m`` is
built from ``tau H``, so the small exponentials carry no extra ``tau``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigurationError

#: below this residual norm the Krylov space is invariant
BREAKDOWN = 1e-14


@dataclass(frozen=True)
class KrylovConfig:
    tol: float = 1e-12
    m_max: int = 10

    def __post_init__(self) -> None:
        if not self.tol > 0:
            raise ConfigurationError(f"Krylov tolerance must be positive, got {self.tol!r}")
        if self.m_max < 2:
            raise ConfigurationError(f"m_max must be at least 2, got {self.m_max!r}")


@dataclass
class TridiagonalSystem:
    """State of a Lanczos run.

    ``vectors`` holds ``v_1 .. v_{m+1}`` (the last one is the pending
    direction, absent after a happy breakdown); ``diag`` and ``offdiag``
    hold ``alpha_1..alpha_m`` and ``beta_2..beta_m``.
    """

    vectors: list
    diag: list = field(default_factory=list)
    offdiag: list = field(default_factory=list)
    beta_next: float = 0.0
    exact: bool = False

    @classmethod
    def start(cls, u: np.ndarray) -> "TridiagonalSystem":
        return cls(vectors=[np.asarray(u, dtype=complex)])

    @property
    def dim(self) -> int:
        return len(self.diag)

    @property
    def basis(self) -> np.ndarray:
        """The ``m`` orthonormal basis vectors as rows."""
        return np.array(self.vectors[: self.dim])

    def matrix(self) -> np.ndarray:
        m = self.dim
        T = np.diag(np.asarray(self.diag, dtype=float))
        if m > 1:
            off = np.asarray(self.offdiag, dtype=float)
            T[np.arange(1, m), np.arange(m - 1)] = off
            T[np.arange(m - 1), np.arange(1, m)] = off
        return T


def lanczos_step_expand(
    apply_H: Callable[[np.ndarray], np.ndarray], tau: float, system: TridiagonalSystem
) -> TridiagonalSystem:
    """Add one Lanczos vector (in place) and return the system."""
    if system.exact:
        raise ConfigurationError("Krylov space already invariant; nothing to expand")
    m = system.dim
    v = system.vectors[m]
    y = tau * apply_H(v)
    if m > 0:
        y = y - system.beta_next * system.vectors[m - 1]
        system.offdiag.append(system.beta_next)
    # H is Hermitian: the imaginary part of <v, Hv> is round-off
    alpha = np.vdot(v, y).real
    y = y - alpha * v
    beta = float(np.linalg.norm(y))
    system.diag.append(alpha)
    if beta < BREAKDOWN:
        system.beta_next = 0.0
        system.exact = True
    else:
        system.beta_next = beta
        system.vectors.append(y / beta)
    return system


def _small_propagators(T: np.ndarray):
    """First columns of ``exp(-i T)`` and ``exp(-i T / 2)``."""
    w, Q = np.linalg.eigh(T)
    q0 = Q[0]
    full = Q @ (np.exp(-1j * w) * q0)
    half = Q @ (np.exp(-0.5j * w) * q0)
    return full, half


def krylov_error_estimate(system: TridiagonalSystem, tau: float | None = None) -> float:
    """A-posteriori error of the current Krylov approximation.

    ``tau`` is accepted for symmetry with the other entry points; it is
    already folded into the tridiagonal matrix.
    """
    if system.dim < 1:
        raise ConfigurationError("error estimate needs at least one Lanczos step")
    if system.exact or system.beta_next == 0.0:
        return 0.0
    full, half = _small_propagators(system.matrix())
    return system.beta_next * (2 / 3 * abs(half[-1]) + 1 / 6 * abs(full[-1]))


@dataclass
class KrylovStats:
    m_used: int
    est_err: float
    converged: bool


def expm_action(
    apply_H: Callable[[np.ndarray], np.ndarray],
    u: np.ndarray,
    tau: float,
    cfg: KrylovConfig = KrylovConfig(),
) -> tuple[np.ndarray, KrylovStats]:
    """Approximate ``exp(-i tau H) u`` in the smallest Krylov space meeting ``cfg.tol``.

    Returns the vector and a :class:`KrylovStats`; ``converged`` is False
    when the estimate is still above ``tol`` at ``m_max``.
    """
    u = np.asarray(u, dtype=complex)
    scale = float(np.linalg.norm(u))
    if scale == 0.0:
        return np.zeros_like(u), KrylovStats(0, 0.0, True)
    system = TridiagonalSystem.start(u / scale)
    err = np.inf
    while True:
        lanczos_step_expand(apply_H, tau, system)
        m = system.dim
        T = system.matrix()
        w, Q = np.linalg.eigh(T)
        q0 = Q[0]
        coeffs = Q @ (np.exp(-1j * w) * q0)
        if system.exact:
            err = 0.0
        else:
            half_last = Q[-1] @ (np.exp(-0.5j * w) * q0)
            err = system.beta_next * (2 / 3 * abs(half_last) + 1 / 6 * abs(coeffs[-1]))
        if err < cfg.tol or m >= cfg.m_max:
            break
    out = scale * (coeffs @ np.array(system.vectors[:m]))
    return out, KrylovStats(m, float(err), bool(err < cfg.tol))
