"""Dense-matrix reference machinery for small grids.

Everything here works with explicit ``n x n`` matrices and full
eigendecompositions, independently of the Krylov and FFT fast paths.
Hermitian "generators" ``K`` stand for anti-Hermitian Magnus terms
``Omega = -i K``, so ``exp(Omega) u = dense_expm_action(K, u, 1)``.
"""
from __future__ import annotations

import numpy as np

from .errors import ConfigurationError, ReferenceMismatch
from .krylov import KrylovConfig
from .quadrature import QuadratureRule, alpha_weights_for, gl6
from .schemes import SchemeTable, builtin_scheme, step
from .spectral import SpatialGrid, apply_kinetic

DENSE_LIMIT = 512


class DenseHermitian(np.ndarray):
    """Square complex matrix checked to be Hermitian on construction."""

    def __new__(cls, matrix, atol: float = 1e-12):
        a = np.asarray(matrix, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ConfigurationError("dense operator must be a square matrix")
        scale = max(1.0, float(np.abs(a).max(initial=0.0)))
        if not np.allclose(a, a.conj().T, atol=atol * scale, rtol=0):
            raise ConfigurationError("matrix is not Hermitian")
        return a.view(cls)


def dense_kinetic(grid: SpatialGrid, mu: float) -> np.ndarray:
    """Kinetic matrix assembled column by column from the spectral operator."""
    n = grid.n_points
    if n > DENSE_LIMIT:
        raise ConfigurationError(f"dense matrices limited to {DENSE_LIMIT} points")
    eye = np.eye(n, dtype=complex)
    return np.column_stack([apply_kinetic(eye[:, j], grid, mu) for j in range(n)])


def dense_hamiltonian(model, t: float, kinetic: np.ndarray | None = None) -> DenseHermitian:
    T = dense_kinetic(model.grid, model.mu) if kinetic is None else kinetic
    return DenseHermitian(T + np.diag(model.potential_at(t)), atol=1e-11)


def dense_expm_action(H, u, tau: float = 1.0) -> np.ndarray:
    """``exp(-i tau H) u`` by full eigendecomposition."""
    H = DenseHermitian(H, atol=1e-10)
    if H.shape[0] > DENSE_LIMIT:
        raise ConfigurationError(f"dense matrices limited to {DENSE_LIMIT} points")
    w, Q = np.linalg.eigh(np.asarray(H))
    return Q @ (np.exp(-1j * tau * w) * (Q.conj().T @ u))


def commutator(a, b) -> np.ndarray:
    a = np.asarray(a)
    b = np.asarray(b)
    return a @ b - b @ a


def dense_alphas(model, t_k: float, tau: float, rule: QuadratureRule | None = None, kinetic=None):
    """Hermitian parts ``h_i`` of the alpha combinations (``alpha_i = -i h_i``)."""
    rule = gl6() if rule is None else rule
    T = dense_kinetic(model.grid, model.mu) if kinetic is None else kinetic
    W = alpha_weights_for(rule)
    V = np.array([model.potential_at(t_k + c * tau) for c in rule.nodes])
    h1 = tau * (T + np.diag(W[0] @ V))
    h2 = tau * np.diag(W[1] @ V).astype(complex)
    h3 = tau * np.diag(W[2] @ V).astype(complex)
    return h1, h2, h3


def magnus_terms(model, t_k: float, tau: float, rule: QuadratureRule | None = None, kinetic=None) -> dict:
    """Anti-Hermitian building blocks of the sixth-order Magnus truncation."""
    h1, h2, h3 = dense_alphas(model, t_k, tau, rule, kinetic)
    a1, a2, a3 = -1j * h1, -1j * h2, -1j * h3
    c12 = commutator(a1, a2)
    return {
        "1": a1,
        "2": a2,
        "3": a3,
        "12": c12,
        "113": commutator(a1, commutator(a1, a3)),
        "212": commutator(a2, c12),
        "1112": commutator(a1, commutator(a1, c12)),
    }


def as_generator(omega) -> DenseHermitian:
    """Hermitian ``K`` with ``omega = -i K``."""
    return DenseHermitian(1j * np.asarray(omega), atol=1e-10)


def magnus6_generator(model, t_k: float, tau: float, grid: SpatialGrid | None = None, kinetic=None):
    """Sixth-order Magnus exponent as a Hermitian generator.

    ``Omega6 = a1 + a3/12 - [12]/12 + [113]/360 - [212]/240 + [1112]/720``.
    """
    if model.grid.n_points > 256:
        raise ConfigurationError("dense Magnus generator limited to 256 points")
    m = magnus_terms(model, t_k, tau, kinetic=kinetic)
    omega = m["1"] + m["3"] / 12 - m["12"] / 12 + m["113"] / 360 - m["212"] / 240 + m["1112"] / 720
    return as_generator(omega)


def nested_212(model, t_k: float, tau: float, kinetic=None) -> DenseHermitian:
    """Hermitian form of ``[a2, [a1, a2]]``."""
    return as_generator(magnus_terms(model, t_k, tau, kinetic=kinetic)["212"])


def magnus_reference_step(model, u, t_k: float, tau: float, substeps: int = 64, kinetic=None):
    """Dense ``exp(Omega6)`` applied over ``substeps`` equal substeps."""
    T = dense_kinetic(model.grid, model.mu) if kinetic is None else kinetic
    h = tau / substeps
    for j in range(substeps):
        u = dense_expm_action(magnus6_generator(model, t_k + j * h, h, kinetic=T), u)
    return u


def reference_step(model, u, t_k: float, tau: float, substeps: int = 64, agree: float = 1e-12, kinetic=None):
    """Exact one-step evolution from two independent substepped references.

    ``cf6-3`` with tight Krylov tolerance and the dense sixth-order Magnus
    exponential must agree to ``agree``; otherwise :class:`ReferenceMismatch`.
    """
    dense = magnus_reference_step(model, u, t_k, tau, substeps, kinetic)
    kcfg = KrylovConfig(1e-16, 40)
    cf = builtin_scheme("cf6-3")
    h = tau / substeps
    v = np.asarray(u, dtype=complex)
    for j in range(substeps):
        v = step(cf, v, t_k + j * h, h, model, kcfg)
    gap = float(np.linalg.norm(dense - v))
    if gap > agree:
        raise ReferenceMismatch(f"one-step references disagree by {gap:.3e} (tau={tau:g})")
    return dense


def fit_slope(taus, errors, floor: float = 1e-13):
    """Least-squares slope of log error against log tau, skipping points below ``floor``."""
    taus = np.asarray(taus, dtype=float)
    errors = np.asarray(errors, dtype=float)
    keep = errors >= floor
    if keep.sum() < 2:
        raise ConfigurationError("fewer than two errors above the floor")
    return float(np.polyfit(np.log(taus[keep]), np.log(errors[keep]), 1)[0])


def local_errors(
    scheme: SchemeTable,
    model,
    t_k: float,
    tau_list,
    u=None,
    kcfg: KrylovConfig = KrylovConfig(1e-15, 60),
    substeps: int = 64,
    centered: bool = False,
):
    """One-step errors of ``scheme`` against :func:`reference_step`.

    With ``centered`` every step covers ``[t_k - tau/2, t_k + tau/2]``, so
    the step midpoint does not drift with ``tau`` and the fitted slope is
    not polluted by the time dependence of the error constant.
    """
    taus = [float(t) for t in tau_list]
    if len(taus) < 3:
        raise ConfigurationError("need at least three step sizes")
    T = dense_kinetic(model.grid, model.mu)
    if u is None:
        # instantaneous ground state of H(t_k)
        u = np.linalg.eigh(np.asarray(dense_hamiltonian(model, t_k, T)))[1][:, 0]
    errs = []
    for tau in taus:
        t0 = t_k - tau / 2 if centered else t_k
        ref = reference_step(model, u, t0, tau, substeps, kinetic=T)
        errs.append(float(np.linalg.norm(step(scheme, u, t0, tau, model, kcfg) - ref)))
    return np.array(taus), np.array(errs)


def local_order(
    scheme,
    model,
    t_k: float,
    tau_list,
    u=None,
    kcfg: KrylovConfig = KrylovConfig(1e-15, 60),
    centered: bool = False,
) -> float:
    """Measured exponent of the one-step error (order + 1 for an order-p scheme)."""
    taus, errs = local_errors(scheme, model, t_k, tau_list, u, kcfg, centered=centered)
    return fit_slope(taus, errs)


def cf42_defect_errors(model, t_k: float, tau_list, u, z: float = 1 / 21600,
                       kcfg: KrylovConfig = KrylovConfig(1e-15, 60), centered: bool = False):
    """Distance between a ``cf4-2`` step and dense ``exp(Omega6 - z [212])``."""
    scheme = builtin_scheme("cf4-2")
    T = dense_kinetic(model.grid, model.mu)
    errs = []
    for tau in tau_list:
        t0 = t_k - tau / 2 if centered else t_k
        m = magnus_terms(model, t0, tau, kinetic=T)
        omega = m["1"] + m["3"] / 12 - m["12"] / 12 + m["113"] / 360 - m["212"] / 240 + m["1112"] / 720
        target = dense_expm_action(as_generator(omega - z * m["212"]), u)
        errs.append(float(np.linalg.norm(step(scheme, u, t0, tau, model, kcfg) - target)))
    return np.asarray(tau_list, dtype=float), np.array(errs)
