"""Quadrature rules and the alpha-combination weights built on them.

Within one step of length ``tau`` the Hamiltonian is sampled at
``t_k + c_l tau``.  Three graded combinations of these samples,

    alpha_1 = tau (T + V(1/2))                         O(tau)
    alpha_2 = tau sqrt(15)/3 (V_3 - V_1)               O(tau^2)
    alpha_3 = tau 10/3 (V_3 - 2 V_2 + V_1)             O(tau^3)

(written for the three-node Gauss-Legendre rule) are enough to build
propagators up to order six.  For any other rule of order >= 6 the
sample-to-alpha map is ``W = G Q^{-1} Q~`` where ``Q`` holds the shifted
moments of the Gauss-Legendre rule and ``Q~`` those of the new rule.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError

SQRT15 = np.sqrt(15.0)

#: maps the three Gauss-Legendre samples (H_1, H_2, H_3) to (alpha_1, alpha_2, alpha_3) / tau
G = np.array(
    [
        [0.0, 1.0, 0.0],
        [-SQRT15 / 3, 0.0, SQRT15 / 3],
        [10.0 / 3, -20.0 / 3, 10.0 / 3],
    ]
)
G.setflags(write=False)


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Nodes in ``[0, 1]`` and weights of a rule on the unit interval."""

    nodes: np.ndarray
    weights: np.ndarray
    order: int
    name: str = "custom"

    def __post_init__(self) -> None:
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if nodes.ndim != 1 or nodes.shape != weights.shape or nodes.size == 0:
            raise ConfigurationError("nodes and weights must be equal-length 1-D arrays")
        if np.any(np.diff(nodes) <= 0):
            raise ConfigurationError("quadrature nodes must be strictly increasing")
        if nodes[0] < 0 or nodes[-1] > 1:
            raise ConfigurationError("quadrature nodes must lie in [0, 1]")
        if abs(weights.sum() - 1.0) > 1e-14:
            raise ConfigurationError(f"weights sum to {weights.sum()!r}, expected 1")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def __len__(self) -> int:
        return self.nodes.size

    def integrate(self, fn) -> float:
        return float(np.dot(self.weights, fn(self.nodes)))


def exactness_order(nodes, weights, max_degree: int = 30, rtol: float = 1e-12) -> int:
    """Order of a rule: one more than the highest degree it integrates exactly."""
    nodes = np.asarray(nodes, dtype=float)
    weights = np.asarray(weights, dtype=float)
    # shifted monomials keep the check well conditioned
    for d in range(max_degree + 1):
        exact = 0.0 if d % 2 else 2.0 * 0.5 ** (d + 1) / (d + 1)
        approx = np.dot(weights, (nodes - 0.5) ** d)
        if abs(approx - exact) > rtol * max(1.0, abs(exact)) + 1e-15:
            return d
    return max_degree + 1


def make_rule(nodes, weights, name: str = "custom") -> QuadratureRule:
    """Build a rule from user data, measuring its order of exactness."""
    order = exactness_order(nodes, weights)
    return QuadratureRule(nodes, weights, order, name)


def gl6() -> QuadratureRule:
    """Three-node Gauss-Legendre rule (order 6) on [0, 1]."""
    c = np.array([0.5 - SQRT15 / 10, 0.5, 0.5 + SQRT15 / 10])
    b = np.array([5.0, 8.0, 5.0]) / 18.0
    return QuadratureRule(c, b, 6, "gl6")


def gauss_legendre(n_nodes: int) -> QuadratureRule:
    if n_nodes == 3:
        return gl6()
    if not 3 <= n_nodes <= 5:
        raise ConfigurationError("only 3 to 5 Gauss-Legendre nodes are tabulated")
    x, w = np.polynomial.legendre.leggauss(n_nodes)
    return QuadratureRule((x + 1) / 2, w / 2, 2 * n_nodes, f"gl{2 * n_nodes}")


def gauss_lobatto(n_nodes: int) -> QuadratureRule:
    """Gauss-Lobatto rules with 4 (order 6) or 5 (order 8) nodes."""
    if n_nodes == 4:
        s = 1 / np.sqrt(5.0)
        x = np.array([-1.0, -s, s, 1.0])
        w = np.array([1.0, 5.0, 5.0, 1.0]) / 6.0
    elif n_nodes == 5:
        s = np.sqrt(3.0 / 7.0)
        x = np.array([-1.0, -s, 0.0, s, 1.0])
        w = np.array([9.0, 49.0, 64.0, 49.0, 9.0]) / 90.0
    else:
        raise ConfigurationError("only 4- and 5-node Gauss-Lobatto rules are tabulated")
    return QuadratureRule((x + 1) / 2, w / 2, 2 * n_nodes - 2, f"lobatto{2 * n_nodes - 2}")


RULES = {
    "gl6": gl6,
    "gl8": lambda: gauss_legendre(4),
    "gl10": lambda: gauss_legendre(5),
    "lobatto6": lambda: gauss_lobatto(4),
    "lobatto8": lambda: gauss_lobatto(5),
}


def named_rule(name: str) -> QuadratureRule:
    try:
        return RULES[name]()
    except KeyError:
        raise ConfigurationError(
            f"unknown quadrature rule {name!r}; choose from {sorted(RULES)}"
        ) from None


def moment_matrix(rule: QuadratureRule, n_moments: int = 3) -> np.ndarray:
    """``Q[i, l] = b_l (c_l - 1/2)^i`` for ``i = 0 .. n_moments-1``."""
    powers = np.arange(n_moments)[:, None]
    return rule.weights[None, :] * (rule.nodes[None, :] - 0.5) ** powers


def alpha_weights_for(rule: QuadratureRule) -> np.ndarray:
    """3 x k matrix mapping samples ``H(t_k + c_l tau)`` to ``alpha / tau``."""
    if rule.order < 6:
        raise ConfigurationError(f"rule {rule.name!r} has order {rule.order}; order >= 6 needed")
    ref = gl6()
    Q = moment_matrix(ref)
    Qt = moment_matrix(rule)
    return G @ np.linalg.solve(Q, Qt)


def combine(weights, samples) -> np.ndarray:
    """Weighted sum of sample vectors, ``sum_l w_l samples[l]``."""
    return np.tensordot(np.asarray(weights, dtype=float), np.asarray(samples), axes=1)
