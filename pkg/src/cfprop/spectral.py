"""Periodic Fourier-spectral grid and kinetic-energy operator.

Transforms follow the numpy convention: forward unnormalized, inverse
carries 1/N.  Every transform can be charged to an :class:`FFTCounter`;
one forward plus one inverse transform is one unit of cost.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import ConfigurationError


class FFTCounter:
    """Counts complex-to-complex transforms in units of forward/inverse pairs."""

    __slots__ = ("halves",)

    def __init__(self) -> None:
        self.halves = 0

    @property
    def pairs(self) -> float:
        return self.halves / 2

    def charge_pairs(self, n: int = 1) -> None:
        self.halves += 2 * n

    def reset(self) -> None:
        self.halves = 0

    def __repr__(self) -> str:
        return f"FFTCounter(pairs={self.pairs:g})"


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform periodic grid on ``[x0, xN)`` with ``n_points`` nodes."""

    x0: float
    xN: float
    n_points: int
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        n = self.n_points
        if not isinstance(n, (int, np.integer)) or n < 4 or n & (n - 1):
            raise ConfigurationError(f"n_points must be a power of two >= 4, got {n!r}")
        if not self.xN > self.x0:
            raise ConfigurationError("grid requires xN > x0")

    @property
    def length(self) -> float:
        return self.xN - self.x0

    @property
    def dx(self) -> float:
        return self.length / self.n_points

    @cached_property
    def x(self) -> np.ndarray:
        x = self.x0 + self.dx * np.arange(self.n_points)
        x.setflags(write=False)
        return x

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        # layout [0..N/2-1, -N/2..-1]; the Nyquist mode gets k = -pi N / L
        k = 2 * np.pi * np.fft.fftfreq(self.n_points, d=self.dx)
        k.setflags(write=False)
        return k

    def kinetic_symbol(self, mu: float) -> np.ndarray:
        """Diagonal of the kinetic operator in frequency space, k^2 / (2 mu)."""
        if not mu > 0:
            raise ConfigurationError(f"mass must be positive, got {mu!r}")
        key = ("kinetic", float(mu))
        sym = self._cache.get(key)
        if sym is None:
            sym = self.wavenumbers**2 / (2.0 * mu)
            sym.setflags(write=False)
            self._cache[key] = sym
        return sym

    def check(self, u: np.ndarray) -> None:
        if np.shape(u) != (self.n_points,):
            raise ConfigurationError(
                f"vector of shape {np.shape(u)} does not match grid of {self.n_points} points"
            )


def to_frequency(u, grid: SpatialGrid, counter: FFTCounter | None = None) -> np.ndarray:
    grid.check(u)
    if counter is not None:
        counter.halves += 1
    return np.fft.fft(u)


def from_frequency(uh, grid: SpatialGrid, counter: FFTCounter | None = None) -> np.ndarray:
    grid.check(uh)
    if counter is not None:
        counter.halves += 1
    return np.fft.ifft(uh)


def apply_kinetic(u, grid: SpatialGrid, mu: float, counter: FFTCounter | None = None) -> np.ndarray:
    """Return ``T u`` with ``T = -1/(2 mu) d^2/dx^2`` applied spectrally (one FFT pair)."""
    sym = grid.kinetic_symbol(mu)
    return from_frequency(sym * to_frequency(u, grid, counter), grid, counter)


def spectral_derivative(f, grid: SpatialGrid, counter: FFTCounter | None = None) -> np.ndarray:
    """First derivative of a real periodic sample vector (one FFT pair).

    The Nyquist coefficient is dropped so the derivative of a real
    function stays real.
    """
    k = grid.wavenumbers.copy()
    k[grid.n_points // 2] = 0.0
    fh = to_frequency(np.asarray(f, dtype=complex), grid, counter)
    return from_frequency(1j * k * fh, grid, counter).real


def normalize(u) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    nrm = np.linalg.norm(u)
    if not np.isfinite(nrm) or nrm == 0:
        raise ConfigurationError("cannot normalize a zero or non-finite vector")
    return u / nrm
