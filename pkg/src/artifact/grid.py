"""Spatial grid, soliton profiles and trapezoid quadrature."""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConfigError

SQRT2 = np.sqrt(2.0)
LN2 = np.log(2.0)


@dataclass(frozen=True)
class GridSpec:
    """Uniform symmetric grid on [-L, L] with n nodes."""

    L: float
    n: int

    @property
    def h(self):
        return 2.0 * self.L / (self.n - 1)

    @cached_property
    def y(self):
        # integer offsets from the centre keep the nodes exactly antisymmetric
        y = (np.arange(self.n) - (self.n - 1) / 2.0) * self.h
        y.flags.writeable = False
        return y

    @property
    def interior(self):
        return slice(1, self.n - 1)

    def refined(self):
        """Grid with the spacing halved (n -> 2n - 1)."""
        return GridSpec(self.L, 2 * self.n - 1)

    def widened(self, factor=1.5):
        """Grid on [-factor L, factor L] with the same spacing."""
        cells = (self.n - 1) * factor
        if abs(cells - round(cells)) > 1e-9:
            raise ConfigError(f"cannot widen n={self.n} by {factor} at fixed spacing")
        return GridSpec(self.L * factor, int(round(cells)) + 1)


def build_grid(L, n):
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise ConfigError(f"n must be an integer, got {n!r}", "grid.n")
    if n < 8:
        raise ConfigError(f"n must be at least 8, got {n}", "grid.n")
    if not np.isfinite(L) or L <= 0:
        raise ConfigError(f"L must be positive, got {L}", "grid.L")
    return GridSpec(float(L), int(n))


@dataclass(frozen=True)
class SolitonProfiles:
    q: np.ndarray
    q_prime: np.ndarray
    q_second: np.ndarray
    y_q: np.ndarray
    lambda_q: np.ndarray
    q_squared: np.ndarray
    h_aux: np.ndarray


def q_exact(y):
    return SQRT2 / np.cosh(y)


def one_minus_tanh_abs(y):
    """1 - tanh|y| without cancellation for large |y|."""
    e = np.exp(-2.0 * np.abs(y))
    return 2.0 * e / (1.0 + e)


def h_closed_form(y):
    """Auxiliary function h = (1/Q)(3 ln 2 - 2 ln Q + 2 y Q'/Q).

    Rewritten as cosh(y)/sqrt2 * [2|y|(1 - tanh|y|) + 2 log1p(exp(-2|y|))]
    so that both factors stay finite and positive for all y.
    """
    a = np.abs(y)
    bracket = 2.0 * a * one_minus_tanh_abs(a) + 2.0 * np.log1p(np.exp(-2.0 * a))
    return np.cosh(y) / SQRT2 * bracket


def soliton_profiles(g):
    y = g.y
    q = q_exact(y)
    t = np.tanh(y)
    qp = -q * t
    q2 = q * q
    qs = q - q2 * q
    return SolitonProfiles(
        q=q,
        q_prime=qp,
        q_second=qs,
        y_q=y * q,
        lambda_q=0.5 * (q + y * qp),
        q_squared=q2,
        h_aux=h_closed_form(y),
    )


def h_profile(g):
    return h_closed_form(g.y)


def trapezoid(f, g):
    return float(np.trapezoid(f, dx=g.h))


def weighted_dot(f, g2, g, weight=None):
    """Trapezoid approximation of the integral of f * g2 * weight."""
    f = np.asarray(f)
    g2 = np.asarray(g2)
    if f.shape != (g.n,) or g2.shape != (g.n,):
        raise ValueError(f"vectors must have length {g.n}, got {f.shape} and {g2.shape}")
    prod = f * g2
    if weight is not None:
        weight = np.asarray(weight)
        if weight.shape != (g.n,):
            raise ValueError(f"weight must have length {g.n}, got {weight.shape}")
        prod = prod * weight
    return trapezoid(prod, g)
