"""Orthogonal families on the real line and the half line.

Every family is evaluated by its three-term recurrence, never by an explicit
power-form expansion. The ``*_table`` functions return all degrees
``0..n_max`` at once as arrays of shape ``x.shape + (n_max + 1,)`` so that a
trial function ``sum_i a_i f_i(x)`` is ``table @ a``; the ``*_eval`` functions
pick out a single degree.

Derivatives are always with respect to the physical coordinate and are
computed analytically through the chain rule.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError, ParameterError

__all__ = [
    "Family",
    "BasisSpec",
    "EvalTriple",
    "chebyshev_table",
    "chebyshev_eval",
    "rc_table",
    "rc_eval",
    "hermite_function_table",
    "hermite_function_eval",
    "logsinh_map",
    "inverse_map",
    "transformed_hermite_table",
    "transformed_hermite_eval",
]

# Arguments of the Chebyshev polynomials may overshoot [-1, 1] by rounding.
_Y_TOL = 1e-12
# Beyond this magnitude the overflow-safe branch of the log-sinh maps is used.
_MAP_SEAM = 30.0
# exp(-w**2 / 2) underflows to zero for w below this; the transformed Hermite
# functions and all their derivatives are then exactly zero.
_OMEGA_UNDERFLOW = -38.0


class Family(enum.Enum):
    RATIONAL_CHEBYSHEV = "rational_chebyshev"
    TRANSFORMED_HERMITE = "transformed_hermite"


@dataclass(frozen=True)
class BasisSpec:
    """Which orthogonal family to use and where to truncate it.

    ``L`` is the length scale of the algebraic map (rational Chebyshev only)
    and ``k`` the steepness of the log-sinh map (transformed Hermite only).
    """

    family: Family
    N: int
    L: float | None = None
    k: float | None = None

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise ParameterError(f"truncation degree must be an integer >= 1, got {self.N!r}")
        if self.family is Family.RATIONAL_CHEBYSHEV:
            if self.L is None or not self.L > 0:
                raise ParameterError(f"rational Chebyshev basis needs L > 0, got {self.L!r}")
        elif self.family is Family.TRANSFORMED_HERMITE:
            if self.k is None or not self.k > 0:
                raise ParameterError(f"transformed Hermite basis needs k > 0, got {self.k!r}")
        else:
            raise ParameterError(f"unknown basis family {self.family!r}")

    @classmethod
    def rational_chebyshev(cls, N: int, L: float = 1.0) -> "BasisSpec":
        return cls(Family.RATIONAL_CHEBYSHEV, N, L=float(L))

    @classmethod
    def transformed_hermite(cls, N: int, k: float = 0.5) -> "BasisSpec":
        return cls(Family.TRANSFORMED_HERMITE, N, k=float(k))


class EvalTriple(NamedTuple):
    """Value and first two derivatives of a basis function."""

    value: np.ndarray
    d1: np.ndarray
    d2: np.ndarray


def _check_degree(n):
    if int(n) != n or n < 0:
        raise ParameterError(f"degree must be a non-negative integer, got {n!r}")
    return int(n)


def _pick(table: EvalTriple, n: int) -> EvalTriple:
    return EvalTriple(table.value[..., n], table.d1[..., n], table.d2[..., n])


# -- Chebyshev polynomials ----------------------------------------------------


def chebyshev_table(n_max: int, y) -> EvalTriple:
    """T_n(y), T_n'(y), T_n''(y) for n = 0..n_max.

    The derivative recurrences follow from differentiating
    ``T_{n+1} = 2 y T_n - T_{n-1}`` once and twice; they stay accurate at the
    end points where the trigonometric form of the derivative is singular.
    """
    n_max = _check_degree(n_max)
    y = np.asarray(y, dtype=float)
    if np.any(np.abs(y) > 1.0 + _Y_TOL):
        raise DomainError("Chebyshev argument outside [-1, 1]")
    shape = y.shape + (n_max + 1,)
    T = np.empty(shape)
    D = np.empty(shape)
    D2 = np.empty(shape)
    T[..., 0] = 1.0
    D[..., 0] = 0.0
    D2[..., 0] = 0.0
    if n_max >= 1:
        T[..., 1] = y
        D[..., 1] = 1.0
        D2[..., 1] = 0.0
    for n in range(1, n_max):
        T[..., n + 1] = 2.0 * y * T[..., n] - T[..., n - 1]
        D[..., n + 1] = 2.0 * T[..., n] + 2.0 * y * D[..., n] - D[..., n - 1]
        D2[..., n + 1] = 4.0 * D[..., n] + 2.0 * y * D2[..., n] - D2[..., n - 1]
    return EvalTriple(T, D, D2)


def chebyshev_eval(n: int, y) -> EvalTriple:
    return _pick(chebyshev_table(n, y), _check_degree(n))


# -- Rational Chebyshev functions -----------------------------------------------


def rc_table(n_max: int, x, L: float) -> EvalTriple:
    """Rational Chebyshev functions R_n(x) = T_n((x - L)/(x + L)), n = 0..n_max.

    Parameters
    ----------
    n_max : int
        Highest degree.
    x : array_like
        Points on the half line, ``x >= 0``.
    L : float
        Map length scale; ``x = L`` is sent to the centre of [-1, 1].
    """
    if not L > 0:
        raise ParameterError(f"map length L must be positive, got {L!r}")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("rational Chebyshev functions are defined for x >= 0")
    s = x + L
    y = (x - L) / s
    dy = 2.0 * L / s**2
    d2y = -4.0 * L / s**3
    T = chebyshev_table(n_max, np.clip(y, -1.0, 1.0))
    dy = dy[..., None]
    d2y = d2y[..., None]
    return EvalTriple(T.value, T.d1 * dy, T.d2 * dy**2 + T.d1 * d2y)


def rc_eval(n: int, x, L: float) -> EvalTriple:
    return _pick(rc_table(n, x, L), _check_degree(n))


# -- Hermite functions -----------------------------------------------------------


def hermite_function_table(n_max: int, x) -> EvalTriple:
    """Normalized Hermite functions ``exp(-x^2/2) H_n(x) / sqrt(2^n n!)``.

    The Gaussian factor is folded into the starting values so no factorial or
    power of two is ever formed. Derivatives use
    ``H'_n = sqrt(2n) H_{n-1} - x H_n`` and its derivative.
    """
    n_max = _check_degree(n_max)
    x = np.asarray(x, dtype=float)
    shape = x.shape + (n_max + 1,)
    H = np.empty(shape)
    H[..., 0] = np.exp(-0.5 * x * x)
    if n_max >= 1:
        H[..., 1] = math.sqrt(2.0) * x * H[..., 0]
    for n in range(1, n_max):
        H[..., n + 1] = (
            x * math.sqrt(2.0 / (n + 1)) * H[..., n] - math.sqrt(n / (n + 1)) * H[..., n - 1]
        )
    xs = x[..., None]
    root = np.sqrt(2.0 * np.arange(n_max + 1))
    D = -xs * H
    D[..., 1:] += root[1:] * H[..., :-1]
    D2 = -H - xs * D
    D2[..., 1:] += root[1:] * D[..., :-1]
    return EvalTriple(H, D, D2)


def hermite_function_eval(n: int, x) -> EvalTriple:
    return _pick(hermite_function_table(n, x), _check_degree(n))


# -- log-sinh map ---------------------------------------------------------------


def logsinh_map(z, k: float):
    """ln(sinh(k z)), sending (0, inf) onto the whole real line."""
    if not k > 0:
        raise ParameterError(f"map steepness k must be positive, got {k!r}")
    z = np.asarray(z, dtype=float)
    if np.any(z <= 0):
        raise DomainError("log-sinh map is singular for z <= 0")
    kz = k * z
    big = kz > _MAP_SEAM
    with np.errstate(over="ignore"):
        naive = np.log(np.sinh(np.where(big, 1.0, kz)))
    kz_big = np.maximum(kz, _MAP_SEAM)
    safe = kz_big + np.log1p(-np.exp(-2.0 * kz_big)) - math.log(2.0)
    out = np.where(big, safe, naive)
    return out[()] if out.ndim == 0 else out


def inverse_map(omega, k: float):
    """Inverse of :func:`logsinh_map`: ``asinh(exp(omega)) / k``."""
    if not k > 0:
        raise ParameterError(f"map steepness k must be positive, got {k!r}")
    omega = np.asarray(omega, dtype=float)
    big = omega > _MAP_SEAM
    w_small = np.where(big, 0.0, omega)
    w_big = np.where(big, omega, _MAP_SEAM)
    # asinh(e^w) = w + ln(1 + sqrt(1 + e^{-2w})) for large w; direct form otherwise
    # (asinh is accurate near 0, so w << 0 gives e^w / k without cancellation).
    small = np.arcsinh(np.exp(w_small))
    large = w_big + np.log1p(np.sqrt(1.0 + np.exp(-2.0 * w_big)))
    out = np.where(big, large, small) / k
    return out[()] if out.ndim == 0 else out


# -- transformed Hermite functions ----------------------------------------------------


def transformed_hermite_table(n_max: int, x, k: float) -> EvalTriple:
    """Hermite functions composed with the log-sinh map, on x > 0."""
    x = np.asarray(x, dtype=float)
    omega = logsinh_map(x, k)
    H = hermite_function_table(n_max, omega)
    kx = k * x
    with np.errstate(over="ignore"):
        dphi = k / np.tanh(kx)
        d2phi = -((k / np.sinh(kx)) ** 2)
    dphi = dphi[..., None]
    d2phi = d2phi[..., None]
    with np.errstate(invalid="ignore", over="ignore"):
        d1 = H.d1 * dphi
        d2 = H.d2 * dphi**2 + H.d1 * d2phi
    dead = (omega < _OMEGA_UNDERFLOW)[..., None]
    if np.any(dead):
        d1 = np.where(dead, 0.0, d1)
        d2 = np.where(dead, 0.0, d2)
    return EvalTriple(H.value, d1, d2)


def transformed_hermite_eval(n: int, x, k: float) -> EvalTriple:
    return _pick(transformed_hermite_table(n, x, k), _check_degree(n))
