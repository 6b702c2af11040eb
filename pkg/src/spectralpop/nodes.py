"""Collocation grids on the half line and Hermite-Gauss quadrature."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal

from .basis import BasisSpec, hermite_function_table, inverse_map
from .errors import NumericError, ParameterError

__all__ = [
    "CollocationGrid",
    "chebyshev_gauss_radau",
    "rc_radau_grid",
    "hermite_gauss",
    "transformed_hermite_grid",
]


@dataclass(frozen=True, eq=False)
class CollocationGrid:
    """Strictly increasing abscissae, with weights for Gauss-Hermite grids.

    ``weights`` (when present) are the Hermite-*function* weights: they
    integrate ``f`` directly, ``int f dx ~ sum w_j f(x_j)``, for ``f`` of the
    form ``exp(-x^2) * polynomial``. Classical Gauss-Hermite weights are
    ``weights * exp(-x**2)``.
    """

    abscissae: np.ndarray
    weights: np.ndarray | None = None
    spec: BasisSpec | None = None
    count: int = 0

    def __post_init__(self):
        x = np.asarray(self.abscissae, dtype=float)
        x.setflags(write=False)
        object.__setattr__(self, "abscissae", x)
        if not np.all(np.isfinite(x)):
            raise NumericError("grid abscissae must be finite")
        if np.any(np.diff(x) <= 0):
            raise NumericError("grid abscissae must be strictly increasing")
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=float)
            if w.shape != x.shape or np.any(w <= 0):
                raise NumericError("weights must be positive and match the abscissae")
            w.setflags(write=False)
            object.__setattr__(self, "weights", w)
        if not self.count:
            object.__setattr__(self, "count", len(x))

    def __len__(self):
        return len(self.abscissae)

    @property
    def classical_weights(self) -> np.ndarray:
        """Weights for ``int exp(-x^2) v(x) dx ~ sum w_j v(x_j)``."""
        if self.weights is None:
            raise ParameterError("grid carries no quadrature weights")
        return self.weights * np.exp(-self.abscissae**2)


def chebyshev_gauss_radau(N: int) -> np.ndarray:
    """Chebyshev-Gauss-Radau points ``-cos(2 pi j / (2N + 1))``, j = 0..N.

    The left end point -1 is included and +1 is not.
    """
    if int(N) != N or N < 2:
        raise ParameterError(f"Radau grid needs N >= 2, got {N!r}")
    j = np.arange(N + 1)
    y = -np.cos(2.0 * np.pi * j / (2 * N + 1))
    y[0] = -1.0
    return y


def rc_radau_grid(N: int, L: float, drop: str = "largest") -> CollocationGrid:
    """Interior collocation nodes for the rational Chebyshev solve.

    The N + 1 reference Radau points are mapped to the half line by
    ``t = L (1 + y) / (1 - y)``. The node at t = 0 is always discarded because
    both initial conditions live there; to leave N - 1 nodes one more is
    removed, either the largest (``drop="largest"``, default) or the smallest
    remaining one (``drop="smallest"``).
    """
    if not L > 0:
        raise ParameterError(f"map length L must be positive, got {L!r}")
    y = chebyshev_gauss_radau(N)
    t = L * (1.0 + y) / (1.0 - y)
    if drop == "largest":
        t = t[1:N]
    elif drop == "smallest":
        t = t[2:]
    else:
        raise ParameterError(f"drop must be 'largest' or 'smallest', got {drop!r}")
    return CollocationGrid(t, spec=BasisSpec.rational_chebyshev(N, L), count=N + 1)


def hermite_gauss(M: int) -> CollocationGrid:
    """M-point Hermite-Gauss grid with Hermite-function weights.

    Nodes are the eigenvalues of the Jacobi matrix of the Hermite recurrence
    (Golub-Welsch), each polished by one Newton step on the normalized
    Hermite function of degree M. Weights are
    ``sqrt(pi) / (M * Ht_{M-1}(x_j)^2)``.
    """
    if int(M) != M or M < 1:
        raise ParameterError(f"node count must be an integer >= 1, got {M!r}")
    M = int(M)
    if M == 1:
        x = np.zeros(1)
    else:
        off = np.sqrt(np.arange(1, M) / 2.0)
        try:
            x = eigh_tridiagonal(np.zeros(M), off, eigvals_only=True)
        except LinAlgError as exc:
            raise NumericError(
                f"Jacobi-matrix eigensolve failed for M={M}: {exc}"
            ) from exc
        if not np.all(np.isfinite(x)):
            raise NumericError(f"Jacobi-matrix eigenvalues not finite for M={M}: {x}")
        H = hermite_function_table(M, x).value
        dH = math.sqrt(2.0 * M) * H[:, M - 1] - x * H[:, M]
        x = x - H[:, M] / dH
        x = 0.5 * (x - x[::-1])
    Hm1 = hermite_function_table(M - 1, x).value[:, M - 1]
    w = math.sqrt(math.pi) / (M * Hm1**2)
    w = 0.5 * (w + w[::-1])
    return CollocationGrid(x, weights=w, count=M)


def transformed_hermite_grid(M: int, k: float) -> CollocationGrid:
    """Hermite-Gauss nodes pulled back to (0, inf) through the log-sinh map."""
    ref = hermite_gauss(M)
    z = inverse_map(ref.abscissae, k)
    return CollocationGrid(np.atleast_1d(z), spec=BasisSpec.transformed_hermite(max(M - 2, 1), k), count=M)
