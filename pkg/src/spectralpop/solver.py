"""Dense damped Newton iteration with an LU-factorized linear step."""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg

from .errors import ParameterError, SingularMatrixError

__all__ = ["NewtonConfig", "SolveReport", "lu_solve", "newton_solve"]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class NewtonConfig:
    """Stopping and step-control settings for :func:`newton_solve`.

    ``damping`` is ``"halving"`` (backtrack by halves, at most
    ``max_halvings`` times, until the max-norm residual decreases) or
    ``"none"`` (always take the full step).
    """

    tol: float = 1e-13
    max_iter: int = 60
    fd_step_scale: float = float(np.sqrt(np.finfo(float).eps))
    damping: str = "halving"
    max_halvings: int = 20

    def __post_init__(self):
        if not self.tol > 0:
            raise ParameterError("tol must be positive")
        if self.max_iter < 1:
            raise ParameterError("max_iter must be >= 1")
        if not self.fd_step_scale > 0:
            raise ParameterError("fd_step_scale must be positive")
        if self.damping not in ("halving", "none"):
            raise ParameterError(f"unknown damping {self.damping!r}")


@dataclass
class SolveReport:
    iterations: int
    residual_norm: float
    converged: bool
    jacobian_condition_estimate: float | None = None
    history: list[float] = field(default_factory=list)


def lu_solve(A, b) -> np.ndarray:
    """Solve ``A x = b`` by LU factorization with partial pivoting."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ParameterError(f"matrix must be square, got shape {A.shape}")
    if b.shape[0] != A.shape[0]:
        raise ParameterError("right-hand side length does not match the matrix")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
        raise ParameterError("matrix and right-hand side must be finite")
    with warnings.catch_warnings():
        # exact zero pivots are reported below as an exception instead
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(A, check_finite=False)
    zero = np.flatnonzero(np.diag(lu) == 0.0)
    if zero.size:
        raise SingularMatrixError(f"exactly singular pivot at position {zero[0]}")
    return scipy.linalg.lu_solve((lu, piv), b, check_finite=False)


def _fd_jacobian(F, c, f, scale):
    n = c.size
    J = np.empty((f.size, n))
    for j in range(n):
        h = scale * (1.0 + abs(c[j]))
        cj = c.copy()
        cj[j] += h
        # the representable step, not the nominal one
        h = cj[j] - c[j]
        J[:, j] = (F(cj) - f) / h
    return J


def _norm(f):
    return float(np.max(np.abs(f))) if f.size else 0.0


def newton_solve(
    F: Callable[[np.ndarray], np.ndarray],
    c0,
    cfg: NewtonConfig | None = None,
) -> tuple[np.ndarray, SolveReport]:
    """Find a root of a square system ``F(c) = 0``.

    The Jacobian is a forward-difference approximation rebuilt at every
    iterate. ``F`` must be a pure function. Non-convergence is reported, not
    raised; a singular Jacobian raises :class:`SingularMatrixError` carrying
    the iteration index.

    Returns
    -------
    c : ndarray
        Final iterate.
    report : SolveReport
    """
    cfg = cfg or NewtonConfig()
    c = np.array(c0, dtype=float)
    f = np.asarray(F(c), dtype=float)
    if f.shape != c.shape:
        raise ParameterError(f"system is not square: {f.size} equations, {c.size} unknowns")
    r = _norm(f)
    history = [r]
    cond = None
    it = 0
    while it < cfg.max_iter and r > cfg.tol:
        if not np.isfinite(r):
            break
        J = _fd_jacobian(F, c, f, cfg.fd_step_scale)
        try:
            step = lu_solve(J, f)
        except (SingularMatrixError, ParameterError) as exc:
            raise SingularMatrixError(f"singular Jacobian at iteration {it}: {exc}", iteration=it) from exc
        cond = float(np.linalg.cond(J))
        it += 1
        s = 1.0
        c_new = c - step
        f_new = np.asarray(F(c_new), dtype=float)
        r_new = _norm(f_new)
        if cfg.damping == "halving":
            halvings = 0
            while not (np.isfinite(r_new) and r_new < r) and halvings < cfg.max_halvings:
                s *= 0.5
                halvings += 1
                c_new = c - s * step
                f_new = np.asarray(F(c_new), dtype=float)
                r_new = _norm(f_new)
            if not (np.isfinite(r_new) and r_new < r):
                log.debug("line search stalled at iteration %d (residual %.3e)", it, r)
                break
        c, f, r = c_new, f_new, r_new
        history.append(r)
    converged = bool(r <= cfg.tol and np.all(np.isfinite(c)))
    return c, SolveReport(it, r, converged, cond, history)
