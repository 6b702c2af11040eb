"""Collocation solvers for Volterra's population model.

With ``y(t) = int_0^t u``, the integro-differential model
``kappa u' = u - u^2 - u int_0^t u`` becomes the ODE

    kappa y'' = y' - (y')^2 - y y',    y(0) = 0,  y'(0) = u0,

and the scaled population is ``u = y'``. Two trial spaces are provided:

* rational Chebyshev (RCC): ``y = sum a_i R_i(t)``; N - 1 interior Radau
  nodes plus the two initial conditions give N + 1 equations.
* transformed Hermite (HFC): ``y = lam t^2 + u0 t + t sum a_i Hh_i(t / l)``;
  both initial conditions hold by construction and the N + 2 unknowns
  ``(a_0..a_N, lam)`` are fixed by collocation at N + 2 mapped Gauss nodes.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.integrate import solve_ivp

from .basis import BasisSpec, Family, rc_table, transformed_hermite_table
from .errors import DomainError, NumericError, ParameterError
from .nodes import rc_radau_grid, transformed_hermite_grid
from .solver import NewtonConfig, SolveReport, newton_solve

__all__ = [
    "ModelParams",
    "DimensionalParams",
    "nondimensionalize",
    "ode_residual",
    "exact_umax",
    "SpectralSolution",
    "evaluate_solution",
    "CollocationSystem",
    "rcc_assemble",
    "hfc_assemble",
    "UmaxResult",
    "find_umax",
    "VolterraReport",
    "solve_collocation",
    "solve_rcc",
    "solve_hfc",
]

log = logging.getLogger(__name__)

DEFAULT_L = 1.0
DEFAULT_K = 0.5
DEFAULT_SCALE_L = 1.0


@dataclass(frozen=True)
class ModelParams:
    """Nondimensional toxicity ``kappa`` and initial population ``u0``."""

    kappa: float
    u0: float = 0.1

    def __post_init__(self):
        if not self.kappa > 0:
            raise ParameterError(f"kappa must be positive, got {self.kappa!r}")
        if not 0 < self.u0 < 1 + self.kappa:
            raise ParameterError(f"u0 must lie in (0, 1 + kappa), got {self.u0!r}")


@dataclass(frozen=True)
class DimensionalParams:
    """Birth rate ``a``, crowding ``b``, toxicity ``c`` and initial population ``p0``."""

    a: float
    b: float
    c: float
    p0: float

    def __post_init__(self):
        for name in ("a", "b", "c", "p0"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"{name} must be positive")


def nondimensionalize(d: DimensionalParams) -> ModelParams:
    return ModelParams(kappa=d.c / (d.a * d.b), u0=d.p0 * d.b / d.a)


def ode_residual(y, dy, d2y, kappa):
    """``kappa y'' - y' + y'^2 + y y'``; zero where the ODE holds."""
    return kappa * d2y - dy + dy * dy + y * dy


def exact_umax(params: ModelParams) -> float:
    """Closed-form population peak ``1 + kappa ln(kappa / (1 + kappa - u0))``."""
    arg = 1.0 + params.kappa - params.u0
    if not arg > 0:
        raise DomainError("u_max formula needs 1 + kappa - u0 > 0")
    return 1.0 + params.kappa * math.log(params.kappa / arg)


# -- trial functions ----------------------------------------------------------


def _trial_blocks(spec: BasisSpec, scale_l: float, u0: float, t: np.ndarray):
    """Linear pieces of the trial function and its derivatives at ``t``.

    Returns ``(P0, P1, P2, q0, q1, q2)`` with ``y^(m)(t) = P_m @ c + q_m`` for
    the full unknown vector ``c``.
    """
    n = len(t)
    if spec.family is Family.RATIONAL_CHEBYSHEV:
        tab = rc_table(spec.N, t, spec.L)
        zero = np.zeros(n)
        return tab.value, tab.d1, tab.d2, zero, zero, zero

    xi = t / scale_l
    V = np.zeros((n, spec.N + 1))
    D = np.zeros_like(V)
    E = np.zeros_like(V)
    pos = xi > 0
    if np.any(pos):
        tab = transformed_hermite_table(spec.N, xi[pos], spec.k)
        V[pos], D[pos], E[pos] = tab.value, tab.d1, tab.d2
    xs = xi[:, None]
    P0 = np.hstack([t[:, None] * V, (t * t)[:, None]])
    P1 = np.hstack([V + xs * D, (2.0 * t)[:, None]])
    P2 = np.hstack([(2.0 * D + xs * E) / scale_l, np.full((n, 1), 2.0)])
    return P0, P1, P2, u0 * t, np.full(n, u0), np.zeros(n)


@dataclass(frozen=True, eq=False)
class SpectralSolution:
    """Expansion coefficients bound to their basis.

    ``lam`` (the ``t^2`` coefficient) and ``scale_l`` only apply to the
    transformed Hermite trial function.
    """

    spec: BasisSpec
    coeffs: np.ndarray
    params: ModelParams
    lam: float | None = None
    scale_l: float = 1.0

    def __post_init__(self):
        a = np.asarray(self.coeffs, dtype=float)
        if a.shape != (self.spec.N + 1,):
            raise ParameterError(f"expected {self.spec.N + 1} coefficients, got {a.shape}")
        hermite = self.spec.family is Family.TRANSFORMED_HERMITE
        if hermite != (self.lam is not None):
            raise ParameterError("lam must be given exactly for the transformed Hermite basis")
        if not self.scale_l > 0:
            raise ParameterError("scale_l must be positive")
        a.setflags(write=False)
        object.__setattr__(self, "coeffs", a)

    @property
    def unknowns(self) -> np.ndarray:
        if self.lam is None:
            return np.array(self.coeffs)
        return np.append(self.coeffs, self.lam)

    def derivatives(self, t):
        """``(y, y', y'')`` at ``t >= 0``."""
        t_arr = np.asarray(t, dtype=float)
        if np.any(t_arr < 0):
            raise DomainError("solution is defined for t >= 0")
        flat = np.atleast_1d(t_arr).ravel()
        P0, P1, P2, q0, q1, q2 = _trial_blocks(self.spec, self.scale_l, self.params.u0, flat)
        c = self.unknowns
        out = [(P @ c + q).reshape(t_arr.shape) for P, q in ((P0, q0), (P1, q1), (P2, q2))]
        if t_arr.ndim == 0:
            out = [float(v) for v in out]
        return tuple(out)

    def evaluate(self, t):
        """``(y, u)`` with ``u = y'``."""
        y, dy, _ = self.derivatives(t)
        return y, dy

    __call__ = evaluate


def evaluate_solution(s: SpectralSolution, t):
    return s.evaluate(t)


# -- collocation systems --------------------------------------------------------


class CollocationSystem:
    """Square nonlinear system for the coefficients of one trial space.

    Call the instance (or :meth:`residual`) with the unknown vector to get
    the residual vector. For the rational Chebyshev space the last two rows
    are ``y(0)`` and ``y'(0) - u0``.
    """

    def __init__(self, spec: BasisSpec, params: ModelParams, nodes, scale_l: float = 1.0):
        self.spec = spec
        self.params = params
        self.scale_l = float(scale_l)
        self.nodes = np.asarray(nodes, dtype=float)
        self._blocks = _trial_blocks(spec, self.scale_l, params.u0, self.nodes)
        if spec.family is Family.RATIONAL_CHEBYSHEV:
            zero = rc_table(spec.N, np.zeros(1), spec.L)
            self._bc = np.vstack([zero.value, zero.d1])
            self._bc_rhs = np.array([0.0, params.u0])
        else:
            self._bc = np.zeros((0, spec.N + 2))
            self._bc_rhs = np.zeros(0)
        self.size = spec.N + 1 if self._bc.shape[0] else spec.N + 2
        rows = len(self.nodes) + self._bc.shape[0]
        if rows != self.size:
            raise ParameterError(f"{rows} equations for {self.size} unknowns")

    def node_values(self, c):
        P0, P1, P2, q0, q1, q2 = self._blocks
        return P0 @ c + q0, P1 @ c + q1, P2 @ c + q2

    def node_residual(self, c) -> np.ndarray:
        y, dy, d2y = self.node_values(np.asarray(c, dtype=float))
        return ode_residual(y, dy, d2y, self.params.kappa)

    def residual(self, c) -> np.ndarray:
        c = np.asarray(c, dtype=float)
        return np.concatenate([self.node_residual(c), self._bc @ c - self._bc_rhs])

    __call__ = residual

    def interpolate(self, y_nodes) -> np.ndarray:
        """Unknowns whose trial function takes the values ``y_nodes`` at the nodes.

        For the rational Chebyshev space the initial conditions are imposed as
        well, so the result satisfies every linear row of the system.
        """
        P0, _, _, q0, _, _ = self._blocks
        A = np.vstack([P0, self._bc])
        b = np.concatenate([np.asarray(y_nodes, dtype=float) - q0, self._bc_rhs])
        return np.linalg.solve(A, b)

    def solution(self, c) -> SpectralSolution:
        c = np.asarray(c, dtype=float)
        if self.spec.family is Family.RATIONAL_CHEBYSHEV:
            return SpectralSolution(self.spec, c, self.params)
        return SpectralSolution(self.spec, c[:-1], self.params, lam=float(c[-1]), scale_l=self.scale_l)

    def initial_guess(self, kind: str = "march") -> np.ndarray:
        """Starting vector for Newton.

        ``"march"`` interpolates a cheap low-accuracy numerical integration of
        the ODE. ``"simple"`` uses a closed form: the interpolant of
        ``u0 t exp(-t/4)`` (rational Chebyshev) or ``a = 0, lam = -u0/8``
        (transformed Hermite).
        """
        if kind == "march":
            return self.interpolate(_marched_y(self.params, self.nodes))
        if kind == "simple":
            if self.spec.family is Family.RATIONAL_CHEBYSHEV:
                t = self.nodes
                return self.interpolate(self.params.u0 * t * np.exp(-t / 4.0))
            c = np.zeros(self.size)
            c[-1] = -self.params.u0 / 8.0
            return c
        raise ParameterError(f"unknown initial guess {kind!r}")


def _marched_y(params: ModelParams, t) -> np.ndarray:
    order = np.argsort(t)
    ts = np.asarray(t, dtype=float)[order]
    kappa = params.kappa

    def rhs(_, z):
        return [z[1], z[1] * (1.0 - z[1] - z[0]) / kappa]

    sol = solve_ivp(rhs, (0.0, float(ts[-1])), [0.0, params.u0], method="LSODA",
                    t_eval=ts, rtol=1e-7, atol=1e-10)
    if not sol.success:
        raise NumericError(f"initial-guess integration failed: {sol.message}")
    y = np.empty_like(ts)
    y[order] = sol.y[0]
    return y


def rcc_assemble(params: ModelParams, N: int, L: float = DEFAULT_L, drop: str = "largest") -> CollocationSystem:
    grid = rc_radau_grid(N, L, drop=drop)
    return CollocationSystem(BasisSpec.rational_chebyshev(N, L), params, grid.abscissae)


def hfc_assemble(params: ModelParams, N: int, k: float = DEFAULT_K, l: float = DEFAULT_SCALE_L) -> CollocationSystem:
    if int(N) != N or N < 2:
        raise ParameterError(f"N must be >= 2, got {N!r}")
    if not l > 0:
        raise ParameterError(f"domain scaling l must be positive, got {l!r}")
    grid = transformed_hermite_grid(N + 2, k)
    return CollocationSystem(BasisSpec.transformed_hermite(N, k), params, l * grid.abscissae, scale_l=l)


# -- the population peak --------------------------------------------------------


class UmaxResult(NamedTuple):
    t_max: float
    u_max: float
    at_boundary: bool


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_max(f, a, b, tol):
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    t = 0.5 * (a + b)
    return t, f(t)


def find_umax(s: SpectralSolution, t_scan: float = 10.0, n_scan: int = 2000, tol: float = 1e-10) -> UmaxResult:
    """Locate the peak of ``u`` on ``(0, t_scan]``.

    A scan over ``n_scan`` points (half log-spaced to resolve fast initial
    growth, half uniform) brackets the maximum, which golden-section search
    then refines until the bracket is narrower than ``tol``.
    """
    half = n_scan // 2
    grid = np.unique(np.concatenate([
        np.geomspace(t_scan * 1e-6, t_scan, half),
        np.linspace(t_scan / (n_scan - half), t_scan, n_scan - half),
    ]))
    _, u = s.evaluate(grid)
    i = int(np.argmax(u))
    if i == 0 or i == len(grid) - 1:
        log.warning("u is largest at the scan boundary t=%.3g; t_scan may be too small", grid[i])
        return UmaxResult(float(grid[i]), float(u[i]), True)

    def u_at(t):
        return s.evaluate(t)[1]

    t_max, u_max = _golden_max(u_at, grid[i - 1], grid[i + 1], tol)
    return UmaxResult(t_max, u_max, False)


# -- driver ------------------------------------------------------------------


@dataclass
class VolterraReport:
    method: str
    kappa: float
    u0: float
    N: int
    newton: SolveReport
    t_max: float
    u_max: float
    exact: float
    node_residual: float
    at_scan_boundary: bool
    continuation_used: bool = False
    basis_params: dict = field(default_factory=dict)

    @property
    def converged(self) -> bool:
        return self.newton.converged

    @property
    def abs_error(self) -> float:
        return abs(self.u_max - self.exact)

    def summary(self) -> str:
        extra = " ".join(f"{k}={v:g}" for k, v in self.basis_params.items())
        return (
            f"method={self.method} kappa={self.kappa:g} u0={self.u0:g} N={self.N} {extra} "
            f"converged={self.converged} iterations={self.newton.iterations} "
            f"residual={self.newton.residual_norm:.3e} t_max={self.t_max:.9g} "
            f"u_max={self.u_max:.9g} exact={self.exact:.9g} abs_err={self.abs_error:.3e}"
            + (" continuation=yes" if self.continuation_used else "")
            + (" WARNING=max-at-scan-boundary" if self.at_scan_boundary else "")
        )


def _assemble(params, spec, scale_l, drop):
    if spec.family is Family.RATIONAL_CHEBYSHEV:
        return rcc_assemble(params, spec.N, spec.L, drop=drop)
    return hfc_assemble(params, spec.N, spec.k, scale_l)


def solve_collocation(
    params: ModelParams,
    spec: BasisSpec,
    *,
    scale_l: float = DEFAULT_SCALE_L,
    drop: str = "largest",
    guess: str = "march",
    config: NewtonConfig | None = None,
    continuation_kappa: float = 0.02,
    t_scan: float = 10.0,
) -> tuple[SpectralSolution, VolterraReport]:
    """Assemble, solve by Newton and locate the peak.

    If Newton fails and ``kappa <= continuation_kappa``, the problem is first
    solved at ``2 kappa`` and that solution seeds a second attempt.
    """
    system = _assemble(params, spec, scale_l, drop)
    c, rep = newton_solve(system, system.initial_guess(guess), config)
    continued = False
    if not rep.converged and params.kappa <= continuation_kappa:
        helper = _assemble(ModelParams(2.0 * params.kappa, params.u0), spec, scale_l, drop)
        c2, rep2 = newton_solve(helper, helper.initial_guess(guess), config)
        if rep2.converged:
            c3, rep3 = newton_solve(system, c2, config)
            continued = True
            if rep3.converged or rep3.residual_norm < rep.residual_norm:
                c, rep = c3, rep3
    sol = system.solution(c)
    peak = find_umax(sol, t_scan=t_scan)
    if spec.family is Family.RATIONAL_CHEBYSHEV:
        method, bp = "rcc", {"L": spec.L}
    else:
        method, bp = "hfc", {"k": spec.k, "l": scale_l}
    report = VolterraReport(
        method=method,
        kappa=params.kappa,
        u0=params.u0,
        N=spec.N,
        newton=rep,
        t_max=peak.t_max,
        u_max=peak.u_max,
        exact=exact_umax(params),
        node_residual=float(np.max(np.abs(system.node_residual(c)))),
        at_scan_boundary=peak.at_boundary,
        continuation_used=continued,
        basis_params=bp,
    )
    if not rep.converged:
        log.warning("Newton did not converge: %s", report.summary())
    return sol, report


def solve_rcc(params: ModelParams, N: int, L: float = DEFAULT_L, **kw):
    return solve_collocation(params, BasisSpec.rational_chebyshev(N, L), **kw)


def solve_hfc(params: ModelParams, N: int, k: float = DEFAULT_K, l: float = DEFAULT_SCALE_L, **kw):
    return solve_collocation(params, BasisSpec.transformed_hermite(N, k), scale_l=l, **kw)
