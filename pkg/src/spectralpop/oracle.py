"""Reference integrator for the converted population ODE.

A Dormand-Prince 5(4) embedded pair with local extrapolation, standard
step-size control and the usual fourth-order continuous extension. It
shares no code with the spectral machinery so it can be used to check it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, StiffnessError
from .volterra import ModelParams

__all__ = ["Trajectory", "rk_integrate", "trajectory_peak", "oracle_umax"]

# Butcher tableau (the system is autonomous, so the nodes c_i are not needed)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B = np.array(_A[6] + (0.0,))
# fifth-order minus fourth-order weights
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])
# continuous extension
_D = np.array([
    -12715105075 / 11282082432, 0.0, 87487479700 / 32700410799,
    -10690763975 / 1880347072, 701980252875 / 199316789632,
    -1453857185 / 822651844, 69997945 / 29380423,
])

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0
_REFINE_POINTS = 401


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Accepted steps of an integration, with dense output between them.

    ``t``, ``y`` and ``u`` hold one entry per accepted step, starting at
    ``(0, 0, u0)``.
    """

    t: np.ndarray
    y: np.ndarray
    u: np.ndarray
    tol_used: float
    _cont: np.ndarray  # (steps, 5, 2) interpolation coefficients

    @property
    def samples(self):
        return list(zip(self.t.tolist(), self.y.tolist(), self.u.tolist()))

    def __len__(self):
        return len(self.t)

    def interpolate(self, tq):
        """``(y, u)`` at arbitrary times inside ``[0, t_end]``."""
        tq_arr = np.asarray(tq, dtype=float)
        flat = np.atleast_1d(tq_arr).ravel()
        if np.any(flat < self.t[0]) or np.any(flat > self.t[-1] * (1 + 1e-14)):
            raise ParameterError("interpolation time outside the integrated range")
        i = np.clip(np.searchsorted(self.t, flat, side="right") - 1, 0, len(self.t) - 2)
        h = self.t[i + 1] - self.t[i]
        th = ((flat - self.t[i]) / h)[:, None]
        th1 = 1.0 - th
        r = self._cont[i]
        z = r[:, 0] + th * (r[:, 1] + th1 * (r[:, 2] + th * (r[:, 3] + th1 * r[:, 4])))
        y = z[:, 0].reshape(tq_arr.shape)
        u = z[:, 1].reshape(tq_arr.shape)
        if tq_arr.ndim == 0:
            return float(y), float(u)
        return y, u


def _rhs(kappa):
    def f(z):
        y, u = z
        return np.array([u, u * (1.0 - u - y) / kappa])

    return f


def rk_integrate(params: ModelParams, t_end: float = 10.0, tol: float = 1e-10, min_samples: int = 200) -> Trajectory:
    """Integrate ``y' = u, u' = (u - u^2 - u y) / kappa`` from ``(0, u0)``.

    The local error of each step, measured against ``tol * (1 + |z|)``
    componentwise, is kept below one. Steps are capped at
    ``t_end / min_samples`` so the trajectory has at least that many samples.

    Raises
    ------
    StiffnessError
        If the step size underflows relative to ``t``.
    """
    if not t_end > 0:
        raise ParameterError("t_end must be positive")
    if not 1e-13 <= tol <= 1e-6:
        raise ParameterError(f"tol must lie in [1e-13, 1e-6], got {tol!r}")
    f = _rhs(params.kappa)
    h_max = t_end / min_samples
    t = 0.0
    z = np.array([0.0, params.u0])
    k1 = f(z)
    h = min(h_max, 0.01 * params.kappa, t_end)
    ts, zs, conts = [t], [z], []
    K = np.empty((7, 2))
    while t < t_end:
        if t + h >= t_end:
            h = t_end - t
        if h <= 1e-14 * max(1.0, abs(t)):
            raise StiffnessError(f"step size underflow at t={t:.6g}", t)
        K[0] = k1
        for s in range(1, 7):
            K[s] = f(z + h * (np.asarray(_A[s]) @ K[:s]))
        z_new = z + h * (_B @ K)
        err_vec = h * (_E @ K)
        scale = tol * (1.0 + np.maximum(np.abs(z), np.abs(z_new)))
        err = float(np.max(np.abs(err_vec) / scale))
        if err <= 1.0:
            ydiff = z_new - z
            bspl = h * K[0] - ydiff
            cont = np.array([z, ydiff, bspl, ydiff - h * K[6] - bspl, h * (_D @ K)])
            t = t_end if t + h >= t_end else t + h
            z = z_new
            k1 = K[6].copy()
            ts.append(t)
            zs.append(z)
            conts.append(cont)
            factor = _MAX_FACTOR if err == 0 else min(_MAX_FACTOR, _SAFETY * err ** -0.2)
        else:
            factor = max(_MIN_FACTOR, _SAFETY * err ** -0.2)
        h = min(h * factor, h_max)
    Z = np.array(zs)
    return Trajectory(np.array(ts), Z[:, 0], Z[:, 1], tol, np.array(conts))


def trajectory_peak(traj: Trajectory) -> tuple[float, float]:
    """``(t_max, u_max)`` of a trajectory.

    The dense output is resampled finely over the two steps around the
    largest accepted step; the largest resampled value and its two
    neighbours are fitted by a parabola whose vertex gives the maximum.
    """
    i = int(np.argmax(traj.u))
    if i == 0 or i == len(traj) - 1:
        return float(traj.t[i]), float(traj.u[i])
    tf = np.linspace(traj.t[i - 1], traj.t[i + 1], _REFINE_POINTS)
    _, uf = traj.interpolate(tf)
    j = min(max(int(np.argmax(uf)), 1), len(tf) - 2)
    t0, t1, t2 = tf[j - 1 : j + 2]
    u0, u1, u2 = uf[j - 1 : j + 2]
    # Newton divided differences of the interpolating parabola
    d01 = (u1 - u0) / (t1 - t0)
    d12 = (u2 - u1) / (t2 - t1)
    d012 = (d12 - d01) / (t2 - t0)
    if d012 >= 0:
        return float(t1), float(u1)
    # vertex where d01 + d012 * (2 t - t0 - t1) = 0
    tv = 0.5 * (t0 + t1) - d01 / (2.0 * d012)
    return float(tv), float(u0 + d01 * (tv - t0) + d012 * (tv - t0) * (tv - t1))


def oracle_umax(params: ModelParams, tol: float = 1e-10, t_end: float = 10.0) -> float:
    """Peak of ``u`` along the reference trajectory (see :func:`trajectory_peak`)."""
    return trajectory_peak(rk_integrate(params, t_end, tol))[1]
