"""Recover physical data (t, g_i, u and t-derivatives) from a trajectory.

All t-derivatives come from closed forms in (X, Y, L); quadrature is used
only for the three cumulative quantities t, u and (in Ricci-flat mode)
log w, where w = -du/dt + tr L is the frame factor relating s to t
(dt = ds / w).  In soliton mode w = sqrt(C / L); in Ricci-flat mode L
vanishes identically and w is integrated from (log w)' = -sum(X^2) with
the gauge w(s_0) = 1.

The un-sampled tail below the first sample is estimated from the exact
exponential rates at the critical point: L ~ e^{2 b^2 s} gives
t_0 = sqrt(L(s_0)/C) / b^2 (soliton) and t_0 = 1/(w(s_0) b^2)
(Ricci-flat).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import NonNegativeL, QuadratureFailure, ZeroY
from .flow import Trajectory
from .model import Mode, ProblemSpec, constants


@dataclass
class MetricProfile:
    """Sampled physical data along a trajectory.

    Arrays are indexed [sample] or [sample, factor].  u is normalized by
    u(s_0) = 0; t includes the estimated tail below the first sample so
    that t -> 0 corresponds to the collapsing submanifold.
    """

    spec: ProblemSpec
    s: np.ndarray
    t: np.ndarray
    w: np.ndarray          # -u_dot + tr L, the ds/dt factor
    g: np.ndarray
    g_dot: np.ndarray
    g_ddot: np.ndarray
    g_dddot: np.ndarray
    u: np.ndarray
    u_dot: np.ndarray
    u_ddot: np.ndarray
    L: np.ndarray
    H: np.ndarray
    gauge_C: float
    u_gauge: str = "u(s_0) = 0"

    @property
    def r(self) -> int:
        return self.g.shape[1]

    def tr_L(self) -> np.ndarray:
        return (self.spec.dims * self.g_dot / self.g).sum(axis=1)


def _frame_factor(traj: Trajectory, spec: ProblemSpec) -> np.ndarray:
    """w per sample; also validates the mode's sign conditions."""
    if spec.mode is Mode.SOLITON:
        if np.any(traj.L >= 0):
            raise NonNegativeL("soliton reconstruction requires L < 0 throughout")
        return np.sqrt(spec.gauge_C / traj.L)
    log_w = _cumulative(traj, spec)[:, 0]
    return np.exp(log_w)


def _cumulative(traj: Trajectory, spec: ProblemSpec) -> np.ndarray:
    """Cumulative quadratures along the dense trajectory.

    Returns per-sample columns [t_rel, u] in soliton mode and
    [log w, t_rel, u] in Ricci-flat mode, all zero at the first sample.
    """
    sqrt_d = np.sqrt(spec.dims)
    r = spec.r
    ricci_flat = spec.mode is Mode.RICCI_FLAT

    def rhs(s, z):
        y = traj.dense(s)
        X = y[:r]
        sy2 = y[r:] @ y[r:]
        sx2 = X @ X
        h_minus_1 = sqrt_d @ X - 1.0
        if ricci_flat:
            return [-sx2, np.exp(-z[0]), h_minus_1]
        ell = sx2 + sy2 - 1.0
        return [np.sqrt(ell / spec.gauge_C), h_minus_1]

    z0 = np.zeros(3 if ricci_flat else 2)
    sol = solve_ivp(
        rhs,
        (traj.s[0], traj.s[-1]),
        z0,
        method="DOP853",
        t_eval=traj.s,
        rtol=1e-12,
        atol=1e-14,
    )
    if not sol.success:
        raise QuadratureFailure(f"cumulative quadrature failed: {sol.message}")
    return sol.y.T


def arclength(traj: Trajectory, spec: ProblemSpec) -> np.ndarray:
    """t per sample, including the tail estimate below the first sample."""
    return build_profile(traj, spec).t


def _tail_t0(traj: Trajectory, spec: ProblemSpec, w: np.ndarray) -> float:
    beta2 = constants(spec).beta ** 2
    return (1.0 / w[0]) / beta2


def warping_functions(traj: Trajectory, spec: ProblemSpec, t: np.ndarray):
    """(g, g_dot, g_ddot) per sample from the closed-form substitutions."""
    p = build_profile(traj, spec)
    return p.g, p.g_dot, p.g_ddot


def third_derivative(traj: Trajectory, spec: ProblemSpec, k: int) -> np.ndarray:
    """d^3 g_i / dt^3 at sample k, one value per factor."""
    p = build_profile(traj, spec)
    return p.g_dddot[k]


def potential(traj: Trajectory, spec: ProblemSpec, t: np.ndarray):
    """(u, u_dot, u_ddot) per sample, gauge u(s_0) = 0."""
    p = build_profile(traj, spec)
    return p.u, p.u_dot, p.u_ddot


def build_profile(traj: Trajectory, spec: ProblemSpec) -> MetricProfile:
    """Evaluate every recovered field along the trajectory."""
    if traj.dense is None:
        raise QuadratureFailure("trajectory has no dense output (stationary seed?)")
    if np.any(traj.Y == 0):
        raise ZeroY("a Y component vanishes; warping functions undefined")

    d = spec.dims
    lam = spec.lambdas
    sqrt_d = np.sqrt(d)
    X, Y = traj.X, traj.Y

    w = _frame_factor(traj, spec)
    cum = _cumulative(traj, spec)
    if spec.mode is Mode.RICCI_FLAT:
        t_rel, u = cum[:, 1], cum[:, 2]
    else:
        t_rel, u = cum[:, 0], cum[:, 1]
    t = _tail_t0(traj, spec, w) + t_rel
    if np.any(np.diff(t) <= 0):
        raise QuadratureFailure("recovered arclength is not strictly increasing")

    g = np.sqrt(d * lam) / (Y * w[:, None])
    g_dot = np.sqrt(lam) * X / Y
    sx2 = np.einsum("ij,ij->i", X, X)
    g_ddot = g * (w[:, None] ** 2) * (X**2 + Y**2 - sqrt_d * X) / d
    bracket = (X / Y**2) * (
        -3.0 * X + X**2 / sqrt_d + sqrt_d + sqrt_d * sx2[:, None]
    ) + X / sqrt_d - 1.0
    g_dddot = w[:, None] * (lam / g) * bracket

    u_dot = w * (traj.H - 1.0)
    u_ddot = (d * g_ddot / g).sum(axis=1)

    return MetricProfile(
        spec=spec,
        s=traj.s.copy(),
        t=t,
        w=w,
        g=g,
        g_dot=g_dot,
        g_ddot=g_ddot,
        g_dddot=g_dddot,
        u=u,
        u_dot=u_dot,
        u_ddot=u_ddot,
        L=traj.L.copy(),
        H=traj.H.copy(),
        gauge_C=spec.gauge_C,
    )
