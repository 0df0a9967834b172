"""Seeding on the unstable manifold and adaptive integration of the flow.

Soliton trajectories start just inside the unit ball (L < 0) along the
unstable directions of the critical point and run until the state reaches
the origin.  Ricci-flat trajectories are re-projected onto the invariant
set {L = 0, H = 1} after every accepted step, since that set is only
neutrally stable under the discretized flow.

The tail of a soliton trajectory is mildly stiff: the X components relax
at a rate of order one while the crawl toward the origin slows like 1/s,
so an implicit method (Radau) is used; an explicit embedded pair would be
stability-limited to O(1) steps and could never reach the origin
tolerance in the available step budget.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import OdeSolution, Radau

from . import phase
from .errors import (
    InvariantViolated,
    NonPositiveY,
    OutOfRange,
    SeedLeavesWrongRegion,
    StepLimitExceeded,
)
from .model import Mode, ProblemSpec, constants, critical_point
from .phase import PhasePoint

# Allowance for roundoff plateaus in the monotonicity check: near the
# origin L changes by less than one ulp per step.
_MONOTONE_SLACK = 1e-13


@dataclass
class Trajectory:
    """An integrated trajectory: accepted samples plus derived scalars."""

    spec: ProblemSpec
    s: np.ndarray        # (n,), strictly increasing
    X: np.ndarray        # (n, r)
    Y: np.ndarray        # (n, r)
    L: np.ndarray        # (n,)
    H: np.ndarray        # (n,)
    termination: str     # "origin" | "s_max"
    n_steps: int
    kappa_estimate: float
    dense: OdeSolution | None = None

    @property
    def r(self) -> int:
        return self.X.shape[1]

    def point(self, k: int) -> PhasePoint:
        return PhasePoint(s=float(self.s[k]), X=self.X[k].copy(), Y=self.Y[k].copy())

    def states_at(self, s_values: np.ndarray) -> np.ndarray:
        """Dense-output states, shape (len(s_values), 2r)."""
        s_values = np.asarray(s_values, dtype=float)
        if s_values.size == 0:
            return np.empty((0, 2 * self.r))
        if s_values.min() < self.s[0] or s_values.max() > self.s[-1]:
            raise OutOfRange(
                f"requested s in [{s_values.min():g}, {s_values.max():g}], "
                f"trajectory covers [{self.s[0]:g}, {self.s[-1]:g}]"
            )
        return np.atleast_2d(self.dense(s_values).T)


def seed(spec: ProblemSpec) -> PhasePoint:
    """Initial state: critical point displaced along the unstable directions.

    Soliton mode requires eps0 < 0 and eps_i > 0 so the displaced point
    enters {L < 0} with all Y_i > 0.  Ricci-flat mode rescales the
    displaced point onto {L = 0, H = 1}.
    """
    crit = critical_point(spec).as_vector()
    v = crit + spec.seed_coeffs[0] * phase.unstable_eigenvector_fast(spec)
    for i in range(1, spec.r):
        v[spec.r + i] += spec.seed_coeffs[i]
    p = PhasePoint.from_vector(spec.s_start, v)

    if spec.mode is Mode.SOLITON:
        if any(c != 0.0 for c in spec.seed_coeffs):
            if not phase.lyapunov(p) < 0:
                raise SeedLeavesWrongRegion(
                    f"seed has L = {phase.lyapunov(p):.3e} >= 0; "
                    "eps0 must be negative"
                )
            if not np.all(p.Y > 0):
                raise NonPositiveY(f"seed has non-positive Y: {p.Y}")
        return p
    return PhasePoint.from_vector(spec.s_start, _project_ricci_flat(v, spec))


def _project_ricci_flat(y: np.ndarray, spec: ProblemSpec) -> np.ndarray:
    """Rescale X so that H = 1 and then Y so that L = 0."""
    r = spec.r
    y = y.copy()
    sqrt_d = np.sqrt(spec.dims)
    h = sqrt_d @ y[:r]
    y[:r] /= h
    sx2 = y[:r] @ y[:r]
    sy2 = y[r:] @ y[r:]
    if sy2 > 0:
        y[r:] *= np.sqrt((1.0 - sx2) / sy2)
    return y


def integrate(spec: ProblemSpec, start: PhasePoint) -> Trajectory:
    """Integrate the phase flow from a seed, monitoring invariants per step.

    Terminates at the first accepted step with ||(X, Y)|| < origin_tol
    (soliton mode) or at s_max.  Raises InvariantViolated if an accepted
    step breaks monotonicity of L or positivity of Y beyond roundoff, and
    StepLimitExceeded past the step budget.
    """
    sqrt_d = np.sqrt(spec.dims)
    sc = spec.step_controls
    soliton = spec.mode is Mode.SOLITON

    def f(s, y):
        return phase.rhs(y, sqrt_d)

    def jac(s, y):
        return phase.rhs_jacobian(y, sqrt_d)

    y0 = start.as_vector()
    f0 = phase.rhs(y0, sqrt_d)
    stationary = float(np.sqrt(f0 @ f0)) < 1e-13  # seeded at the rest point
    solver = Radau(
        f,
        start.s,
        y0,
        t_bound=spec.s_max,
        rtol=sc.rtol,
        atol=sc.atol,
        jac=jac,
        first_step=sc.initial_step,
    )

    ss = [start.s]
    ys = [y0.copy()]
    interpolants = []
    termination = "stationary" if stationary else "s_max"
    n_steps = 0
    r = spec.r
    prev_L = _lyap(y0, r)

    while solver.status == "running" and not stationary:
        if n_steps >= sc.max_steps:
            raise StepLimitExceeded(
                f"no termination within {sc.max_steps} steps (s = {solver.t:.3e})"
            )
        msg = solver.step()
        if solver.status == "failed":
            raise StepLimitExceeded(f"integrator failed at s={solver.t:.3e}: {msg}")
        n_steps += 1
        interpolants.append(solver.dense_output())

        if spec.mode is Mode.RICCI_FLAT:
            projected = _project_ricci_flat(solver.y, spec)
            solver.y = projected
            solver.f = f(solver.t, projected)

        y = solver.y.copy()
        L = _lyap(y, r)
        if soliton:
            if np.any(y[r:] <= 0):
                raise InvariantViolated("Y_positive", solver.t, f"Y = {y[r:]}")
            if L > prev_L + _MONOTONE_SLACK * (1.0 + abs(prev_L)):
                raise InvariantViolated(
                    "L_decreasing", solver.t, f"L rose from {prev_L} to {L}"
                )
            if L < -1.0 - 1e-9:
                raise InvariantViolated("L_bounded", solver.t, f"L = {L} < -1")
        ss.append(solver.t)
        ys.append(y)
        prev_L = L

        if soliton and np.sqrt(y @ y) < spec.origin_tol:
            termination = "origin"
            break
        # Ricci-flat trajectories converge to a fixed point inside
        # {L = 0, H = 1}; stop once the phase velocity is negligible
        if not soliton and np.sqrt(solver.f @ solver.f) < spec.origin_tol:
            termination = "stationary"
            break

    s_arr = np.array(ss)
    y_arr = np.array(ys)
    X = y_arr[:, :r]
    Y = y_arr[:, r:]
    L = np.einsum("ij,ij->i", X, X) + np.einsum("ij,ij->i", Y, Y) - 1.0
    H = X @ sqrt_d
    dense = OdeSolution(s_arr, interpolants) if interpolants else None
    return Trajectory(
        spec=spec,
        s=s_arr,
        X=X,
        Y=Y,
        L=L,
        H=H,
        termination=termination,
        n_steps=n_steps,
        kappa_estimate=float(L[-1]),
        dense=dense,
    )


def _lyap(y: np.ndarray, r: int) -> float:
    return float(y[:r] @ y[:r] + y[r:] @ y[r:] - 1.0)


def dense_sample(traj: Trajectory, s_values) -> list[PhasePoint]:
    """Interpolated states at the requested abscissae."""
    s_values = np.asarray(s_values, dtype=float)
    if s_values.size == 0:
        return []
    states = traj.states_at(s_values)
    return [PhasePoint.from_vector(float(s), y) for s, y in zip(s_values, states)]


def run(spec: ProblemSpec) -> Trajectory:
    """Seed and integrate in one call."""
    return integrate(spec, seed(spec))
