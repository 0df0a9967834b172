"""Claim-by-claim numerical verification of a soliton pipeline run.

Each analytic statement about the trajectory, the reconstructed metric,
or its curvature becomes one named check with a measured value and a
tolerance.  Limits as s -> -infinity are realized as intercepts of fits
against L (every relevant quantity approaches its limit linearly in L),
and limits as t -> 0 as Richardson extrapolation over the first samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import IncompleteInputs, TooFewSamples
from .flow import Trajectory
from .geometry import CurvatureReport
from .model import Mode, ProblemSpec, constants
from .reconstruct import MetricProfile


@dataclass
class Check:
    """One verified claim: measured value(s) against a tolerance."""

    name: str
    description: str
    measured: float
    tolerance: float
    passed: bool
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "description": self.description,
            "measured": self.measured,
            "tolerance": self.tolerance,
            "passed": bool(self.passed),
            "details": {k: _jsonable(v) for k, v in self.details.items()},
        }


def _jsonable(v):
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


@dataclass
class VerifyReport:
    """All checks plus free-standing diagnostics."""

    checks: list[Check]
    diagnostics: dict

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            "diagnostics": {k: _jsonable(v) for k, v in self.diagnostics.items()},
        }

    def summary_lines(self) -> list[str]:
        lines = []
        for c in self.checks:
            status = "PASS" if c.passed else "FAIL"
            lines.append(
                f"[{status}] {c.name}: measured {c.measured:.6g} "
                f"(tol {c.tolerance:.2g}) - {c.description}"
            )
        return lines


def richardson_extrapolate(values, order: int, parity: str = "none"):
    """Polynomial extrapolation of (t, v) samples to t = 0.

    parity "even" fits a polynomial in t^2 (for fields even about t = 0),
    "none" fits in t.  Returns (limit, error_estimate) where the error
    estimate is the difference between the last two extrapolation orders.
    """
    pts = sorted(((float(t), float(v)) for t, v in values), key=lambda p: p[0])
    need = max(3, order + 1)
    if len(pts) < need:
        raise TooFewSamples(f"need at least {need} samples, got {len(pts)}")
    t = np.array([p[0] for p in pts[: order + 1]])
    v = np.array([p[1] for p in pts[: order + 1]])
    x = t**2 if parity == "even" else t

    def fit_at_zero(k):
        # interpolating polynomial through the k+1 smallest nodes
        return float(np.polynomial.polynomial.polyfit(x[: k + 1], v[: k + 1], k)[0])

    limit = fit_at_zero(order)
    prev = fit_at_zero(order - 1)
    return limit, abs(limit - prev)


# --------------------------------------------------------------------------
# seed-end (s -> -infinity) limit machinery


def _window_states(traj: Trajectory, lo: float, hi: float, n: int = 250):
    """Dense states over the s-window where |L| runs from lo to hi."""
    absL = np.abs(traj.L)
    lo = max(lo, absL[0])
    hi = min(hi, 0.99 * absL[-1])
    if hi <= lo:
        raise TooFewSamples(f"empty seed-end window |L| in [{lo:g}, {hi:g}]")
    s_lo = float(np.interp(lo, absL, traj.s))
    s_hi = float(np.interp(hi, absL, traj.s))
    s_grid = np.linspace(s_lo, s_hi, n)
    states = traj.states_at(s_grid)
    r = traj.r
    X, Y = states[:, :r], states[:, r:]
    L = np.einsum("ij,ij->i", X, X) + np.einsum("ij,ij->i", Y, Y) - 1.0
    return s_grid, X, Y, L


def _intercept_vs_L(L: np.ndarray, v: np.ndarray):
    """Extrapolate v to L = 0 by a linear fit in L; the error estimate is
    the change when a quadratic term is added."""
    lin = np.polynomial.polynomial.polyfit(L, v, 1)[0]
    quad = np.polynomial.polynomial.polyfit(L, v, 2)[0]
    return float(lin), float(abs(lin - quad))


def seed_end_limit(traj: Trajectory, quantity, lo: float, hi: float):
    """Limit of quantity(X, Y, L, s) as s -> -infinity via an L-intercept."""
    s, X, Y, L = _window_states(traj, lo, hi)
    return _intercept_vs_L(L, quantity(X, Y, L, s))


def fit_exponent(traj: Trajectory, values_log, lo: float, hi: float) -> float:
    """Slope of log(quantity) against s over a seed-end window."""
    s, X, Y, L = _window_states(traj, lo, hi)
    return float(np.polyfit(s, values_log(X, Y, L), 1)[0])


# --------------------------------------------------------------------------
# the suite


def run_suite(
    traj: Trajectory,
    profile: MetricProfile,
    curv: CurvatureReport,
    spec: ProblemSpec,
) -> VerifyReport:
    """Evaluate every checkable claim about a soliton run."""
    if traj is None or profile is None or curv is None:
        raise IncompleteInputs("run_suite requires trajectory, profile and curvature")
    if spec.mode is not Mode.SOLITON:
        raise IncompleteInputs("the verification suite applies to soliton mode")

    c = constants(spec)
    beta, b2 = c.beta, c.beta ** 2
    d = spec.dims
    sqrt_d = np.sqrt(d)
    r = spec.r
    L0 = abs(traj.L[0])
    checks: list[Check] = []
    diag: dict = {"kappa": traj.kappa_estimate, "termination": traj.termination}

    # (a) monotone Lyapunov in (-1, 0)
    dL = np.diff(traj.L)
    slack = 1e-13 * (1.0 + np.abs(traj.L[:-1]))
    worst = float((dL - slack).max())
    checks.append(Check(
        "lyapunov_monotone",
        "L strictly decreasing (up to roundoff plateaus) and within (-1, 0)",
        measured=worst,
        tolerance=0.0,
        passed=worst <= 0.0 and traj.L[0] < 0 and traj.L.min() > -1.0 - 1e-9,
        details={"max_increase": float(dL.max()), "L_first": float(traj.L[0])},
    ))

    # (b) omega-limit at the origin, kappa = -1
    norm_end = float(np.sqrt(traj.X[-1] @ traj.X[-1] + traj.Y[-1] @ traj.Y[-1]))
    kap_err = abs(traj.L[-1] + 1.0)
    checks.append(Check(
        "origin_limit",
        "terminal state at the origin with L = -1",
        measured=max(norm_end, kap_err),
        tolerance=1e-6,
        passed=norm_end <= 1e-6 and kap_err <= 1e-6,
        details={"terminal_norm": norm_end, "kappa_plus_one": kap_err},
    ))

    # (c) X_i / Y_i^2 -> 1/sqrt(d_i) at the origin end
    floor = max(10.0 * spec.origin_tol, 1e-7)
    ok = np.where(traj.Y.min(axis=1) >= floor)[0]
    k_star = int(ok[-1]) if ok.size else len(traj.s) - 1
    ratio_end = traj.X[k_star] / traj.Y[k_star] ** 2
    dev_c = float(np.abs(ratio_end - 1.0 / sqrt_d).max())
    checks.append(Check(
        "origin_ratio",
        "X_i / Y_i^2 at the origin end equals 1/sqrt(d_i)",
        measured=dev_c,
        tolerance=1e-4,
        passed=dev_c <= 1e-4,
        details={"ratios": ratio_end, "targets": 1.0 / sqrt_d,
                 "sample_s": float(traj.s[k_star])},
    ))

    # (d) X_i / Y_i^2 -> 1/(sqrt(d_i)(1 + beta^2)) at the seed end (i > 1)
    if r > 1:
        # window far enough from the seed that the off-manifold transient
        # (decaying like |L|^((1+b^2)/(2 b^2))) is below the tolerance
        kappa_tr = 6000.0 ** (2.0 * b2 / (1.0 + b2))
        lo = min(kappa_tr * L0, 3e-3)
        hi = min(10.0 * lo, 3e-2)
        devs, errs, limits = [], [], []
        for i in range(1, r):
            lim, err = seed_end_limit(
                traj, lambda X, Y, L, s, i=i: X[:, i] / Y[:, i] ** 2, lo, hi
            )
            target = 1.0 / (sqrt_d[i] * (1.0 + b2))
            limits.append(lim)
            devs.append(abs(lim - target))
            errs.append(err)
        dev_d = float(max(devs))
        checks.append(Check(
            "seed_ratio",
            "X_i / Y_i^2 extrapolates to 1/(sqrt(d_i)(1 + beta^2)) at the seed end",
            measured=dev_d,
            tolerance=1e-3,
            passed=dev_d <= 1e-3,
            details={"limits": limits, "fit_errors": errs,
                     "window_absL": [lo, hi]},
        ))

    # (e) X_1 < beta everywhere
    x1_max = float(traj.X[:, 0].max())
    checks.append(Check(
        "x1_below_beta",
        "X_1 stays strictly below beta",
        measured=x1_max - beta,
        tolerance=0.0,
        passed=x1_max < beta,
        details={"beta": beta},
    ))

    # (f) limit of (X_1 - beta)/L equals beta*rho/(1 + beta^2)
    lo_f, hi_f = 2.0 * L0, min(30.0 * L0, 0.05)
    xbl, xbl_err = seed_end_limit(
        traj, lambda X, Y, L, s: (X[:, 0] - beta) / L, lo_f, hi_f
    )
    rho, rho_err = seed_end_limit(
        traj,
        lambda X, Y, L, s: (np.einsum("ij,ij->i", X, X) + Y[:, 0] ** 2 - 1.0) / L,
        lo_f, hi_f,
    )
    target_f = beta * rho / (1.0 + b2)
    dev_f = abs(xbl - target_f)
    diag["rho_estimate"] = rho
    checks.append(Check(
        "x1_minus_beta_over_L",
        "(X_1 - beta)/L limit consistent with beta*rho/(1 + beta^2)",
        measured=dev_f,
        tolerance=1e-3,
        passed=dev_f <= 1e-3,
        details={"limit": xbl, "rho": rho, "target": target_f,
                 "fit_errors": [xbl_err, rho_err]},
    ))

    # (g) L ~ e^{2 beta^2 s}: fitted exponent and finite negative limit
    lo_g, hi_g = 1.5 * L0, min(50.0 * L0, 0.05)
    expo_L = fit_exponent(traj, lambda X, Y, L: np.log(-L), lo_g, hi_g)
    lam_hat, lam_err = seed_end_limit(
        traj,
        lambda X, Y, L, s: np.exp(-2.0 * b2 * s) * L / spec.gauge_C,
        lo_g, hi_g,
    )
    dev_g = abs(expo_L - 2.0 * b2) / (2.0 * b2)
    diag["L_exponent"] = expo_L
    diag["L_scaled_limit"] = lam_hat
    checks.append(Check(
        "L_decay_rate",
        "L decays like e^{2 beta^2 s} with a finite negative limit of "
        "e^{-2 beta^2 s} L",
        measured=dev_g,
        tolerance=0.02,
        passed=dev_g <= 0.02 and lam_hat > 0.0,
        details={"exponent": expo_L, "target": 2.0 * b2,
                 "scaled_limit_over_C": lam_hat},
    ))

    # decay exponents of Y_i (i > 1), part of the same remark
    if r > 1:
        expos = [
            fit_exponent(traj, lambda X, Y, L, i=i: np.log(Y[:, i]), lo_g, hi_g)
            for i in range(1, r)
        ]
        dev_y = float(max(abs(e - b2) / b2 for e in expos))
        diag["Y_exponents"] = expos
        checks.append(Check(
            "Y_decay_rate",
            "Y_i grows like e^{beta^2 s} out of the seed (i > 1)",
            measured=dev_y,
            tolerance=0.05,
            passed=dev_y <= 0.05,
            details={"exponents": expos, "target": b2},
        ))

    # (h) boundary limits at t = 0 by Richardson extrapolation
    boundary, b_checks = _boundary_checks(profile, spec)
    checks.extend(b_checks)
    diag["boundary"] = boundary

    # (i) inequality ledger: H < 1 and L + 1 - H < 0
    sx2 = np.einsum("ij,ij->i", traj.X, traj.X)
    sy2 = np.einsum("ij,ij->i", traj.Y, traj.Y)
    lh = sx2 + sy2 - traj.H  # L + 1 - H, formed without cancellation in L
    # deep in the tail L + 1 - H shrinks like Y^4 while X (a slaved
    # variable there) carries a ~1e-6 relative error, so the sign is only
    # resolvable down to a noise floor proportional to the state magnitude
    noise = 1e-5 * (sx2 + sy2) + 8.0 * np.finfo(float).eps * np.abs(traj.H)
    h_max = float(traj.H.max())
    lh_worst = float((lh - noise).max())
    checks.append(Check(
        "inequality_ledger",
        "H < 1 and L + 1 - H < 0 at every sample",
        measured=max(h_max - 1.0, lh_worst),
        tolerance=0.0,
        passed=h_max < 1.0 and lh_worst <= 0.0,
        details={"H_max": h_max, "L_plus_1_minus_H_max": float(lh.max())},
    ))

    # (j) nonnegative Ricci and soliton-equation residual
    min_ric = curv.min_ricci()
    checks.append(Check(
        "ricci_nonnegative",
        "smallest Ricci eigenvalue is nonnegative",
        measured=min_ric,
        tolerance=1e-8,
        passed=min_ric >= -1e-8,
        details={},
    ))
    checks.append(Check(
        "soliton_residual",
        "max |Ric + Hess u| over samples and directions",
        measured=curv.soliton_residual_max,
        tolerance=1e-6,
        passed=curv.soliton_residual_max <= 1e-6,
        details={},
    ))

    # (k) the potential's boundary value by two routes
    u0_quad = -(traj.H[0] - 1.0) / (2.0 * b2)  # gauge u(s_0) = 0 + exact tail
    c0 = (
        profile.u[0]
        - float((d * np.log(profile.g[0])).sum())
        + traj.s[0]
    )
    log_l = 0.0
    for i in range(1, r):
        log_l += d[i] * math.log(boundary["g_0"][i])
    d1, lam1 = d[0], spec.lambdas[0]
    u0_prod = (
        c0
        + log_l
        + 0.5 * d1 * math.log(lam_hat)
        + d1 * math.log(math.sqrt(d1 * lam1) / c.beta_hat)
    )
    dev_k = abs(u0_prod - u0_quad) / (1.0 + abs(u0_quad))
    diag["u0_quadrature"] = u0_quad
    diag["u0_product_formula"] = u0_prod
    checks.append(Check(
        "potential_boundary_value",
        "u(0) from the tail quadrature matches the product formula",
        measured=dev_k,
        tolerance=1e-3,
        passed=math.isfinite(u0_prod) and dev_k <= 1e-3,
        details={"u0_quadrature": u0_quad, "u0_product": u0_prod},
    ))

    # diagnostics that carry no pass/fail claim
    if r > 1:
        diag["Q_limits"] = _q_limits(traj, spec, L0)

    return VerifyReport(checks=checks, diagnostics=diag)


def _q_limits(traj: Trajectory, spec: ProblemSpec, L0: float):
    """Reported-only limits of (X_i/Y_i^2 - limit)/L at the seed end."""
    c = constants(spec)
    b2 = c.beta ** 2
    sqrt_d = np.sqrt(spec.dims)
    kappa_tr = 6000.0 ** (2.0 * b2 / (1.0 + b2))
    lo = min(kappa_tr * L0, 3e-3)
    hi = min(10.0 * lo, 3e-2)
    out = []
    for i in range(1, spec.r):
        target = 1.0 / (sqrt_d[i] * (1.0 + b2))
        lim, _ = seed_end_limit(
            traj,
            lambda X, Y, L, s, i=i: (X[:, i] / Y[:, i] ** 2 - target) / L,
            lo, hi,
        )
        out.append(lim)
    return out


def _boundary_checks(profile: MetricProfile, spec: ProblemSpec):
    """Richardson extrapolations of the profile fields to t = 0."""
    r = profile.r
    n_nodes = 5
    idx = _boundary_nodes(profile.t, n_nodes)
    t = profile.t[idx]

    def extrap(vals, parity):
        return richardson_extrapolate(list(zip(t, vals)), order=len(t) - 1,
                                      parity=parity)

    g1_0, g1_0e = extrap(profile.g[idx, 0], "none")
    g1d_0, g1d_0e = extrap(profile.g_dot[idx, 0], "even")
    g1dd_0, g1dd_0e = extrap(profile.g_ddot[idx, 0], "none")
    ud_0, ud_0e = extrap(profile.u_dot[idx], "none")
    udd_0, udd_0e = extrap(profile.u_ddot[idx], "even")
    g_0 = [g1_0]
    gd_0 = [g1d_0]
    gdd_0 = [g1dd_0]
    g_0_err = [g1_0e]
    for i in range(1, r):
        v, e = extrap(profile.g[idx, i], "even")
        g_0.append(v)
        g_0_err.append(e)
        gd_0.append(extrap(profile.g_dot[idx, i], "none")[0])
        gdd_0.append(extrap(profile.g_ddot[idx, i], "even")[0])
    gddd_0 = [richardson_extrapolate(
        list(zip(t, profile.g_dddot[idx, i])), order=len(t) - 1,
        parity="even" if i == 0 else "none")[0] for i in range(r)]

    boundary = {
        "g_0": g_0, "g_0_err": g_0_err, "g_dot_0": gd_0, "g_ddot_0": gdd_0,
        "g_dddot_0": gddd_0, "u_dot_0": ud_0, "u_ddot_0": udd_0,
    }

    checks = [
        Check(
            "collapse_g1",
            "g_1(0) = 0 and g_1'(0) = 1 (smooth collapse of the sphere factor)",
            measured=max(abs(g1_0), abs(g1d_0 - 1.0)),
            tolerance=1e-3,
            passed=abs(g1_0) <= 1e-3 and abs(g1d_0 - 1.0) <= 1e-3,
            details={"g1_0": g1_0, "g1_dot_0": g1d_0,
                     "errors": [g1_0e, g1d_0e]},
        ),
        Check(
            "collapse_g1_ddot",
            "g_1''(0) = 0",
            measured=abs(g1dd_0),
            tolerance=1e-2,
            passed=abs(g1dd_0) <= 1e-2,
            details={"error": g1dd_0e},
        ),
        Check(
            "potential_boundary_derivatives",
            "u'(0) = 0 with u''(0) finite",
            measured=abs(ud_0),
            tolerance=1e-3,
            passed=abs(ud_0) <= 1e-3 and math.isfinite(udd_0),
            details={"u_dot_0": ud_0, "u_ddot_0": udd_0,
                     "errors": [ud_0e, udd_0e]},
        ),
    ]
    if r > 1:
        dev = max(abs(v) for v in gd_0[1:])
        pos = all(v > 0 for v in g_0[1:])
        fin = all(math.isfinite(v) for v in gdd_0[1:] + gddd_0[1:])
        checks.append(Check(
            "noncollapsing_factors",
            "g_i(0) > 0 and g_i'(0) = 0 with finite g_i''(0) (i > 1)",
            measured=dev,
            tolerance=1e-3,
            passed=dev <= 1e-3 and pos and fin,
            details={"g_0": g_0[1:], "g_dot_0": gd_0[1:], "g_ddot_0": gdd_0[1:]},
        ))
    return boundary, checks


def _boundary_nodes(t: np.ndarray, n: int) -> np.ndarray:
    """Indices of n geometrically spread samples just above t_min."""
    targets = t[0] * 1.6 ** np.arange(n)
    idx = np.unique(np.searchsorted(t, targets).clip(0, len(t) - 1))
    k = 0
    while idx.size < n and k < len(t):
        if k not in idx:
            idx = np.unique(np.append(idx, k))
        k += 1
    return np.sort(idx)[:n]
