"""Command-line batch tool: config parsing, orchestration, and export.

Subcommands
    solve       integrate and reconstruct, export the profile
    verify      solve + full verification suite (exit 0 iff all checks pass)
    curvature   solve + curvature report
    oracle      solve + independent second-order cross-validation
    ricci-flat  solve in Ricci-flat mode and report the flatness residuals
    sweep       grid of seed-coefficient ratios, one output set per point

Config files are strict JSON: unknown keys are rejected so a misspelled
tolerance can never silently fall back to a default.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, replace

import numpy as np

from . import flow, geometry, oracle, reconstruct, verify
from .errors import IoError, ParseError, SolitonForgeError
from .model import FactorSpec, Mode, ProblemSpec, StepControls, validate_spec

OUT_ENV_VAR = "SOLITONFORGE_OUT"

_TOP_KEYS = {
    "factors", "gauge_C", "seed_coeffs", "s_start", "s_max", "origin_tol",
    "rtol", "atol", "max_steps", "initial_step", "mode", "output", "sweep",
}
_FACTOR_KEYS = {"dim", "lambda"}
_OUTPUT_KEYS = {"directory", "formats", "thin", "plots"}
_SWEEP_KEYS = {"coeff_index", "ratios"}

_PLOT_SERIES = {
    "L_vs_s": ("s", lambda p: (p.s, p.L)),
    "H_vs_s": ("s", lambda p: (p.s, p.H)),
    "u_vs_t": ("t", lambda p: (p.t, p.u)),
    "u_dot_vs_t": ("t", lambda p: (p.t, p.u_dot)),
}


@dataclass
class RunConfig:
    """Parsed configuration: a problem spec plus output controls."""

    spec: ProblemSpec
    out_dir: str = "."
    formats: tuple[str, ...] = ("csv", "json")
    thin: int = 1
    plots: tuple[str, ...] = ()
    sweep_coeff_index: int = 1
    sweep_ratios: tuple[float, ...] = ()


def _reject_unknown(mapping: dict, allowed: set, where: str) -> None:
    for key in mapping:
        if key not in allowed:
            raise ParseError(f"unknown key {key!r} in {where}")


def parse_config(source: str, inline: bool = False) -> RunConfig:
    """Parse a strict JSON config from a path (or inline text)."""
    if inline:
        text = source
    else:
        try:
            with open(source, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise IoError(f"cannot read config {source}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"config line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise ParseError("config must be a JSON object")
    _reject_unknown(raw, _TOP_KEYS, "config")

    if "factors" not in raw or not isinstance(raw["factors"], list) or not raw["factors"]:
        raise ParseError("config field 'factors' must be a non-empty list")
    factors = []
    for k, f in enumerate(raw["factors"]):
        if not isinstance(f, dict):
            raise ParseError(f"factors[{k}] must be an object")
        _reject_unknown(f, _FACTOR_KEYS, f"factors[{k}]")
        if "dim" not in f:
            raise ParseError(f"factors[{k}] is missing 'dim'")
        dim = int(f["dim"])
        lam = float(f.get("lambda", dim - 1))
        factors.append(FactorSpec(dim=dim, einstein_const=lam))

    mode_name = str(raw.get("mode", "soliton")).lower().replace("-", "_")
    try:
        mode = Mode[mode_name.upper()]
    except KeyError:
        raise ParseError(f"unknown mode {raw.get('mode')!r}") from None

    controls = StepControls(
        initial_step=raw.get("initial_step"),
        rtol=float(raw.get("rtol", 1e-10)),
        atol=float(raw.get("atol", 1e-10)),
        max_steps=int(raw.get("max_steps", 100_000)),
    )
    seed_coeffs = raw.get("seed_coeffs")
    spec = ProblemSpec(
        factors=tuple(factors),
        gauge_C=float(raw.get("gauge_C", -1.0)),
        seed_coeffs=None if seed_coeffs is None else tuple(float(v) for v in seed_coeffs),
        s_start=float(raw.get("s_start", 0.0)),
        s_max=float(raw.get("s_max", 1e18)),
        origin_tol=float(raw.get("origin_tol", 1e-8)),
        step_controls=controls,
        mode=mode,
    )
    validate_spec(spec)

    out = raw.get("output", {})
    if not isinstance(out, dict):
        raise ParseError("config field 'output' must be an object")
    _reject_unknown(out, _OUTPUT_KEYS, "output")
    formats = tuple(out.get("formats", ("csv", "json")))
    for fmt in formats:
        if fmt not in ("csv", "json"):
            raise ParseError(f"unknown output format {fmt!r}")
    thin = int(out.get("thin", 1))
    if thin < 1:
        raise ParseError("output.thin must be >= 1")

    sweep = raw.get("sweep", {})
    if not isinstance(sweep, dict):
        raise ParseError("config field 'sweep' must be an object")
    _reject_unknown(sweep, _SWEEP_KEYS, "sweep")

    return RunConfig(
        spec=spec,
        out_dir=out.get("directory", os.environ.get(OUT_ENV_VAR, ".")),
        formats=formats,
        thin=thin,
        plots=tuple(out.get("plots", ())),
        sweep_coeff_index=int(sweep.get("coeff_index", 1)),
        sweep_ratios=tuple(float(v) for v in sweep.get("ratios", ())),
    )


# --------------------------------------------------------------------------
# export


def _fmt(x: float) -> str:
    return f"{x:.16e}"  # 17 significant digits round-trips doubles exactly


def profile_csv_header(r: int) -> list[str]:
    cols = ["s", "t"]
    cols += [f"X_{i + 1}" for i in range(r)]
    cols += [f"Y_{i + 1}" for i in range(r)]
    cols += ["L", "H"]
    cols += [f"g_{i + 1}" for i in range(r)]
    cols += [f"g_dot_{i + 1}" for i in range(r)]
    cols += [f"g_ddot_{i + 1}" for i in range(r)]
    cols += ["u", "u_dot", "u_ddot"]
    return cols


def export_profile_csv(profile, traj, path: str, thin: int = 1) -> None:
    r = profile.r
    sel = slice(None, None, thin)
    cols = [profile.s[sel], profile.t[sel]]
    cols += [traj.X[sel, i] for i in range(r)]
    cols += [traj.Y[sel, i] for i in range(r)]
    cols += [profile.L[sel], profile.H[sel]]
    cols += [profile.g[sel, i] for i in range(r)]
    cols += [profile.g_dot[sel, i] for i in range(r)]
    cols += [profile.g_ddot[sel, i] for i in range(r)]
    cols += [profile.u[sel], profile.u_dot[sel], profile.u_ddot[sel]]
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(",".join(profile_csv_header(r)) + "\n")
            for row in zip(*cols):
                fh.write(",".join(_fmt(v) for v in row) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def read_profile_csv(path: str):
    """Round-trip reader: header list plus a column-name -> array mapping."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline().strip().split(",")
            data = np.loadtxt(fh, delimiter=",", ndmin=2)
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    return header, {name: data[:, j] for j, name in enumerate(header)}


def _write_json(obj: dict, path: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(obj, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def export_plot_series(profile, names, out_dir: str) -> list[str]:
    """Two-column (abscissa, value) text files, one per requested series."""
    written = []
    r = profile.r
    series = dict(_PLOT_SERIES)
    for i in range(r):
        series[f"g{i + 1}_vs_t"] = ("t", lambda p, i=i: (p.t, p.g[:, i]))
        series[f"g{i + 1}_dot_vs_t"] = ("t", lambda p, i=i: (p.t, p.g_dot[:, i]))
    for name in names:
        if name not in series:
            raise ParseError(f"unknown plot series {name!r}")
        xname, getter = series[name]
        x, y = getter(profile)
        path = os.path.join(out_dir, f"{name}.dat")
        try:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(f"# {xname} {name}\n")
                for xv, yv in zip(x, y):
                    fh.write(f"{_fmt(xv)} {_fmt(yv)}\n")
        except OSError as exc:
            raise IoError(f"cannot write {path}: {exc}") from exc
        written.append(path)
    return written


# --------------------------------------------------------------------------
# orchestration


def _solve(cfg: RunConfig):
    traj = flow.run(cfg.spec)
    profile = reconstruct.build_profile(traj, cfg.spec)
    return traj, profile


def _export_run(cfg: RunConfig, traj, profile, extra_json: dict | None = None,
                tag: str = "profile") -> dict:
    os.makedirs(cfg.out_dir, exist_ok=True)
    summary = {
        "dims": list(cfg.spec.dims),
        "lambdas": list(cfg.spec.lambdas),
        "mode": cfg.spec.mode.name.lower(),
        "seed_coeffs": list(cfg.spec.seed_coeffs),
        "gauge_C": cfg.spec.gauge_C,
        "termination": traj.termination,
        "n_steps": traj.n_steps,
        "kappa_estimate": traj.kappa_estimate,
        "t_first": float(profile.t[0]),
        "t_last": float(profile.t[-1]),
        "u_gauge": profile.u_gauge,
    }
    if extra_json:
        summary.update(extra_json)
    if "csv" in cfg.formats:
        export_profile_csv(profile, traj, os.path.join(cfg.out_dir, f"{tag}.csv"),
                           thin=cfg.thin)
    if "json" in cfg.formats:
        _write_json(summary, os.path.join(cfg.out_dir, f"{tag}.json"))
    if cfg.plots:
        export_plot_series(profile, cfg.plots, cfg.out_dir)
    return summary


def cmd_solve(cfg: RunConfig) -> int:
    traj, profile = _solve(cfg)
    _export_run(cfg, traj, profile)
    print(f"solve: {traj.n_steps} steps, termination={traj.termination}, "
          f"t in [{profile.t[0]:.6g}, {profile.t[-1]:.6g}]")
    return 0


def cmd_verify(cfg: RunConfig) -> int:
    traj, profile = _solve(cfg)
    curv = geometry.sectional_curvatures(profile, cfg.spec)
    report = verify.run_suite(traj, profile, curv, cfg.spec)
    os.makedirs(cfg.out_dir, exist_ok=True)
    _write_json(report.to_dict(), os.path.join(cfg.out_dir, "verify_report.json"))
    _export_run(cfg, traj, profile)
    for line in report.summary_lines():
        print(line)
    print(f"verify: {'PASS' if report.passed else 'FAIL'} "
          f"({sum(c.passed for c in report.checks)}/{len(report.checks)} checks)")
    return 0 if report.passed else 1


def cmd_curvature(cfg: RunConfig) -> int:
    traj, profile = _solve(cfg)
    curv = geometry.sectional_curvatures(profile, cfg.spec)
    asym = geometry.asymptotics(profile, cfg.spec)
    extra = {
        "min_ricci": curv.min_ricci(),
        "soliton_residual_max": curv.soliton_residual_max,
        "g_gdot_limits": list(asym.g_gdot_limit),
        "g_sq_over_t_limits": list(asym.g_sq_over_t_limit),
        "curvature_slope": asym.curvature_slope,
        "scalar_slope": asym.scalar_slope,
    }
    _export_run(cfg, traj, profile, extra_json=extra)
    if "csv" in cfg.formats:
        _export_curvature_csv(cfg, profile, curv)
    print(f"curvature: min Ricci {curv.min_ricci():.3e}, "
          f"residual {curv.soliton_residual_max:.3e}, "
          f"|K| slope {asym.curvature_slope:+.4f}")
    return 0


def _export_curvature_csv(cfg, profile, curv) -> None:
    r = profile.r
    header = ["t", "ric_tt"] + [f"ric_factor_{i + 1}" for i in range(r)]
    header += [f"sect_mixed_t_{i + 1}" for i in range(r)] + ["scalar_R"]
    cols = [curv.t, curv.ric_tt]
    cols += [curv.ric_factor[:, i] for i in range(r)]
    cols += [curv.sectional_mixed_t[:, i] for i in range(r)]
    cols += [curv.scalar_R]
    path = os.path.join(cfg.out_dir, "curvature.csv")
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(",".join(header) + "\n")
            for row in zip(*cols):
                fh.write(",".join(_fmt(v) for v in row) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def cmd_oracle(cfg: RunConfig) -> int:
    traj, profile = _solve(cfg)
    t0 = 10.0 * float(profile.t[0])
    state = oracle.init_from_profile(profile, t0)
    run = oracle.integrate_second_order(state, cfg.spec, t_end=min(
        100.0 * t0, float(profile.t[-1])))
    devs = oracle.compare_profiles(profile, run)
    extra = {
        "oracle_t0": t0,
        "oracle_deviations": devs,
        "conservation_drift": run.conservation_drift(),
    }
    _export_run(cfg, traj, profile, extra_json=extra)
    worst = max(devs.values())
    print(f"oracle: max relative deviation {worst:.3e}, "
          f"conservation drift {run.conservation_drift():.3e}")
    return 0 if worst <= 1e-6 and run.conservation_drift() <= 1e-8 else 1


def cmd_ricci_flat(cfg: RunConfig) -> int:
    spec = replace(cfg.spec, mode=Mode.RICCI_FLAT)
    validate_spec(spec)
    cfg = replace(cfg, spec=spec)
    traj, profile = _solve(cfg)
    ric_tt, ric_factor = geometry.ricci_components(profile, cfg.spec)
    max_L = float(np.abs(traj.L).max())
    max_H = float(np.abs(traj.H - 1.0).max())
    max_ric = float(max(np.abs(ric_tt).max(), np.abs(ric_factor).max()))
    extra = {"max_abs_L": max_L, "max_abs_H_minus_1": max_H,
             "max_abs_ricci": max_ric,
             "max_abs_u_dot": float(np.abs(profile.u_dot).max())}
    _export_run(cfg, traj, profile, extra_json=extra)
    print(f"ricci-flat: |L| <= {max_L:.3e}, |H-1| <= {max_H:.3e}, "
          f"|Ric| <= {max_ric:.3e}")
    return 0


def cmd_sweep(cfg: RunConfig) -> int:
    ratios = cfg.sweep_ratios or (0.5, 1.0, 2.0, 4.0, 8.0)
    idx = cfg.sweep_coeff_index
    base = list(cfg.spec.seed_coeffs)
    if not 1 <= idx < len(base):
        raise ParseError(f"sweep coeff_index {idx} out of range for r={len(base)}")
    results = []
    os.makedirs(cfg.out_dir, exist_ok=True)
    for k, ratio in enumerate(ratios):
        coeffs = list(base)
        coeffs[idx] = ratio * abs(base[0])
        point_spec = cfg.spec.with_seed_coeffs(tuple(coeffs))
        point_cfg = replace(
            cfg, spec=point_spec,
            out_dir=os.path.join(cfg.out_dir, f"sweep_{k:02d}"), plots=())
        traj, profile = _solve(point_cfg)
        report = verify.run_suite(
            traj, profile, geometry.sectional_curvatures(profile, point_cfg.spec),
            point_cfg.spec)
        g0 = report.diagnostics["boundary"]["g_0"]
        g0_err = report.diagnostics["boundary"]["g_0_err"]
        _export_run(point_cfg, traj, profile, extra_json={
            "ratio": ratio, "g_0": list(g0), "g_0_err": list(g0_err)})
        results.append({"ratio": ratio, "g_0": list(g0),
                        "g_0_err": list(g0_err)})
        print(f"sweep[{k}]: ratio {ratio:g} -> g_{idx + 1}(0) = {g0[idx]:.8f} "
              f"(+/- {g0_err[idx]:.2e})")
    _write_json({"coeff_index": idx, "points": results},
                os.path.join(cfg.out_dir, "sweep_report.json"))
    # pairwise distinctness beyond combined extrapolation error estimates
    distinct = True
    for a in range(len(results)):
        for b in range(a + 1, len(results)):
            ga, gb = results[a]["g_0"][idx], results[b]["g_0"][idx]
            ea, eb = results[a]["g_0_err"][idx], results[b]["g_0_err"][idx]
            if abs(ga - gb) <= ea + eb:
                distinct = False
    print(f"sweep: g_{idx + 1}(0) values pairwise distinct: {distinct}")
    return 0 if distinct else 1


_COMMANDS = {
    "solve": cmd_solve,
    "verify": cmd_verify,
    "curvature": cmd_curvature,
    "oracle": cmd_oracle,
    "ricci-flat": cmd_ricci_flat,
    "sweep": cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="solitonforge",
        description="Numerical construction and verification of steady "
                    "gradient Ricci solitons on multiply warped products.")
    p.add_argument("command", choices=sorted(_COMMANDS))
    p.add_argument("--config", required=True, help="path to a JSON config")
    p.add_argument("--out", help="output directory (overrides config and "
                                 f"${OUT_ENV_VAR})")
    p.add_argument("--format", choices=("csv", "json"),
                   help="restrict exports to one format")
    p.add_argument("--tol", type=float,
                   help="override both integration tolerances (rtol = atol)")
    p.add_argument("--seed-eps0", type=float,
                   help="override the primary seed coefficient")
    p.add_argument("--seed-eps", action="append", default=[],
                   metavar="i=value",
                   help="override seed coefficient i (1-based, repeatable)")
    return p


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    spec = cfg.spec
    if args.tol is not None:
        spec = replace(spec, step_controls=replace(
            spec.step_controls, rtol=args.tol, atol=args.tol))
    coeffs = list(spec.seed_coeffs)
    if args.seed_eps0 is not None:
        coeffs[0] = args.seed_eps0
    for item in args.seed_eps:
        try:
            pos, val = item.split("=", 1)
            pos = int(pos)
            val = float(val)
        except ValueError:
            raise ParseError(f"--seed-eps expects i=value, got {item!r}") from None
        if not 1 <= pos <= len(coeffs):
            raise ParseError(f"--seed-eps index {pos} out of range 1..{len(coeffs)}")
        coeffs[pos - 1] = val
    spec = spec.with_seed_coeffs(tuple(coeffs))
    validate_spec(spec)
    out_dir = args.out if args.out is not None else cfg.out_dir
    formats = (args.format,) if args.format else cfg.formats
    return replace(cfg, spec=spec, out_dir=out_dir, formats=formats)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = parse_config(args.config)
        cfg = _apply_overrides(cfg, args)
        return _COMMANDS[args.command](cfg)
    except SolitonForgeError as exc:
        print(f"error [{type(exc).__name__}]: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
