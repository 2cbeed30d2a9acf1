"""Command-line front end: profile, fit, shoot, simulate, compare, diagnose, pipeline.

Every command writes its artifacts plus a ``manifest.json`` into --out-dir.
A flat ``key = value`` file given with --config supplies defaults for any
flag (keys are flag names with underscores); explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time
import traceback
from pathlib import Path

from . import __version__
from . import io
from .asymptotics import decay_exponent, default_window, fit_far_field, lp_integrability_check
from .diagnostics import blowup_implication_check, conserved, p_star
from .errors import NLSBlowupError
from .nls_solver import REFERENCE_TIMES, FieldState, SimulationConfig, compare_with_analytic, init_from_profile, run
from .profile_ode import ProfileParams, integrate_profile
from .selfsimilar import SelfSimilarSolution, blowup_norm, scale_L
from .shooting import ShootOptions, shoot

log = logging.getLogger("nlsblowup")

REQUIRED = {
    "profile": ("sigma", "a", "q0"),
    "fit": ("sigma", "a", "q0"),
    "shoot": ("sigma",),
    "simulate": ("sigma", "a", "q0"),
    "compare": ("run_dir",),
    "diagnose": ("sigma", "a", "q0"),
    "pipeline": (),
}


class StageError(Exception):
    def __init__(self, stage: str, exc: Exception):
        super().__init__(f"stage '{stage}' failed: {exc}")
        self.stage = stage
        self.exc = exc


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(",") if v.strip())


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out-dir", default=".", help="directory for all outputs")
    common.add_argument("--config", help="flat key = value file supplying flag defaults")
    common.add_argument("--tol", type=float, default=1e-10, help="profile integrator tolerance")
    common.add_argument("-v", "--verbose", action="store_true")

    problem = argparse.ArgumentParser(add_help=False)
    problem.add_argument("--d", type=int, default=1)
    problem.add_argument("--sigma", type=float)

    profile_args = argparse.ArgumentParser(add_help=False)
    profile_args.add_argument("--a", type=float)
    profile_args.add_argument("--q0", type=complex)
    profile_args.add_argument("--rho-max", type=float, default=40.0)

    window = argparse.ArgumentParser(add_help=False)
    window.add_argument("--window-lo", type=float, help="default 0.6 * rho_max")
    window.add_argument("--window-hi", type=float, help="default rho_max")

    sim = argparse.ArgumentParser(add_help=False)
    sim.add_argument("--half-width", type=float, default=70.0)
    sim.add_argument("--dx", type=float, default=0.05)
    sim.add_argument("--dt", type=float, default=0.001)
    sim.add_argument("--t-end", type=float, default=REFERENCE_TIMES[-1])
    sim.add_argument("--snapshot-times", type=_floats, default=REFERENCE_TIMES,
                     help="comma-separated; times beyond --t-end are dropped")
    sim.add_argument("--nonlinear-iters", type=int, default=2)
    sim.add_argument("--diag-every", type=int, default=50)
    sim.add_argument("--core-radius", type=float, default=10.0)

    shoot_args = argparse.ArgumentParser(add_help=False)
    shoot_args.add_argument("--scale-a", type=float, default=ShootOptions.scale[0])
    shoot_args.add_argument("--scale-q", type=float, default=ShootOptions.scale[1])
    shoot_args.add_argument("--xtol", type=float, default=ShootOptions.xtol)
    shoot_args.add_argument("--max-evals", type=int, default=ShootOptions.max_evals)

    parser = argparse.ArgumentParser(prog="nlsblowup", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    parser.subcommands = sub.choices

    sub.add_parser("profile", parents=[common, problem, profile_args, window],
                   help="integrate a profile, fit its far field, measure its decay")
    sub.add_parser("fit", parents=[common, problem, profile_args, window],
                   help="far-field coefficients (c1, c2) of a profile")
    p = sub.add_parser("shoot", parents=[common, problem, shoot_args],
                       help="minimise the far-field objective over (a, Q(0))")
    p.add_argument("--a0", type=float, default=0.5)
    p.add_argument("--q0", type=float, default=1.3)
    p = sub.add_parser("simulate", parents=[common, problem, profile_args, sim],
                       help="direct NLS simulation from psi_0 = Q(|x|)")
    p = sub.add_parser("compare", parents=[common],
                       help="compare a simulate run against the explicit solution")
    p.add_argument("--run-dir", help="output directory of a previous simulate run")
    p.add_argument("--core-radius", type=float, default=10.0)
    p = sub.add_parser("diagnose", parents=[common, problem, profile_args, sim],
                       help="p*, integrability, blowup norms and conserved quantities")
    p.add_argument("--p-list", type=_floats, default=(1.8, 2.7, 4.0, 8.0))
    p = sub.add_parser("pipeline", parents=[common, problem, shoot_args, sim],
                       help="shoot, simulate and compare in one go")
    p.add_argument("--a0", type=float, default=0.5)
    p.add_argument("--q0", type=float, default=1.3)
    parser.set_defaults(d=1)
    return parser


def parse_args(argv=None) -> argparse.Namespace:
    parser = build_parser()
    pre, _ = parser.parse_known_args(argv)
    sub = parser.subcommands[pre.command]
    if pre.config:
        sub.set_defaults(**io.read_config(pre.config))
    args = parser.parse_args(argv)
    if args.command == "pipeline" and args.sigma is None:
        args.sigma = 1.9
    missing = [name for name in REQUIRED[args.command] if getattr(args, name, None) is None]
    if missing:
        sub.error("the following arguments are required: " + ", ".join("--" + m.replace("_", "-") for m in missing))
    return args


# ---------------------------------------------------------------------------
# commands


def _params(args) -> ProfileParams:
    return ProfileParams(args.d, args.sigma, args.a, args.q0)


def _window(args, profile):
    lo, hi = default_window(profile)
    return (args.window_lo if args.window_lo is not None else lo,
            args.window_hi if args.window_hi is not None else hi)


def cmd_profile(args, out: Path, outputs: list) -> dict:
    profile = integrate_profile(_params(args), args.rho_max, args.tol)
    fit = fit_far_field(profile, _window(args, profile))
    slope = decay_exponent(profile, fit.window)
    outputs.append(io.write_profile_csv(out / "profile.csv", profile))
    outputs.append(io.write_json(out / "fit.json", fit.to_json()))
    expected = -(args.d - 1.0 / args.sigma)
    outputs.append(io.write_json(out / "decay.json", {
        "window_lo": fit.window[0], "window_hi": fit.window[1],
        "slope": slope, "expected": expected, "relative_error": abs(slope / expected - 1.0),
    }))
    return {"nodes": int(profile.rho.size), "abs_c1": abs(fit.c1), "abs_c2": abs(fit.c2),
            "residual": fit.residual, "decay_slope": slope}


def cmd_fit(args, out: Path, outputs: list) -> dict:
    profile = integrate_profile(_params(args), args.rho_max, args.tol)
    fit = fit_far_field(profile, _window(args, profile))
    outputs.append(io.write_json(out / "fit.json", fit.to_json()))
    return {"abs_c1": abs(fit.c1), "abs_c2": abs(fit.c2), "residual": fit.residual}


def _shoot(args, out: Path, outputs: list):
    opts = ShootOptions(scale=(args.scale_a, args.scale_q), max_evals=args.max_evals,
                        xtol=args.xtol, tol=args.tol)
    result = shoot(args.d, args.sigma, (args.a0, args.q0), opts)
    outputs.append(io.write_json(out / "shoot.json", result.to_json()))
    outputs.append(io.write_trace_csv(out / "shoot_trace.csv", result.trace))
    return result


def cmd_shoot(args, out: Path, outputs: list) -> dict:
    return _shoot(args, out, outputs).to_json()


def _sim_config(args) -> SimulationConfig:
    times = tuple(t for t in args.snapshot_times if t <= args.t_end)
    return SimulationConfig(
        sigma=args.sigma, t_end=args.t_end, half_width=args.half_width, dx=args.dx, dt=args.dt,
        nonlinear_iters=args.nonlinear_iters, snapshot_times=times, diag_every=args.diag_every,
    )


def _simulate(params: ProfileParams, args, out: Path, outputs: list):
    if params.d != 1:
        raise NLSBlowupError("the PDE solver is one-dimensional (d = 1)")
    config = _sim_config(args)
    profile = integrate_profile(params, max(getattr(args, "rho_max", 0.0), config.half_width), args.tol)
    result = run(profile, config)
    snapshots = []
    for i, state in enumerate(result.snapshots):
        path = io.write_snapshot_csv(out / f"snapshot_{i}.csv", state.x, state.psi)
        outputs.append(path)
        snapshots.append({"file": path.name, "t": state.t})
    outputs.append(io.write_diagnostics_csv(out / "diagnostics.csv", result.trace))
    info = {
        "snapshots": snapshots,
        "blowup": None if result.blowup is None else {"t": result.blowup.t, "linf": result.blowup.linf},
        "params": {"d": params.d, "sigma": params.sigma, "a": params.a, "q0": params.q0,
                   "rho_max": profile.rho_max, "tol": args.tol},
        "config": {k: getattr(config, k) for k in SimulationConfig.field_names()},
    }
    return profile, result, info


def cmd_simulate(args, out: Path, outputs: list) -> dict:
    return _simulate(_params(args), args, out, outputs)[2]


def _compare(profile, states, core_radius, out: Path, outputs: list) -> list[dict]:
    sol = SelfSimilarSolution.unit_width(profile)
    rows = []
    for i, (t, x, psi) in enumerate(states):
        xs = x[abs(x) <= profile.rho_max * sol.L(t)]
        outputs.append(io.write_snapshot_csv(out / f"analytic_{i}.csv", xs, sol(t, xs)))
        state = FieldState(t, x, psi)
        rel_linf, rel_l2 = compare_with_analytic(state, sol, core_radius)
        rows.append({"t": t, "L": scale_L(sol.a, sol.Tc, t), "rel_linf": rel_linf, "rel_l2": rel_l2})
    outputs.append(io.write_csv(out / "compare.csv", ("t", "L", "rel_linf", "rel_l2"),
                                ((r["t"], r["L"], r["rel_linf"], r["rel_l2"]) for r in rows)))
    return rows


def cmd_compare(args, out: Path, outputs: list) -> dict:
    run_dir = Path(args.run_dir)
    manifest = json.loads((run_dir / "manifest.json").read_text())
    if manifest.get("status") != "ok" or manifest.get("command") != "simulate":
        raise NLSBlowupError(f"{run_dir} does not hold a successful simulate run")
    info = manifest["result"]
    p = info["params"]
    q0 = p["q0"]
    q0 = complex(q0["re"], q0["im"]) if isinstance(q0, dict) else complex(q0)
    params = ProfileParams(p["d"], p["sigma"], p["a"], q0)
    profile = integrate_profile(params, p["rho_max"], p["tol"])
    states = []
    for snap in info["snapshots"]:
        x, psi = io.read_snapshot_csv(run_dir / snap["file"])
        states.append((snap["t"], x, psi))
    return {"rows": _compare(profile, states, args.core_radius, out, outputs)}


def cmd_diagnose(args, out: Path, outputs: list) -> dict:
    params = _params(args)
    config = _sim_config(args)
    profile = integrate_profile(params, max(args.rho_max, config.half_width), args.tol)
    sol = SelfSimilarSolution.unit_width(profile)
    ps = p_star(args.sigma, args.d)
    integrability = {}
    for p in args.p_list:
        rep = lp_integrability_check(profile, p)
        integrability[format(p, "g")] = {"verdict": rep.verdict, "increment_ratios": rep.increment_ratios,
                                         "partial_integrals": rep.partial_integrals}
    norms = []
    for t in config.snapshot_times:
        for p in [p for p in args.p_list if p > ps] + [math.inf]:
            norms.append({"t": t, "p": p, "L": sol.L(t),
                          "norm": blowup_norm(sol, t, p),
                          "norm_without_volume_factor": blowup_norm(sol, t, p, volume_factor=False)})
    state0 = init_from_profile(profile, config)
    cq = conserved(state0, args.sigma)
    margins = [{"p": m.p, "norm": m.norm_p, "bound": m.bound, "margin": m.margin}
               for m in blowup_implication_check(state0, args.sigma)]
    report = {
        "p_star": ps,
        "integrability": integrability,
        "blowup_norms": norms,
        "initial_state": {"mass": cq.mass, "hamiltonian": cq.hamiltonian, "linf": cq.linf},
        "interpolation_margins": margins,
    }
    outputs.append(io.write_json(out / "diagnose.json", report))
    return {"p_star": ps}


def cmd_pipeline(args, out: Path, outputs: list) -> dict:
    stage = "shoot"
    try:
        res = _shoot(args, out, outputs)
        if not res.converged:
            raise NLSBlowupError(f"shooting did not converge after {res.evaluations} evaluations")
        stage = "simulate"
        params = ProfileParams(args.d, args.sigma, res.a_opt, res.q0_opt)
        profile, result, info = _simulate(params, args, out, outputs)
        outputs.append(io.write_profile_csv(out / "profile.csv", profile))
        fit = fit_far_field(profile, (24.0, 40.0))
        outputs.append(io.write_json(out / "fit.json", fit.to_json()))
        stage = "compare"
        states = [(s.t, s.x, s.psi) for s in result.snapshots]
        rows = _compare(profile, states, args.core_radius, out, outputs)
    except Exception as exc:
        raise StageError(stage, exc) from exc
    return {"shoot": res.to_json(), "simulate": info, "compare": rows}


COMMANDS = {
    "profile": cmd_profile,
    "fit": cmd_fit,
    "shoot": cmd_shoot,
    "simulate": cmd_simulate,
    "compare": cmd_compare,
    "diagnose": cmd_diagnose,
    "pipeline": cmd_pipeline,
}


def main(argv=None) -> int:
    args = parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    params = {k: v for k, v in sorted(vars(args).items()) if k not in ("command", "verbose")}
    outputs: list[Path] = []
    manifest = {"command": args.command, "params": params, "version": __version__}
    start = time.perf_counter()
    status = 0
    try:
        manifest["result"] = COMMANDS[args.command](args, out, outputs)
        manifest["status"] = "ok"
    except Exception as exc:
        status = 1
        manifest["status"] = "error"
        manifest["error"] = {
            "type": type(exc.exc if isinstance(exc, StageError) else exc).__name__,
            "message": str(exc),
            "stage": getattr(exc, "stage", args.command),
            "traceback": traceback.format_exc(),
        }
        print(f"nlsblowup {args.command}: {exc}", file=sys.stderr)
    manifest["outputs"] = [str(p) for p in outputs]
    manifest["wall_time"] = time.perf_counter() - start
    io.write_json(out / "manifest.json", manifest)
    return status


if __name__ == "__main__":
    sys.exit(main())
