"""Command-line front end.

    stablefpe fpe solve        symmetric solver (presets example1, or inline expressions)
    stablefpe fpe asym         skewed-noise solver (preset example2)
    stablefpe fpe convergence  self-convergence table on a natural grid
    stablefpe fpe maxprinciple explicit-stepping audit with random data
    stablefpe mc compare       Monte-Carlo versus PDE density
    stablefpe filter run       twin experiment plus Zakai filter

Settings come from built-in defaults, then ``--config FILE.json``, then
explicit flags. Exit codes: 0 ok, 2 configuration error (including a
refused explicit step above the stability bound), 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import itertools
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Optional

import numpy as np

from . import experiments, presets
from .expressions import ExpressionError, compile_expression
from .fpe_core import Grid1D
from .model import StableNoiseModel
from .scheme_asymmetric import (
    COMPENSATORS,
    assemble_asym,
    build_asym_coefficients,
    check_max_principle_asym,
    solve_asym,
)
from .scheme_symmetric import IntegrationError, solve, stability_bound
from .stable_process import write_terminal_csv
from .zakai import FilterDegeneracyError, ObservationRecord, run_filter, simulate_twin

log = logging.getLogger("stablefpe")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# configuration

DEFAULTS: dict[str, dict[str, Any]] = {
    "fpe solve": dict(
        preset="example1", alpha=[1.5], g=["0"], f=None, sigma=None, boundary="absorbing", J=64,
        h=None, L_tilde=10.0, t0=presets.INIT_TIME, t_final=0.2, dt=None, stepper="implicit",
        snapshots=None, M_tilde=None, workers=1, out="out",
    ),
    "fpe asym": dict(
        preset="example2", alpha=[1.5], beta=[0.5], g=["0"], f=None, sigma=None, J=64,
        compensator="upwind", t0=presets.INIT_TIME, t_final=0.2, dt=1e-3, snapshots=None, workers=1, out="out",
    ),
    "fpe convergence": dict(
        preset="example1", alpha=[0.5], g=["0"], f=None, sigma=None, L_tilde=10.0, h=0.125,
        levels=3, dt=None, t0=presets.INIT_TIME, t_final=0.2, stepper="explicit", M_tilde=None,
        workers=1, out="out",
    ),
    "fpe maxprinciple": dict(
        preset="example1", alpha=[0.5, 1.5], sigma=None, boundary=["absorbing", "natural"], J=64,
        L_tilde=2.0, n_inits=100, steps=200, dt_fraction=0.9, M_tilde=3.0, seed=0, workers=1, out="out",
    ),
    "mc compare": dict(
        preset="example1", alpha=[1.5], g=["0"], f=None, sigma=None, J=32, paths=100_000,
        dt_mc=1e-4, dt=2e-5, t_final=0.2, seed=0, terminal_csv=False, workers=1, out="out",
    ),
    "filter run": dict(
        preset="example53", alpha=[0.5], observation="constant", theta=0.5, gain=2.5, h=1.0 / 32.0,
        L_tilde=4.0, dt=5e-4, T=5.0, x0=0.0, seed=0, record=None, keep_every=100, workers=1, out="out",
    ),
}

PRESETS = {"example1", "example2", "example2_negative", "example53", "filter_example"}


def _fmt(v: float) -> str:
    return format(float(v), ".12e")


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, Path):
        return str(o)
    raise TypeError(f"not serializable: {type(o).__name__}")


def load_config(path: Optional[str]) -> dict:
    if path is None:
        return {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not text.strip():
        raise ConfigError(f"config {path} is empty")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path}: JSON parse error at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config {path}: top level must be an object")
    return {k.replace("-", "_"): v for k, v in data.items()}


def merge_settings(command: str, file_cfg: dict, flags: dict) -> dict:
    base = dict(DEFAULTS[command])
    for key, value in file_cfg.items():
        if key not in base:
            raise ConfigError(f"unknown config key {key!r} for '{command}'")
        base[key] = value
    for key, value in flags.items():
        if value is not None and key in base:
            base[key] = value
    for key in ("alpha", "beta", "g", "boundary"):
        if key in base and not isinstance(base[key], list):
            base[key] = [base[key]]
    if base.get("preset") not in PRESETS and base.get("preset") is not None:
        raise ConfigError(f"unknown preset {base['preset']!r}; choose from {sorted(PRESETS)}")
    return base


def _expr(name: str, source) -> Any:
    try:
        return compile_expression(str(source))
    except ExpressionError as exc:
        raise ConfigError(f"{name}: {exc}") from exc


def build_model(cfg: dict, alpha: float, g_spec, beta: float = 0.0) -> StableNoiseModel:
    """Preset model with optional inline overrides of f, g and sigma."""
    g_const: Optional[float] = None
    g_expr = None
    if g_spec is not None:
        try:
            g_const = float(g_spec)
        except (TypeError, ValueError):
            g_expr = _expr("g", g_spec)
    preset = cfg.get("preset")
    if preset in ("example2", "example2_negative"):
        ctor = presets.example2 if preset == "example2" else presets.example2_negative
        model = ctor(alpha, beta, g_const or 0.0)
    elif preset in ("example53", "filter_example"):
        model = presets.bistable_signal(alpha)
    else:
        model = presets.example1(alpha, g_const or 0.0)
    changes: dict[str, Any] = {}
    if g_expr is not None:
        d1 = g_expr.derivative()
        changes.update(g=g_expr, g_deriv1=d1, g_deriv2=d1.derivative())
    if cfg.get("f"):
        fe = _expr("f", cfg["f"])
        changes.update(f=fe, f_prime=fe.derivative())
    if cfg.get("sigma"):
        se = _expr("sigma", cfg["sigma"])
        d1 = se.derivative()
        s0 = se(np.linspace(-1, 1, 5))
        mono = None
        if preset in ("example2", "example2_negative"):
            mono = "increasing" if np.all(d1(np.linspace(-1, 1, 201)) > 0) else "decreasing"
        changes.update(sigma=se, sigma_deriv1=d1, sigma_deriv2=d1.derivative(), sigma_monotone=mono)
        if not np.all(np.isfinite(s0)):
            raise ConfigError("sigma: non-finite value on [-1, 1]")
    if changes or beta != model.beta:
        changes["beta"] = beta
        try:
            model = model.replace(**changes)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    return model


# ---------------------------------------------------------------------------
# output helpers


class RunOutput:
    """Directory of one run; remembers every file it writes."""

    def __init__(self, root: Path, name: str):
        self.dir = root / name
        self.dir.mkdir(parents=True, exist_ok=True)
        self.files: list[Path] = []
        self.failed = False

    def csv(self, name: str, header: list[str], rows) -> Path:
        path = self.dir / name
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([c if isinstance(c, str) else _fmt(c) for c in row])
        self.files.append(path)
        return path

    def json(self, name: str, payload: dict) -> Path:
        path = self.dir / name
        path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n", encoding="utf-8")
        self.files.append(path)
        return path

    def register(self, path: Path) -> None:
        self.files.append(path)


def write_manifest(root: Path, command: str, settings: dict, runs: list[tuple[dict, RunOutput]]) -> Path:
    entries = []
    for params, ro in runs:
        for f in ro.files:
            entries.append(
                {
                    "path": str(f.relative_to(root)),
                    "sha256": hashlib.sha256(f.read_bytes()).hexdigest(),
                    "params": params,
                }
            )
    manifest = {"command": command, "settings": settings, "files": entries}
    path = root / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True, default=_json_default) + "\n", encoding="utf-8")
    return path


def _tag(**kw) -> str:
    return "_".join(f"{k}{v}" for k, v in kw.items())


def _sweep(settings: dict, keys: tuple[str, ...]):
    return [dict(zip(keys, combo)) for combo in itertools.product(*(settings[k] for k in keys))]


def _parallel(fn, jobs, workers: int):
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


def _times(settings: dict) -> list[float]:
    snaps = settings.get("snapshots")
    return [float(settings["t_final"])] if not snaps else [float(t) for t in snaps]


# ---------------------------------------------------------------------------
# commands


def cmd_fpe_solve(s: dict, root: Path):
    boundary = s["boundary"][0] if isinstance(s["boundary"], list) else s["boundary"]
    if boundary == "absorbing":
        grid = Grid1D.absorbing(int(s["J"]))
    elif boundary == "natural":
        h = s["h"] if s["h"] is not None else 1.0 / int(s["J"])
        grid = Grid1D.natural(float(s["L_tilde"]), float(h))
    else:
        raise ConfigError(f"boundary must be 'absorbing' or 'natural', got {boundary!r}")
    if s["stepper"] not in ("explicit", "implicit"):
        raise ConfigError(f"stepper must be 'explicit' or 'implicit', got {s['stepper']!r}")

    jobs = _sweep(s, ("alpha", "g"))
    models = {}
    for job in jobs:
        model = build_model(s, float(job["alpha"]), job["g"])
        M_tilde = s["M_tilde"] if s["M_tilde"] is not None else experiments.sup_abs_sigma(model, grid)
        bound = stability_bound(model.alpha, grid.h, M_tilde).dt_max
        dt = s["dt"] if s["dt"] is not None else (0.9 * bound if s["stepper"] == "explicit" else 1e-3)
        if s["stepper"] == "explicit" and dt > bound:
            raise ConfigError(f"dt={dt!r} exceeds the explicit stability bound dt_max={bound!r} (M_tilde={M_tilde})")
        models[id(job)] = (model, dt, bound, M_tilde)

    def run(job):
        model, dt, bound, M_tilde = models[id(job)]
        tr = solve(model, grid, presets.narrow_gaussian(grid), float(s["t0"]), float(s["t_final"]), dt,
                   s["stepper"], snapshots=_times(s))
        ro = RunOutput(root, _tag(alpha=job["alpha"], g=job["g"]))
        ro.csv("density.csv", ["t", "x", "p"], ((t, x, p) for t, row in zip(tr.times, tr.p) for x, p in zip(grid.x, row)))
        meta = dict(alpha=model.alpha, beta=0.0, g=str(job["g"]), sigma=s["sigma"] or s["preset"], f=s["f"] or s["preset"],
                    h=grid.h, dt=dt, dt_max=bound, M_tilde=M_tilde, boundary=grid.kind, stepper=s["stepper"],
                    t0=s["t0"], t_final=s["t_final"], mass=[grid.trapezoid(r) for r in tr.p])
        ro.json("metadata.json", meta)
        return job, ro

    return _parallel(run, jobs, int(s["workers"]))


def cmd_fpe_asym(s: dict, root: Path):
    grid = Grid1D.absorbing(int(s["J"]))
    jobs = _sweep(s, ("alpha", "beta", "g"))

    def run(job):
        model = build_model(s, float(job["alpha"]), job["g"], beta=float(job["beta"]))
        coeffs = build_asym_coefficients(model, grid)
        op = assemble_asym(model, grid, coeffs, compensator=s["compensator"])
        tr = solve_asym(model, grid, presets.narrow_gaussian(grid), float(s["t0"]), float(s["t_final"]),
                        float(s["dt"]), snapshots=_times(s), operator=op)
        report = check_max_principle_asym(tr, coeffs)
        ro = RunOutput(root, _tag(alpha=job["alpha"], beta=job["beta"], g=job["g"]))
        ro.csv("density.csv", ["t", "x", "p"], ((t, x, p) for t, row in zip(tr.times, tr.p) for x, p in zip(grid.x, row)))
        ro.csv("coefficients.csv", ["x", "c1", "c2", "M_hat", "N_hat", "case", "m"],
               ((x, a, b, c, d, str(e), str(int(f))) for x, a, b, c, d, e, f in
                zip(grid.x, coeffs.c1, coeffs.c2, coeffs.M_hat, coeffs.N_hat, coeffs.case_flag, coeffs.m)))
        meta = dict(alpha=model.alpha, beta=model.beta, g=str(job["g"]), sigma=s["sigma"] or s["preset"],
                    h=grid.h, dt=s["dt"], boundary="absorbing", stepper="implicit", compensator=s["compensator"],
                    wide_nodes=int(coeffs.wide[1:-1].sum()), narrow_nodes=int((~coeffs.wide[1:-1]).sum()),
                    hypotheses_hold=report.hypotheses_hold, extrema_on_boundary=report.extrema_on_boundary,
                    mass=[grid.trapezoid(r) for r in tr.p])
        ro.json("metadata.json", meta)
        return job, ro

    return _parallel(run, jobs, int(s["workers"]))


def cmd_fpe_convergence(s: dict, root: Path):
    jobs = _sweep(s, ("alpha", "g"))

    def run(job):
        model = build_model(s, float(job["alpha"]), job["g"])
        if s["stepper"] == "explicit" and s["dt"] is not None:
            M = s["M_tilde"] or experiments.sup_abs_sigma(model, Grid1D.natural(float(s["L_tilde"]), float(s["h"])))
            bound = stability_bound(model.alpha, float(s["h"]), M).dt_max
            if float(s["dt"]) > bound:
                raise ConfigError(f"dt={s['dt']!r} exceeds the explicit stability bound dt_max={bound!r}")
        res = experiments.convergence_study(
            model, float(s["L_tilde"]), float(s["h"]), int(s["levels"]), s["dt"], float(s["t0"]),
            float(s["t_final"]), s["stepper"], s["M_tilde"],
        )
        ro = RunOutput(root, _tag(alpha=job["alpha"], g=job["g"]))
        rates = [""] + [_fmt(r) for r in res.rates]
        ro.csv("convergence.csv", ["h", "dt", "error", "rate"],
               ((h, dt, e, r) for h, dt, e, r in zip(res.h, res.dt, res.errors, rates)))
        ro.json("metadata.json", dict(alpha=model.alpha, h_ref=res.h_ref, dt_ref=res.dt_ref, slope=res.slope,
                                      monotone=res.monotone, window=res.window, L_tilde=s["L_tilde"]))
        return job, ro

    return _parallel(run, jobs, int(s["workers"]))


def cmd_fpe_maxprinciple(s: dict, root: Path):
    jobs = _sweep(s, ("alpha", "boundary"))

    def run(job):
        base = build_model(s, float(job["alpha"]), None)
        model = base.replace(f=None, f_prime=None, g=None)
        if job["boundary"] == "absorbing":
            grid = Grid1D.absorbing(int(s["J"]))
        elif job["boundary"] == "natural":
            grid = Grid1D.natural(float(s["L_tilde"]), 1.0 / int(s["J"]))
        else:
            raise ConfigError(f"boundary must be 'absorbing' or 'natural', got {job['boundary']!r}")
        audit = experiments.max_principle_audit(model, grid, int(s["n_inits"]), int(s["steps"]),
                                                float(s["dt_fraction"]), s["M_tilde"], int(s["seed"]))
        ro = RunOutput(root, _tag(alpha=job["alpha"], bc=job["boundary"]))
        ro.json("audit.json", dict(audit.__dict__, ok=audit.ok))
        ro.failed = not audit.ok
        return job, ro

    return _parallel(run, jobs, int(s["workers"]))


def cmd_mc_compare(s: dict, root: Path):
    jobs = _sweep(s, ("alpha", "g"))

    def run(job):
        model = build_model(s, float(job["alpha"]), job["g"])
        res = experiments.monte_carlo_comparison(model, int(s["J"]), int(s["paths"]), float(s["dt_mc"]),
                                                 float(s["dt"]), float(s["t_final"]), int(s["seed"]))
        ro = RunOutput(root, _tag(alpha=job["alpha"], g=job["g"]))
        ro.csv("mc_density.csv", ["x", "p_pde", "p_mc"], zip(res.x, res.p_pde, res.p_mc))
        ro.json("summary.json", dict(alpha=model.alpha, l1=res.l1, mass_pde=res.mass_pde,
                                     survival_mc=res.survival_mc, paths=s["paths"], seed=s["seed"]))
        if s["terminal_csv"]:
            path = ro.dir / "terminal.csv"
            write_terminal_csv(res.ensemble, path)
            ro.register(path)
        return job, ro

    return _parallel(run, jobs, int(s["workers"]))


def cmd_filter_run(s: dict, root: Path):
    jobs = _sweep(s, ("alpha",))

    def run(job):
        alpha = float(job["alpha"])
        if s["observation"] == "constant":
            mdl = presets.filter_constant_theta(alpha, float(s["theta"]))
        elif s["observation"] == "informative":
            mdl = presets.filter_informative(alpha, float(s["gain"]))
        else:
            raise ConfigError(f"observation must be 'constant' or 'informative', got {s['observation']!r}")
        dt, T = float(s["dt"]), float(s["T"])
        n = int(round(T / dt))
        if n < 1 or abs(n * dt - T) > 1e-9 * T:
            raise ConfigError("T must be a whole multiple of dt")
        times, X, rec = simulate_twin(mdl, float(s["x0"]), dt, T, seed=int(s["seed"]))
        if s["record"]:
            try:
                rec = ObservationRecord.from_csv(s["record"])
            except (OSError, ValueError) as exc:
                raise ConfigError(f"record: {exc}") from exc
        grid = Grid1D.natural(float(s["L_tilde"]), float(s["h"]))
        init = presets.narrow_gaussian(grid)
        init.time = 0.0
        kappa = np.linspace(0.0, T, n + 1)
        keep = int(s["keep_every"])
        res = run_filter(mdl, grid, init, kappa, rec, keep_every=keep)
        ro = RunOutput(root, _tag(alpha=job["alpha"]))
        obs = ro.dir / "observations.csv"
        rec.to_csv(obs)
        ro.register(obs)
        ro.csv("filter_density.csv", ["t", "x", "p_unnormalized", "p_normalized"],
               ((t, x, pu, pn) for t, ru, rn in zip(res.times, res.p_unnormalized, res.p_normalized)
                for x, pu, pn in zip(grid.x, ru, rn)))
        idx = np.minimum(np.rint(res.times / dt).astype(int), len(X) - 1)
        ro.csv("tracking.csv", ["t", "mean", "signal"], zip(res.times, res.means, X[idx]))
        ro.csv("signal.csv", ["t", "x", "y"], zip(times, X, rec.drift_path if len(rec.drift_path) else np.zeros_like(X)))
        ro.json("metadata.json", dict(alpha=alpha, observation=s["observation"], theta=s["theta"], gain=s["gain"],
                                      h=grid.h, L_tilde=s["L_tilde"], dt=dt, T=T, seed=s["seed"],
                                      n_jumps=len(rec.jump_times), log_scale=res.log_scale,
                                      clip_defect=res.clip_defect))
        return job, ro

    return _parallel(run, jobs, int(s["workers"]))


COMMANDS = {
    "fpe solve": cmd_fpe_solve,
    "fpe asym": cmd_fpe_asym,
    "fpe convergence": cmd_fpe_convergence,
    "fpe maxprinciple": cmd_fpe_maxprinciple,
    "mc compare": cmd_mc_compare,
    "filter run": cmd_filter_run,
}


# ---------------------------------------------------------------------------
# argument parsing


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",")]


def _add_common(p: argparse.ArgumentParser, *names: str) -> None:
    p.add_argument("--config", help="JSON file with settings (flags override)")
    p.add_argument("--out", help="output directory")
    p.add_argument("--workers", type=int, help="threads for parameter sweeps")
    p.add_argument("--preset", help="built-in model")
    opts = {
        "alpha": dict(type=float, nargs="+", help="stable index (several values sweep)"),
        "beta": dict(type=float, nargs="+", help="skewness (several values sweep)"),
        "g": dict(nargs="+", help="Gaussian intensity: constant or expression in x"),
        "f": dict(help="drift expression in x"),
        "sigma": dict(help="stable-noise intensity expression in x"),
        "boundary": dict(nargs="+", help="absorbing or natural"),
        "J": dict(type=int, help="nodes per unit length (h = 1/J)"),
        "h": dict(type=float, help="grid spacing"),
        "L_tilde": dict(type=float, help="half-width of the natural grid"),
        "t0": dict(type=float, help="initial time"),
        "t_final": dict(type=float, help="final time"),
        "dt": dict(type=float, help="time step"),
        "stepper": dict(choices=["explicit", "implicit"]),
        "snapshots": dict(type=_floats, help="comma-separated output times"),
        "M_tilde": dict(type=float, help="bound on |sigma| for the stability check"),
        "levels": dict(type=int, help="grid levels below the reference"),
        "n_inits": dict(type=int, help="random initial states"),
        "steps": dict(type=int, help="explicit steps per initial state"),
        "dt_fraction": dict(type=float, help="dt as a fraction of dt_max"),
        "seed": dict(type=int, help="random seed"),
        "paths": dict(type=int, help="Monte-Carlo paths"),
        "dt_mc": dict(type=float, help="Euler-Maruyama step"),
        "terminal_csv": dict(action="store_const", const=True, help="also dump terminal positions"),
        "compensator": dict(choices=list(COMPENSATORS), help="difference quotient of the one-sided compensator"),
        "observation": dict(choices=["constant", "informative"], help="measure-change model"),
        "theta": dict(type=float, help="constant theta"),
        "gain": dict(type=float, help="mark mean per unit signal (informative model)"),
        "T": dict(type=float, help="filter horizon"),
        "x0": dict(type=float, help="signal start"),
        "record": dict(help="observation record CSV (t,z) to filter instead of the simulated one"),
        "keep_every": dict(type=int, help="store every k-th filter window"),
    }
    for name in names:
        flag = "--" + name.replace("_", "-")
        p.add_argument(flag, dest=name, **opts[name])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stablefpe", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    groups = parser.add_subparsers(dest="group", required=True)
    keys = {name: [k for k in DEFAULTS[name] if k not in ("preset", "workers", "out")] for name in DEFAULTS}
    for group in ("fpe", "mc", "filter"):
        gp = groups.add_parser(group).add_subparsers(dest="command", required=True)
        for name in DEFAULTS:
            g, c = name.split()
            if g == group:
                sub = gp.add_parser(c)
                _add_common(sub, *keys[name])
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    command = f"{args.group} {args.command}"
    flags = {k: v for k, v in vars(args).items() if k not in ("group", "command", "config", "verbose")}
    try:
        settings = merge_settings(command, load_config(args.config), flags)
        root = Path(settings["out"])
        runs = COMMANDS[command](settings, root)
        manifest = write_manifest(root, command, settings, runs)
    except (ConfigError, ExpressionError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (IntegrationError, FilterDegeneracyError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"wrote {manifest}")
    failed = [ro.dir.name for _, ro in runs if ro.failed]
    if failed:
        print(f"check failed in: {', '.join(failed)}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
