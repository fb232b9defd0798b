"""Command-line front end: reproducible runs with CSV/JSON/SVG artifacts.

Commands: breather, spectrum, sweep-lambda2, evolve, twist, two-site, escape.
Every run writes a manifest.json (config, version, wall time); data files
carry no volatile fields, so identical configs produce identical bytes.
Exit codes: 0 success, 2 config error, 3 numerical failure, 4 escape not
reached (informational).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, svgplot, two_site
from .breather import asymptotic_breather, solve_breather, twist, twist_leading
from .errors import BreatherLabError, ConfigError
from .lattice import CartesianState, LatticeParams
from .metastability import (Trajectory, detect_escape, modulation_trace, simulate)
from .numerics import IntegratorConfig
from .stability import spectrum, tangent_frame

COMMANDS = ("breather", "spectrum", "sweep-lambda2", "evolve", "twist",
            "two-site", "escape")
SEED_PROFILES = ("asymptotic", "single_site", "file")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_ESCAPE_NOT_REACHED = 4


@dataclass
class RunConfig:
    command: str
    n_sites: int = 3
    eps: float | list = 0.03
    gamma: float = 0.0035
    beta: float = 0.0
    omega: float = 1.0
    t_end: float = 1000.0
    output_dir: str = "out"
    sample_stride: float | None = None
    seed_profile: str = "asymptotic"
    e0: float = 0.505
    workers: int | None = None
    escape_fraction: float = 0.25
    dwell: float = 500.0
    checkpoint_interval: float = 1e4
    state_file: str | None = None

    def params(self, eps=None) -> LatticeParams:
        return LatticeParams(n_sites=self.n_sites,
                             eps=self.eps if eps is None else eps,
                             gamma=self.gamma, beta=self.beta, omega=self.omega)


_FIELD_TYPES = {
    "command": str, "n_sites": int, "eps": object, "gamma": float, "beta": float,
    "omega": float, "t_end": float, "output_dir": str, "sample_stride": object,
    "seed_profile": str, "e0": float, "workers": object, "escape_fraction": float,
    "dwell": float, "checkpoint_interval": float, "state_file": object,
}


def parse_eps_grid(text: str) -> list:
    """Expand "start:stop:step" into an inclusive grid of floats."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid spec must be start:stop:step, got {text!r}")
    start, stop, step = (float(p) for p in parts)
    if step <= 0 or stop < start:
        raise ValueError(f"grid spec needs stop >= start and step > 0, got {text!r}")
    n = int(round((stop - start) / step))
    grid = [start + k * step for k in range(n + 1)]
    if abs(grid[-1] - stop) > 1e-9 * max(1.0, abs(stop)):
        raise ValueError(f"step does not divide the grid range in {text!r}")
    return grid


def validate_config(raw: dict) -> RunConfig:
    """Normalize a key-value map into a RunConfig, reporting every problem."""
    problems = []
    unknown = sorted(set(raw) - set(_FIELD_TYPES))
    if unknown:
        problems.append(f"unknown keys: {', '.join(unknown)}")
    values = {}
    for key, val in raw.items():
        if key in unknown or val is None:
            continue
        values[key] = val

    command = values.get("command")
    if command not in COMMANDS:
        problems.append(f"command must be one of {COMMANDS}, got {command!r}")

    def take_number(key, cond=None, msg=""):
        if key not in values:
            return
        try:
            values[key] = float(values[key])
        except (TypeError, ValueError):
            problems.append(f"{key} must be a number, got {values[key]!r}")
            return
        if not math.isfinite(values[key]):
            problems.append(f"{key} must be finite")
        elif cond is not None and not cond(values[key]):
            problems.append(f"{key} {msg}, got {values[key]}")

    if "n_sites" in values:
        try:
            values["n_sites"] = int(values["n_sites"])
            if values["n_sites"] < 2:
                problems.append(f"n_sites must be >= 2, got {values['n_sites']}")
        except (TypeError, ValueError):
            problems.append(f"n_sites must be an integer, got {values['n_sites']!r}")

    if "eps" in values:
        e = values["eps"]
        if isinstance(e, str) and ":" in e:
            try:
                values["eps"] = parse_eps_grid(e)
            except ValueError as exc:
                problems.append(str(exc))
        else:
            try:
                values["eps"] = float(e)
                if not math.isfinite(values["eps"]):
                    problems.append("eps must be finite")
            except (TypeError, ValueError):
                problems.append(f"eps must be a number or start:stop:step grid, got {e!r}")
        if isinstance(values.get("eps"), list) and command != "sweep-lambda2":
            problems.append("an eps grid is only valid for sweep-lambda2")

    take_number("gamma", lambda v: v >= 0, "must be >= 0")
    take_number("beta", lambda v: v >= 0, "must be >= 0")
    take_number("omega", lambda v: v > 0, "must be > 0")
    take_number("t_end", lambda v: v > 0, "must be > 0")
    take_number("e0", lambda v: v > 0, "must be > 0")
    take_number("escape_fraction", lambda v: 0 < v < 1, "must be in (0, 1)")
    take_number("dwell", lambda v: v >= 0, "must be >= 0")
    take_number("checkpoint_interval", lambda v: v > 0, "must be > 0")
    if values.get("sample_stride") is not None:
        take_number("sample_stride", lambda v: v > 0, "must be > 0")
    if values.get("workers") is not None:
        try:
            values["workers"] = int(values["workers"])
            if values["workers"] < 1:
                problems.append("workers must be >= 1")
        except (TypeError, ValueError):
            problems.append(f"workers must be an integer, got {values['workers']!r}")
    if "seed_profile" in values and values["seed_profile"] not in SEED_PROFILES:
        problems.append(f"seed_profile must be one of {SEED_PROFILES}, "
                        f"got {values['seed_profile']!r}")
    if values.get("seed_profile") == "file" and not values.get("state_file"):
        problems.append("seed_profile=file requires state_file")

    if problems:
        raise ConfigError(problems)
    return RunConfig(**values)


def _fmt(x) -> str:
    return f"{x:.17e}"


def _write_csv(path, header, columns):
    rows = len(columns[0])
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for i in range(rows):
            fh.write(",".join(_fmt(col[i]) for col in columns) + "\n")


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, default=_json_default, sort_keys=True)
        fh.write("\n")


def _breather_payload(br):
    return {
        "n_sites": br.params.n_sites,
        "eps": br.params.eps,
        "gamma": br.params.gamma,
        "omega": br.omega,
        "beta_star": br.params.beta,
        "residual_norm": br.residual_norm,
        "p": br.state.p,
        "q": br.state.q,
        "site_energies": br.state.site_energies(),
    }


def _config_hash(cfg: RunConfig) -> str:
    payload = asdict(cfg)
    payload.pop("output_dir", None)
    payload.pop("workers", None)
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()


def _seed_state(cfg: RunConfig, eps: float) -> CartesianState:
    if cfg.seed_profile == "asymptotic":
        return asymptotic_breather(eps, cfg.gamma, cfg.omega, cfg.n_sites).state
    if cfg.seed_profile == "single_site":
        p = np.zeros(cfg.n_sites)
        p[0] = math.sqrt(cfg.omega)
        return CartesianState(p=p, q=np.zeros(cfg.n_sites))
    with open(cfg.state_file) as fh:
        data = json.load(fh)
    return CartesianState(p=np.asarray(data["p"], dtype=float),
                          q=np.asarray(data["q"], dtype=float))


def _sample_grid(t_end, stride):
    count = int(math.floor(t_end / stride + 1e-9)) + 1
    ts = stride * np.arange(count)
    if ts[-1] < t_end - 1e-9 * max(1.0, t_end):
        ts = np.append(ts, t_end)
    return ts


def _simulate_checkpointed(cfg: RunConfig, state0: CartesianState,
                           params: LatticeParams, outdir: Path) -> Trajectory:
    """Integrate in checkpoint_interval segments so long runs can resume."""
    stride = cfg.sample_stride or max(cfg.t_end / 2000.0, 1e-6)
    grid = _sample_grid(cfg.t_end, stride)
    ck_json = outdir / "checkpoint.json"
    ck_npz = outdir / "checkpoint_samples.npz"
    conf_hash = _config_hash(cfg)

    t_now = 0.0
    y_now = state0.as_vector()
    times = []
    states = []
    if ck_json.exists() and ck_npz.exists():
        meta = json.loads(ck_json.read_text())
        if meta.get("config_hash") == conf_hash:
            t_now = float(meta["t"])
            y_now = np.asarray(meta["y"], dtype=float)
            saved = np.load(ck_npz)
            times = list(saved["times"])
            states = list(saved["states"])

    while t_now < cfg.t_end:
        seg_end = min(t_now + cfg.checkpoint_interval, cfg.t_end)
        mask = (grid > t_now + 1e-12) & (grid <= seg_end) if times else (grid <= seg_end)
        t_eval = grid[mask]
        traj = simulate(CartesianState.from_vector(y_now), params, t_end=seg_end,
                        t_start=t_now, t_eval=t_eval)
        times.extend(traj.times)
        states.extend(traj.states)
        t_now = traj.t_final
        y_now = traj.y_final
        if t_now < cfg.t_end:
            _write_json(ck_json, {"config_hash": conf_hash, "t": t_now, "y": y_now})
            np.savez(ck_npz, times=np.asarray(times), states=np.asarray(states))
    for stale in (ck_json, ck_npz):
        if stale.exists():
            stale.unlink()
    return Trajectory(times=np.asarray(times), states=np.asarray(states),
                      params=params, t_final=t_now, y_final=y_now)


def _trace_csv(path, trace):
    n = trace.energies.shape[1]
    header = (["t"] + [f"E_{j+1}" for j in range(n)]
              + [f"psi_{j+1}" for j in range(n - 1)]
              + ["omega", "alpha1", "alpha2_tilde"])
    cols = [trace.times]
    cols += [trace.energies[:, j] for j in range(n)]
    cols += [trace.phase_diffs[:, j] for j in range(n - 1)]
    cols += [trace.omega_of_t, trace.alpha1, trace.alpha2_tilde]
    _write_csv(path, header, cols)


def _run_trace(cfg: RunConfig, outdir: Path):
    params = cfg.params()
    state0 = _seed_state(cfg, cfg.eps)
    reference = solve_breather(cfg.eps, cfg.gamma, cfg.omega, cfg.n_sites)
    frame = tangent_frame(reference)
    traj = _simulate_checkpointed(cfg, state0, params, outdir)
    trace = modulation_trace(traj, reference, frame)
    _trace_csv(outdir / "trace.csv", trace)
    n = trace.energies.shape[1]
    svgplot.line_plot(outdir / "plot_trace_energy.svg",
                      [{"x": trace.times, "y": trace.energies[:, j],
                        "label": f"E_{j+1}"} for j in range(n)],
                      title="site energies", xlabel="t", ylabel="E_j")
    svgplot.line_plot(outdir / "plot_trace_twist.svg",
                      [{"x": trace.times, "y": trace.phase_diffs[:, -1],
                        "label": f"psi_{n-1}"},
                       {"x": trace.times, "y": cfg.gamma / trace.omega_of_t,
                        "label": "gamma/omega"},
                       {"x": trace.times, "y": cfg.gamma / (2.0 * trace.energies[:, 0]),
                        "label": "gamma/(2 E_1)"}],
                      title="twist at the damped-end bond", xlabel="t", ylabel="psi")
    return trace


def cmd_breather(cfg: RunConfig, outdir: Path) -> int:
    br = solve_breather(cfg.eps, cfg.gamma, cfg.omega, cfg.n_sites)
    _write_json(outdir / "breather.json", _breather_payload(br))
    print(f"beta* = {br.params.beta:.12e}  residual = {br.residual_norm:.3e}")
    return EXIT_OK


def cmd_spectrum(cfg: RunConfig, outdir: Path) -> int:
    br = solve_breather(cfg.eps, cfg.gamma, cfg.omega, cfg.n_sites)
    rep = spectrum(br)
    _write_json(outdir / "breather.json", _breather_payload(br))
    _write_csv(outdir / "spectrum.csv", ["re", "im"],
               [rep.eigenvalues.real, rep.eigenvalues.imag])
    svgplot.line_plot(outdir / "plot_spectrum.svg",
                      [{"x": rep.eigenvalues.real, "y": rep.eigenvalues.imag,
                        "label": "eigenvalues", "marker": True, "line": False}],
                      title="linearization spectrum", xlabel="Re", ylabel="Im")
    for v in rep.eigenvalues:
        print(f"{v.real:+.9e}  {v.imag:+.9e}i")
    if rep.lambda2 is not None:
        print(f"lambda2 = {rep.lambda2:.9e}  predicted = {rep.lambda2_predicted:.9e}")
    return EXIT_OK


def _sweep_cell(payload):
    eps, gamma, omega, n_sites, cell_dir = payload
    br = solve_breather(eps, gamma, omega, n_sites)
    rep = spectrum(br)
    cell = Path(cell_dir)
    cell.mkdir(parents=True, exist_ok=True)
    _write_json(cell / "breather.json", _breather_payload(br))
    _write_csv(cell / "spectrum.csv", ["re", "im"],
               [rep.eigenvalues.real, rep.eigenvalues.imag])
    return {"eps": eps, "lambda2": rep.lambda2, "predicted": rep.lambda2_predicted}


def cmd_sweep_lambda2(cfg: RunConfig, outdir: Path) -> int:
    grid = cfg.eps if isinstance(cfg.eps, list) else [cfg.eps]
    workers = cfg.workers
    if workers is None:
        env = os.environ.get("BREATHER_LAB_THREADS")
        workers = int(env) if env else (os.cpu_count() or 1)
    workers = max(1, min(workers, len(grid)))
    jobs = [(e, cfg.gamma, cfg.omega, cfg.n_sites,
             str(outdir / f"cell_eps_{e:.6g}")) for e in grid]
    if workers == 1:
        results = [_sweep_cell(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_cell, jobs))
    results.sort(key=lambda r: r["eps"])
    eps_v = np.array([r["eps"] for r in results])
    lam = np.array([r["lambda2"] for r in results])
    pred = np.array([r["predicted"] for r in results])
    _write_csv(outdir / "sweep_lambda2.csv",
               ["eps", "lambda2_computed", "lambda2_predicted"], [eps_v, lam, pred])
    svgplot.line_plot(outdir / "plot_sweep_lambda2.svg",
                      [{"x": eps_v, "y": lam, "label": "computed", "marker": True,
                        "line": False},
                       {"x": eps_v, "y": pred, "label": "2(2N-2) gamma eps^(2N-2)"}],
                      title="small positive eigenvalue", xlabel="eps",
                      ylabel="lambda2", logy=True)
    for r in results:
        print(f"eps={r['eps']:g}  lambda2={r['lambda2']:.6e}  "
              f"predicted={r['predicted']:.6e}")
    return EXIT_OK


def cmd_evolve(cfg: RunConfig, outdir: Path) -> int:
    _run_trace(cfg, outdir)
    return EXIT_OK


def cmd_twist(cfg: RunConfig, outdir: Path) -> int:
    br = solve_breather(cfg.eps, cfg.gamma, cfg.omega, cfg.n_sites)
    psi = twist(br)
    lead = twist_leading(br.params)
    _write_json(outdir / "breather.json", _breather_payload(br))
    _write_csv(outdir / "twist.csv", ["bond", "psi", "psi_leading"],
               [np.arange(1, cfg.n_sites, dtype=float), psi, lead])
    svgplot.line_plot(outdir / "plot_twist.svg",
                      [{"x": np.arange(1, cfg.n_sites), "y": np.abs(psi),
                        "label": "|psi_j|", "marker": True},
                       {"x": np.arange(1, cfg.n_sites), "y": np.abs(lead),
                        "label": "leading order", "marker": True}],
                      title="breather twist", xlabel="bond j", ylabel="|psi_j|",
                      logy=True)
    for j, (a, b) in enumerate(zip(psi, lead), start=1):
        print(f"psi_{j} = {a:+.9e}   leading {b:+.9e}")
    return EXIT_OK


def cmd_two_site(cfg: RunConfig, outdir: Path) -> int:
    horizon = two_site.tau(cfg.e0, cfg.eps, cfg.gamma)
    stride = cfg.sample_stride or horizon / 2000.0
    ts = _sample_grid(max(horizon - 1e-3, stride), stride)
    ts = ts[ts < horizon]
    energy = two_site.energy_evolution(cfg.e0, cfg.eps, cfg.gamma, ts)
    psi = np.full_like(ts, np.nan)
    valid = energy**2 - cfg.eps**2 > 0.25 * cfg.gamma**2
    psi[valid] = np.asarray(
        two_site.phase_shift_approx(energy[valid], cfg.eps, cfg.gamma))
    _write_csv(outdir / "two_site.csv", ["t", "energy", "psi"], [ts, energy, psi])
    svgplot.line_plot(outdir / "plot_two_site_energy.svg",
                      [{"x": ts, "y": energy, "label": "E(t)"}],
                      title="two-site energy law", xlabel="t", ylabel="E")
    svgplot.line_plot(outdir / "plot_two_site_phase.svg",
                      [{"x": ts, "y": psi, "label": "psi(t)"}],
                      title="two-site phase shift", xlabel="t", ylabel="psi")
    print(f"tau = {horizon:.1f}")
    return EXIT_OK


def cmd_escape(cfg: RunConfig, outdir: Path) -> int:
    trace = _run_trace(cfg, outdir)
    report = detect_escape(trace, fraction=cfg.escape_fraction, dwell=cfg.dwell)
    _write_json(outdir / "escape.json", {
        "escape_time": None if not report.reached else report.escape_time,
        "reached": report.reached,
        "criterion": report.criterion,
        "final_energies": report.final_energies,
    })
    if report.reached:
        print(f"escape_time = {report.escape_time:.1f}")
        return EXIT_OK
    print("escape not reached within t_end")
    return EXIT_ESCAPE_NOT_REACHED


_RUNNERS = {
    "breather": cmd_breather,
    "spectrum": cmd_spectrum,
    "sweep-lambda2": cmd_sweep_lambda2,
    "evolve": cmd_evolve,
    "twist": cmd_twist,
    "two-site": cmd_two_site,
    "escape": cmd_escape,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="breather-lab",
        description="Damped-driven breathers: solve, analyze, and simulate.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="JSON file with config values")
        p.add_argument("--n", dest="n_sites", type=int, default=None)
        p.add_argument("--eps", default=None,
                       help="coupling; sweep-lambda2 accepts start:stop:step")
        p.add_argument("--gamma", type=float, default=None)
        p.add_argument("--beta", type=float, default=None)
        p.add_argument("--omega", type=float, default=None)
        p.add_argument("--t-end", dest="t_end", type=float, default=None)
        p.add_argument("--out", dest="output_dir", default=None)
        p.add_argument("--stride", dest="sample_stride", type=float, default=None)
        p.add_argument("--seed-profile", dest="seed_profile", default=None,
                       choices=SEED_PROFILES)
        p.add_argument("--state-file", dest="state_file", default=None)
        p.add_argument("--e0", type=float, default=None)
        p.add_argument("--workers", type=int, default=None)
        p.add_argument("--escape-fraction", dest="escape_fraction",
                       type=float, default=None)
        p.add_argument("--dwell", type=float, default=None)
        p.add_argument("--checkpoint-interval", dest="checkpoint_interval",
                       type=float, default=None)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    started = time.perf_counter()
    try:
        raw = {}
        if args.config:
            with open(args.config) as fh:
                raw.update(json.load(fh))
        for key in _FIELD_TYPES:
            val = getattr(args, key, None)
            if val is not None:
                raw[key] = val
        raw["command"] = args.command
        cfg = validate_config(raw)
    except ConfigError as exc:
        json.dump({"error": "ConfigError", "problems": exc.problems}, sys.stderr)
        sys.stderr.write("\n")
        return EXIT_CONFIG
    except (OSError, json.JSONDecodeError) as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return EXIT_CONFIG

    outdir = Path(cfg.output_dir)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        code = _RUNNERS[cfg.command](cfg, outdir)
    except BreatherLabError as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return EXIT_NUMERICAL
    _write_json(outdir / "manifest.json", {
        "config": asdict(cfg),
        "version": __version__,
        "wall_time_s": time.perf_counter() - started,
        "argv": list(argv) if argv is not None else sys.argv[1:],
    })
    return code


if __name__ == "__main__":
    sys.exit(main())
