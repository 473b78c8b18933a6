"""Experiment orchestration and command-line interface.

Verbs:
  dccat run <config.toml> [--out DIR] [--processes N]
  dccat preset <fig1c|fig2|fig3|freqscan|drift> [--out DIR] [--set k=v ...]
  dccat derive <config.toml>

Every run writes one directory containing manifest.json (resolved config +
code version) and the experiment's CSV/JSON artifacts.  Exit codes: 0 ok,
2 config error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, config as cfgmod
from .classical import ClassicalState, DivergenceError, integrate
from .config import ConfigError, ExperimentConfig
from .core import TWO_PI, derive
from .locking import sweep_tongue
from .noise import NoiseModel

MANIFEST_SCHEMA_VERSION = 1

OUTPUT_ROOT_ENV = "DCCAT_OUTPUT_ROOT"


class NumericalFailure(RuntimeError):
    pass


def _circular_stats(angles: np.ndarray):
    z = np.exp(1j * angles).mean()
    mean = float(np.angle(z))
    r = min(max(abs(z), 1e-300), 1.0)
    std = math.sqrt(max(-2.0 * math.log(r), 0.0))
    return mean, std


def _smooth(x, t, width):
    dt = t[1] - t[0]
    w = max(1, int(round(width / dt)))
    kern = np.ones(w) / w
    xs = np.convolve(x, kern, mode="valid")
    return xs, t[(w - 1) // 2 : (w - 1) // 2 + len(xs)]


def _write_csv(path, header, columns):
    rows = len(columns[0])
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for i in range(rows):
            fh.write(",".join(_cell(c[i]) for c in columns) + "\n")


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


# ---------------------------------------------------------------------------
# experiment runners; each returns (artifact names, summary dict)
# ---------------------------------------------------------------------------


def _extra(cfg: ExperimentConfig, defaults: dict) -> dict:
    given = cfg.extra()
    for key in given:
        if key not in defaults:
            raise ConfigError(f"unknown field {cfg.kind}.{key}")
    return {**defaults, **given}


def _run_prepare_cat_quantum(cfg: ExperimentConfig, out: Path, processes):
    from .quantum import (
        EFFECTIVE_RWA,
        FULL_TIME_DEPENDENT,
        FULL_WITH_FILTER,
        FockOperators,
        HamiltonianSpec,
        cat_fidelity,
        density,
        evolve,
        parity_expectation,
        ptrace_memory,
        wigner,
    )

    extra = _extra(cfg, {
        "model": "effective_rwa",
        "dims": [12, 4],
        "ramp_time": 50e-9,
        "t_final": -1.0,
        "n_checkpoints": 60,
        "g_bc": 20e6,
        "kappa_c": 80e6,
        "wigner": True,
        "wigner_extent": 0.0,
        "wigner_points": 41,
    })
    params = cfg.circuit()
    dp = derive(params)
    kind = {
        "effective_rwa": EFFECTIVE_RWA,
        "full_time_dependent": FULL_TIME_DEPENDENT,
        "full_with_filter": FULL_WITH_FILTER,
    }.get(extra["model"])
    if kind is None:
        raise ConfigError(f"prepare_cat_quantum.model: unknown {extra['model']!r}")
    dims = tuple(int(d) for d in extra["dims"])
    spec = HamiltonianSpec(
        kind,
        ramp_time=float(extra["ramp_time"]),
        g_bc=TWO_PI * float(extra["g_bc"]) if kind == FULL_WITH_FILTER else 0.0,
        kappa_c=TWO_PI * float(extra["kappa_c"]) if kind == FULL_WITH_FILTER else 0.0,
    )
    ops = FockOperators(dims)
    t_final = float(extra["t_final"])
    if t_final <= 0.0:
        t_final = float(extra["ramp_time"]) + 12.0 / dp.kappa_2
    ts = np.linspace(0.0, t_final, int(extra["n_checkpoints"]))
    alpha_target = dp.alpha_ss
    states = evolve(density(ops.vacuum()), spec, ops, params, ts)
    fid, par, tr = [], [], []
    for s in states:
        rho_a = ptrace_memory(s.rho, ops.dims)
        fid.append(cat_fidelity(rho_a, alpha_target, "even"))
        par.append(parity_expectation(rho_a))
        tr.append(s.trace())
    name = "fidelity_full.csv" if kind != EFFECTIVE_RWA else "fidelity_effective.csv"
    _write_csv(out / name, ["t", "fidelity", "parity", "trace"], [ts, fid, par, tr])
    artifacts = [name]
    summary = {
        "final_fidelity": fid[-1],
        "final_parity": par[-1],
        "alpha_target": [alpha_target.real, alpha_target.imag],
        "model": extra["model"],
        "dims": list(dims),
    }
    if extra["wigner"]:
        rho_a = ptrace_memory(states[-1].rho, ops.dims)
        ext = float(extra["wigner_extent"])
        if ext <= 0.0:
            ext = abs(alpha_target) + 2.0
        axis = np.linspace(-ext, ext, int(extra["wigner_points"]))
        w, warn = wigner(rho_a, axis, axis)
        re_grid, im_grid = np.meshgrid(axis, axis)
        _write_csv(
            out / "wigner.csv",
            ["re", "im", "w"],
            [re_grid.ravel(), im_grid.ravel(), w.ravel()],
        )
        artifacts.append("wigner.csv")
        summary["wigner_warning"] = warn
        states[-1].save(out / "final_state.npz", ops.dims)
        artifacts.append("final_state.npz")
    return artifacts, summary


def _locking_run_args(cfg: ExperimentConfig):
    params = cfg.circuit()
    dp = derive(params)
    if abs(params.eps_d) > 0 and dp.g2 != 0:
        mag = math.sqrt(abs(params.eps_d / dp.g2))
    else:
        mag = 0.0
    return params, dp, mag


def _classical_one(args):
    (params, noise, config, t_final, state0) = args
    traj = integrate(state0, t_final, params, noise, config)
    return traj


def _run_classical_locking(cfg: ExperimentConfig, out: Path, processes):
    extra = _extra(cfg, {
        "t_final": 1.0e-6,
        "n_seeds": 1,
        "eps_L_values": [],  # empty: use the circuit table's eps_L only
        "arrows_grid": 0,
        "arrows_t_final": 0.3e-6,
        "smooth_window": 5e-9,
        "tail_window": 0.5e-6,
    })
    base, dp, mag = _locking_run_args(cfg)
    cfg_int = cfg.integrator()
    noise0 = cfg.noise_model()
    t_final = float(extra["t_final"])
    panels = [float(v) for v in extra["eps_L_values"]] or [base.eps_L]
    artifacts, runs = [], []
    summary = {"panels": panels, "runs": runs}
    for eps_L in panels:
        params = base.replace(eps_L=eps_L)
        tag_eps = f"epsL{eps_L:g}"
        # locked runs settle at phi_J_hat = pi, which shifts the cat angle
        phi0 = math.pi if eps_L > 0 else 0.0
        theta0 = math.pi / 4.0 + phi0 / 2.0
        for s in range(int(extra["n_seeds"])):
            noise = NoiseModel(
                kind=noise0.kind,
                sigma=noise0.sigma,
                hold_dt=noise0.hold_dt,
                seed=cfg.seed + s,
                offset=noise0.offset,
            )
            for sign, tag in ((1.0, "plus"), (-1.0, "minus")):
                alpha0 = sign * mag * complex(math.cos(theta0), math.sin(theta0))
                name = f"traj_{tag_eps}_seed{cfg.seed + s}_{tag}.csv"
                traj = _classical_one(
                    (params, noise, cfg_int, t_final,
                     ClassicalState(alpha=alpha0, phi_J_hat=phi0))
                )
                traj.to_csv(out / name)
                artifacts.append(name)
                psi_s, ts = _smooth(traj.psi(), traj.times, float(extra["smooth_window"]))
                tail = ts > ts[-1] - float(extra["tail_window"])
                mean, std = _circular_stats(psi_s[tail])
                runs.append(
                    {
                        "file": name,
                        "eps_L": eps_L,
                        "psi_mean": mean,
                        "psi_circular_std": std,
                        "final_theta_a": float(traj.theta_a()[-1]),
                    }
                )
        if eps_L > 0 and dp.nu_0 > 0 and noise0.is_stochastic:
            from .noise import predicted_locked_std

            summary[f"predicted_psi_std_{tag_eps}"] = predicted_locked_std(
                noise0, eps_L, dp.nu_0
            )
        n_arrows = int(extra["arrows_grid"])
        if n_arrows > 0:
            rows = {"psi0": [], "theta0": [], "psi_f": [], "theta_f": []}
            grid = np.linspace(-math.pi, math.pi, n_arrows, endpoint=False)
            tgrid = np.linspace(-math.pi / 2, math.pi / 2, n_arrows, endpoint=False)
            arrow_jobs = []
            for psi0 in grid:
                for th0 in tgrid:
                    a0 = mag * complex(math.cos(th0), math.sin(th0))
                    arrow_jobs.append(
                        (
                            params,
                            NoiseModel(
                                kind=noise0.kind,
                                sigma=noise0.sigma,
                                hold_dt=noise0.hold_dt,
                                seed=cfg.seed + 7919,
                                offset=noise0.offset,
                            ),
                            cfg_int,
                            float(extra["arrows_t_final"]),
                            ClassicalState(alpha=a0, phi_J_hat=float(psi0)),
                        )
                    )
            if processes and processes > 1:
                with ProcessPoolExecutor(max_workers=processes) as pool:
                    trajs = list(pool.map(_classical_one, arrow_jobs, chunksize=4))
            else:
                trajs = [_classical_one(a) for a in arrow_jobs]
            k = 0
            for psi0 in grid:
                for th0 in tgrid:
                    traj = trajs[k]
                    k += 1
                    psi_s, ts = _smooth(
                        traj.psi(), traj.times, float(extra["smooth_window"])
                    )
                    th_s, _ = _smooth(
                        traj.theta_a(), traj.times, float(extra["smooth_window"])
                    )
                    rows["psi0"].append(float(psi0))
                    rows["theta0"].append(float(th0))
                    rows["psi_f"].append(float(psi_s[-1]))
                    rows["theta_f"].append(float(th_s[-1]))
            arrows_name = f"arrows_{tag_eps}.csv"
            _write_csv(
                out / arrows_name,
                ["psi0", "theta0", "psi_f", "theta_f"],
                [rows["psi0"], rows["theta0"], rows["psi_f"], rows["theta_f"]],
            )
            artifacts.append(arrows_name)
    return artifacts, summary


def _run_arnold_tongue(cfg: ExperimentConfig, out: Path, processes):
    extra = _extra(cfg, {
        "delta_max": 20e6,  # Hz
        "n_delta": 41,
        "eps_L_max": 0.2,
        "n_eps_L": 41,
        "t_f": 0.4e-6,
        "window": 0.1e-6,
        "threshold": 0.5e6,  # Hz
    })
    params = cfg.circuit()
    if cfg.noise_model().is_stochastic:
        raise ConfigError("arnold_tongue: tongue mapping uses constant detuning only")
    deltas = TWO_PI * np.linspace(
        -float(extra["delta_max"]), float(extra["delta_max"]), int(extra["n_delta"])
    )
    eps_axis = np.linspace(0.0, float(extra["eps_L_max"]), int(extra["n_eps_L"]))
    grid = sweep_tongue(
        params,
        deltas,
        eps_axis,
        eps_d=params.eps_d,
        t_f=float(extra["t_f"]),
        window=float(extra["window"]),
        threshold=TWO_PI * float(extra["threshold"]),
        config=cfg.integrator(),
        processes=processes,
    )
    grid.to_csv(out / "grid.csv")
    grid.to_json(out / "grid.json")
    asym = grid.asymmetry()
    finite = asym[np.isfinite(asym)]
    summary = {
        "locked_cells": int(grid.locked.sum()),
        "diverged_cells": int(grid.diverged.sum()),
        "mean_asymmetry": float(finite.mean()) if len(finite) else 0.0,
        "nbar": grid.boundaries["nbar"],
    }
    return ["grid.csv", "grid.json"], summary


def _scan_cell(args):
    (params, t_final, stats_window, config, alpha0) = args
    try:
        traj = integrate(ClassicalState(alpha=alpha0), t_final, params, None, config)
    except DivergenceError:
        return math.nan, math.nan, True
    tail = traj.times >= t_final - stats_window
    amps = np.abs(traj.alpha_rot()[tail])
    return float(np.mean(amps)), float(np.std(amps)), False


def _run_frequency_scan(cfg: ExperimentConfig, out: Path, processes):
    extra = _extra(cfg, {
        "omega_a_min": 0.3e9,
        "omega_a_max": 2.0e9,
        "n_points": 35,
        "omega_p": 7.0e9,
        "n_photons": 5.5,
        "t_final": 170e-9,
        "stats_window": 20e-9,
        "alpha0_frac": 0.05,
    })
    base = cfg.circuit()
    omega_p = TWO_PI * float(extra["omega_p"])
    lo, hi = TWO_PI * float(extra["omega_a_min"]), TWO_PI * float(extra["omega_a_max"])
    if not 0.0 < lo < hi < omega_p / 2.0:
        raise ConfigError("frequency_scan: omega_a axis must lie inside (0, omega_p/2)")
    axis = np.linspace(lo, hi, int(extra["n_points"]))
    jobs = []
    for wa in axis:
        p = base.replace(
            omega_a=float(wa),
            omega_b=float(omega_p + 2.0 * wa),
            omega_dc=float(omega_p),
            omega_d=float(omega_p + 2.0 * wa),
            omega_L=float(omega_p),
            R0=0.0,
            C0=0.0,
            eps_L=0.0,
        )
        dp = derive(p)
        eps_d = float(extra["n_photons"]) * abs(dp.g2)
        p = p.replace(eps_d=eps_d)
        target = math.sqrt(abs(p.eps_d / dp.g2)) if dp.g2 != 0 else 0.0
        alpha0 = float(extra["alpha0_frac"]) * target * complex(
            math.cos(math.pi / 4), math.sin(math.pi / 4)
        )
        jobs.append(
            (p, float(extra["t_final"]), float(extra["stats_window"]), cfg.integrator(), alpha0)
        )
    if processes and processes > 1:
        with ProcessPoolExecutor(max_workers=processes) as pool:
            results = list(pool.map(_scan_cell, jobs, chunksize=2))
    else:
        results = [_scan_cell(j) for j in jobs]
    means = [r[0] for r in results]
    stds = [r[1] for r in results]
    divs = [r[2] for r in results]
    _write_csv(
        out / "freqscan.csv",
        ["omega_a_hz", "mean_abs_alpha", "std_abs_alpha", "diverged"],
        [axis / TWO_PI, means, stds, divs],
    )
    ok = [i for i in range(len(axis)) if not divs[i]]
    best = min(ok, key=lambda i: stds[i]) if ok else -1
    summary = {
        "target_abs_alpha": math.sqrt(float(extra["n_photons"])),
        "best_omega_a_hz": float(axis[best] / TWO_PI) if best >= 0 else None,
        "best_std": stds[best] if best >= 0 else None,
        "diverged_cells": int(sum(divs)),
    }
    return ["freqscan.csv"], summary


def _drift_one(args):
    (params, noise, config, t_final, alpha0, threshold, smooth_window) = args
    traj = integrate(
        ClassicalState(alpha=alpha0), t_final, params, noise, config
    )
    th, ts = _smooth(np.unwrap(traj.theta_a()), traj.times, smooth_window)
    dev = np.abs(th - th[0])
    idx = np.argmax(dev > threshold)
    if dev[idx] > threshold:
        return float(ts[idx])
    return math.inf


def _run_noise_drift(cfg: ExperimentConfig, out: Path, processes):
    extra = _extra(cfg, {
        "n_seeds": 20,
        "t_final": -1.0,
        "threshold": math.pi / 4.0,
        "smooth_window": 10e-9,
    })
    params = cfg.circuit()
    if params.eps_L != 0.0:
        raise ConfigError("noise_drift: requires eps_L = 0")
    noise0 = cfg.noise_model()
    if not noise0.is_stochastic:
        raise ConfigError("noise_drift: requires stochastic (white_hold) noise")
    if int(extra["n_seeds"]) < 20:
        raise ConfigError("noise_drift: ensemble needs at least 20 seeds")
    dp = derive(params, noise_sigma=noise0.sigma, noise_dt=noise0.hold_dt)
    t_final = float(extra["t_final"])
    if t_final <= 0.0:
        t_final = 4.0 * dp.T_d if math.isfinite(dp.T_d) else 1e-6
    mag = math.sqrt(abs(params.eps_d / dp.g2)) if dp.g2 != 0 and params.eps_d else 0.0
    alpha0 = mag * complex(math.cos(math.pi / 4), math.sin(math.pi / 4))
    jobs = [
        (
            params,
            NoiseModel(
                kind=noise0.kind,
                sigma=noise0.sigma,
                hold_dt=noise0.hold_dt,
                seed=cfg.seed + s,
                offset=noise0.offset,
            ),
            cfg.integrator(),
            t_final,
            alpha0,
            float(extra["threshold"]),
            float(extra["smooth_window"]),
        )
        for s in range(int(extra["n_seeds"]))
    ]
    if processes and processes > 1:
        with ProcessPoolExecutor(max_workers=processes) as pool:
            crossings = list(pool.map(_drift_one, jobs, chunksize=1))
    else:
        crossings = [_drift_one(j) for j in jobs]
    _write_csv(
        out / "crossings.csv",
        ["seed", "crossing_time"],
        [list(range(cfg.seed, cfg.seed + len(crossings))), crossings],
    )
    finite = [c for c in crossings if math.isfinite(c)]
    summary = {
        "median_crossing": float(np.median(crossings)),
        "n_no_crossing": len(crossings) - len(finite),
        "predicted_T_d": dp.T_d,
        "t_final": t_final,
    }
    return ["crossings.csv"], summary


def _run_dephasing_check(cfg: ExperimentConfig, out: Path, processes):
    from .quantum import dephasing_channel_check

    extra = _extra(cfg, {
        "t_final": 2.0e-6,
        "dims": [12, 3],
        "n_seeds": 200,
        "hold_dt": 1e-9,
        "kappa_phi": -1.0,  # Hz; < 0 means derive from the noise table
        "n_photons": 2.0,
        "n_checkpoints": 8,
    })
    params = cfg.circuit()
    dp = derive(params)
    kphi = float(extra["kappa_phi"])
    if kphi < 0.0:
        noise0 = cfg.noise_model()
        kphi_rad = noise0.sigma**2 * noise0.hold_dt / 4.0
    else:
        kphi_rad = TWO_PI * kphi
    alpha0 = math.sqrt(float(extra["n_photons"])) * complex(
        math.cos(math.pi / 4), math.sin(math.pi / 4)
    )
    rep = dephasing_channel_check(
        dp.g2,
        params.kappa_b,
        kphi_rad,
        float(extra["t_final"]),
        dims=tuple(int(d) for d in extra["dims"]),
        n_seeds=int(extra["n_seeds"]),
        hold_dt=float(extra["hold_dt"]),
        alpha0=alpha0,
        n_checkpoints=int(extra["n_checkpoints"]),
        seed0=cfg.seed,
    )
    _write_csv(
        out / "distances.csv",
        ["t", "trace_distance"],
        [rep["times"], rep["trace_distance"]],
    )
    summary = {
        "max_distance": rep["max_distance"],
        "kappa_phi": kphi_rad,
        "n_seeds": rep["n_seeds"],
        "sigma": rep["sigma"],
        "hold_dt": rep["hold_dt"],
    }
    return ["distances.csv"], summary


_RUNNERS = {
    "prepare_cat_quantum": _run_prepare_cat_quantum,
    "classical_locking": _run_classical_locking,
    "arnold_tongue": _run_arnold_tongue,
    "frequency_scan": _run_frequency_scan,
    "noise_drift": _run_noise_drift,
    "dephasing_check": _run_dephasing_check,
}


def run(cfg: ExperimentConfig, out_dir, processes: int | None = None) -> Path:
    """Execute one experiment; returns the artifact directory."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.time()
    artifacts, summary = _RUNNERS[cfg.kind](cfg, out, processes)
    manifest = {
        "schema_version": MANIFEST_SCHEMA_VERSION,
        "package_version": __version__,
        "created_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "kind": cfg.kind,
        "name": cfg.name,
        "seed": cfg.seed,
        "config": cfg.table,
        "artifacts": sorted(artifacts),
        "summary": summary,
        "runtime_s": time.time() - t0,
    }
    with open(out / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True)
        fh.write("\n")
    return out


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------


def preset_table(name: str) -> dict:
    circuit_locking = {
        "R0": 100.0,
        "C0": 15.9e-12,
        "eps_L": 0.1,
        "n_photons": 5.5,
    }
    if name == "fig1c":
        return {
            "kind": "prepare_cat_quantum",
            "name": "fig1c",
            "seed": 1,
            "circuit": {"n_photons": 2.0},
            "prepare_cat_quantum": {
                "model": "effective_rwa",
                "dims": [12, 4],
                "ramp_time": 50e-9,
            },
        }
    if name == "fig2":
        return {
            "kind": "classical_locking",
            "name": "fig2",
            "seed": 2,
            "circuit": dict(circuit_locking),
            "noise": {"kind": "white_hold", "sigma": 0.1e9, "hold_dt": 1e-11},
            "classical_locking": {
                "t_final": 1.0e-6,
                "n_seeds": 1,
                "eps_L_values": [0.0, 0.1],
                "arrows_grid": 12,
                "arrows_t_final": 0.3e-6,
            },
        }
    if name == "fig3":
        return {
            "kind": "arnold_tongue",
            "name": "fig3",
            "seed": 3,
            "circuit": {"R0": 100.0, "C0": 15.9e-12, "n_photons": 0.0},
            "arnold_tongue": {},
        }
    if name == "freqscan":
        return {
            "kind": "frequency_scan",
            "name": "freqscan",
            "seed": 4,
            "circuit": {},
            "frequency_scan": {},
        }
    if name == "drift":
        return {
            "kind": "noise_drift",
            "name": "drift",
            "seed": 5,
            "circuit": {"R0": 100.0, "C0": 15.9e-12, "eps_L": 0.0, "n_photons": 5.5},
            "noise": {"kind": "white_hold", "sigma": 0.1e9, "hold_dt": 1e-11},
            "noise_drift": {"n_seeds": 20},
        }
    raise ConfigError(f"unknown preset {name!r}")


PRESETS = ("fig1c", "fig2", "fig3", "freqscan", "drift")


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def _default_out(name: str) -> Path:
    root = os.environ.get(OUTPUT_ROOT_ENV, "runs")
    return Path(root) / name


def _complex_json(z):
    if isinstance(z, complex):
        return [z.real, z.imag]
    raise TypeError


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="dccat",
        description="DC-biased Josephson junction cat-qubit simulations",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    p_run = sub.add_parser("run", help="run an experiment config")
    p_run.add_argument("config", type=Path)
    p_run.add_argument("--out", type=Path, default=None)
    p_run.add_argument("--processes", type=int, default=None)
    p_run.add_argument("--set", dest="overrides", action="append", default=[])

    p_preset = sub.add_parser("preset", help="run a named figure preset")
    p_preset.add_argument("name", choices=PRESETS)
    p_preset.add_argument("--out", type=Path, default=None)
    p_preset.add_argument("--processes", type=int, default=None)
    p_preset.add_argument("--set", dest="overrides", action="append", default=[])

    p_derive = sub.add_parser("derive", help="print derived parameters as JSON")
    p_derive.add_argument("config", type=Path)

    args = parser.parse_args(argv)
    try:
        if args.verb == "derive":
            cfg = cfgmod.load(args.config)
            noise = cfg.noise_model()
            dp = derive(cfg.circuit(), noise_sigma=noise.sigma, noise_dt=noise.hold_dt)
            payload = {
                "units": "rad/s (angular) and s",
                **{k: getattr(dp, k) for k in dp.__dataclass_fields__},
            }
            payload["warnings"] = list(payload["warnings"])
            for key, val in payload.items():
                if isinstance(val, float) and not math.isfinite(val):
                    payload[key] = None
            print(json.dumps(payload, indent=1, sort_keys=True, default=_complex_json))
            return 0
        if args.verb == "run":
            table = None
            cfg = cfgmod.load(args.config)
            if args.overrides:
                table = dict(cfg.table)
                for ov in args.overrides:
                    key, _, val = ov.partition("=")
                    cfgmod.set_override(table, key, val)
                cfg = cfgmod.from_table(table)
        else:
            table = preset_table(args.name)
            for ov in args.overrides:
                key, _, val = ov.partition("=")
                cfgmod.set_override(table, key, val)
            cfg = cfgmod.from_table(table)
        out = args.out if args.out is not None else _default_out(cfg.name)
        run(cfg, out, processes=args.processes)
        print(f"wrote {out}")
        return 0
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except (DivergenceError, NumericalFailure) as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return 3
    except Exception as err:
        from .quantum import EvolutionError

        if isinstance(err, EvolutionError):  # solver failures
            print(f"numerical failure: {err}", file=sys.stderr)
            return 3
        if isinstance(err, ValueError):  # domain guards (truncation etc.)
            print(f"config error: {err}", file=sys.stderr)
            return 2
        raise


if __name__ == "__main__":
    sys.exit(main())
