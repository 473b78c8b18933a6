"""Figure renderers: each takes a RunBundle, returns the matplotlib Figure,
and writes PNG + SVG next to each other under the chosen output directory.

Every figure carries the manifest's config hash in a footer and in the file
metadata, so a plot can always be traced back to the exact resolved config.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .bundle import BundleError, RunBundle

TWO_PI = 2.0 * math.pi


def _finalize(fig, bundle: RunBundle, out_dir, stem: str):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    tag = f"dccat:{bundle.name} config:{bundle.config_hash()}"
    fig.text(0.99, 0.01, tag, ha="right", va="bottom", fontsize=6, color="0.4")
    paths = []
    for ext in ("png", "svg"):
        p = out_dir / f"{stem}.{ext}"
        fig.savefig(p, dpi=180, metadata={"Title": tag})
        paths.append(p)
    plt.close(fig)
    return paths


def plot_fidelity(bundle: RunBundle, out_dir) -> list:
    """Cat-state fidelity vs time with an inset zoom on the final infidelity;
    overlays the effective and full curves when both are present."""
    series = bundle.fidelity_series()
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    styles = {"effective": ("k--", "effective model"), "full": ("C0-", "full model")}
    for label, data in series.items():
        sty, leg = styles[label]
        ax.plot(data["t"] * 1e9, data["fidelity"], sty, label=leg)
    ax.set_xlabel("time (ns)")
    ax.set_ylabel("cat-state fidelity")
    ax.set_ylim(0.0, 1.02)
    ax.legend(loc="lower right")
    inset = ax.inset_axes([0.45, 0.25, 0.5, 0.35])
    for label, data in series.items():
        sty, _ = styles[label]
        tail = data["t"] >= 0.7 * data["t"][-1]
        inset.semilogy(
            data["t"][tail] * 1e9, np.maximum(1.0 - data["fidelity"][tail], 1e-12), sty
        )
    inset.set_ylabel("infidelity", fontsize=8)
    inset.tick_params(labelsize=7)
    out = _finalize(fig, bundle, out_dir, "fidelity")
    if (bundle.path / "wigner.csv").exists():
        out += plot_wigner(bundle, out_dir)
    return out


def plot_wigner(bundle: RunBundle, out_dir) -> list:
    re_axis, im_axis, w = bundle.wigner_map()
    fig, ax = plt.subplots(figsize=(4.6, 4.0))
    lim = 2.0 / math.pi
    pcm = ax.pcolormesh(
        re_axis, im_axis, w, cmap="RdBu_r", vmin=-lim, vmax=lim, shading="nearest"
    )
    fig.colorbar(pcm, ax=ax, label=r"W")
    ax.set_xlabel(r"Re $\beta$")
    ax.set_ylabel(r"Im $\beta$")
    ax.set_aspect("equal")
    return _finalize(fig, bundle, out_dir, "wigner")


def plot_phase_space(bundle: RunBundle, out_dir) -> list:
    """Rotating-frame memory trajectories, psi(t) panels and, when arrow data
    is present, the (psi, theta_a) convergence map."""
    trajs = bundle.trajectories()
    arrows = bundle.arrows()
    n_rows = 2 + (1 if arrows else 0)
    fig, axes = plt.subplots(n_rows, 1, figsize=(6.0, 3.0 * n_rows))
    axes = np.atleast_1d(axes)

    ax = axes[0]
    for name, data in trajs.items():
        amp = np.hypot(data["re_alpha"], data["im_alpha"])
        # rotating-frame amplitude reconstructed from |alpha| and theta_a
        ax.plot(
            amp * np.cos(data["theta_a"]),
            amp * np.sin(data["theta_a"]),
            lw=0.7,
            label=name.replace("traj_", "").replace(".csv", ""),
        )
    ax.set_xlabel(r"Re $\alpha$ (rotating)")
    ax.set_ylabel(r"Im $\alpha$ (rotating)")
    ax.set_aspect("equal")
    ax.legend(fontsize=6, loc="upper right")

    ax = axes[1]
    for name, data in trajs.items():
        ax.plot(data["t"] * 1e9, data["psi"], lw=0.7)
    ax.axhline(math.pi, color="0.6", ls=":")
    ax.set_xlabel("time (ns)")
    ax.set_ylabel(r"$\psi$ (rad)")

    if arrows:
        ax = axes[2]
        for name, data in arrows.items():
            dpsi = np.angle(np.exp(1j * (data["psi_f"] - data["psi0"])))
            dth = np.angle(np.exp(1j * (data["theta_f"] - data["theta0"])))
            ax.quiver(
                data["psi0"],
                data["theta0"],
                dpsi,
                dth,
                angles="xy",
                scale_units="xy",
                scale=1.0,
                width=0.003,
                alpha=0.8,
            )
        ax.set_xlabel(r"$\psi_0$ (rad)")
        ax.set_ylabel(r"$\theta_{a,0}$ (rad)")
    fig.tight_layout()
    return _finalize(fig, bundle, out_dir, "phase_space")


def build_tongue_figure(bundle: RunBundle):
    """The Arnold-tongue figure object, boundary overlays taken verbatim from
    the grid metadata (dashed: bare, solid: photon-number corrected)."""
    grid = bundle.arnold_grid()
    fig, ax = plt.subplots(figsize=(6.0, 4.4))
    deltas_mhz = grid["delta_omega"] / TWO_PI / 1e6
    psi_dot = grid["psi_dot"] / TWO_PI / 1e6
    vmax = np.nanmax(np.abs(psi_dot)) or 1.0
    pcm = ax.pcolormesh(
        deltas_mhz,
        grid["eps_L"],
        psi_dot,
        cmap="RdBu_r",
        vmin=-vmax,
        vmax=vmax,
        shading="nearest",
    )
    fig.colorbar(pcm, ax=ax, label=r"$\dot\psi/2\pi$ (MHz)")
    bounds = grid["meta"].get("boundaries", {})
    eps_axis = np.asarray(bounds.get("eps_L", []))
    if len(eps_axis):
        bare = np.asarray(bounds["bare_half_width"]) / TWO_PI / 1e6
        corr = np.asarray(bounds["corrected_half_width"]) / TWO_PI / 1e6
        for sign in (1.0, -1.0):
            ax.plot(
                sign * bare,
                eps_axis,
                "r--",
                lw=1.0,
                label="bare" if sign > 0 else None,
                gid="boundary-bare",
            )
            ax.plot(
                sign * corr,
                eps_axis,
                "w-",
                lw=1.0,
                label="corrected" if sign > 0 else None,
                gid="boundary-corrected",
            )
        ax.legend(loc="upper right", fontsize=7)
        ax.set_xlim(deltas_mhz.min(), deltas_mhz.max())
    ax.set_xlabel(r"$\delta\omega/2\pi$ (MHz)")
    ax.set_ylabel(r"$\epsilon_L$")
    return fig


def plot_tongue(bundle: RunBundle, out_dir) -> list:
    return _finalize(build_tongue_figure(bundle), bundle, out_dir, "tongue")


def plot_freqscan(bundle: RunBundle, out_dir) -> list:
    data = bundle.freqscan()
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ghz = data["omega_a_hz"] / 1e9
    ax.plot(ghz, data["mean_abs_alpha"], "C0-", label=r"mean $|\alpha|$")
    ax.set_xlabel(r"$\omega_a/2\pi$ (GHz)")
    ax.set_ylabel(r"mean $|\alpha|$", color="C0")
    ax2 = ax.twinx()
    ax2.plot(ghz, data["std_abs_alpha"], "C3-", label=r"std $|\alpha|$")
    ax2.set_ylabel(r"std $|\alpha|$", color="C3")
    target = bundle.manifest.get("summary", {}).get("target_abs_alpha")
    if target:
        ax.axhline(target, color="0.5", ls="--", lw=0.8)
    return _finalize(fig, bundle, out_dir, "freqscan")


_RENDERERS = {
    "fig1c": plot_fidelity,
    "fig2": plot_phase_space,
    "fig3": plot_tongue,
    "freqscan": plot_freqscan,
}

_KIND_TO_WHICH = {
    "prepare_cat_quantum": "fig1c",
    "classical_locking": "fig2",
    "arnold_tongue": "fig3",
    "frequency_scan": "freqscan",
}


def render(bundle: RunBundle, out_dir, which: str = "auto") -> list:
    if which == "auto":
        which = _KIND_TO_WHICH.get(bundle.kind, "")
        if not which:
            raise BundleError(
                f"no renderer for experiment kind {bundle.kind!r}; pass --which"
            )
    if which not in _RENDERERS:
        raise BundleError(f"unknown figure kind {which!r}")
    return _RENDERERS[which](bundle, out_dir)
