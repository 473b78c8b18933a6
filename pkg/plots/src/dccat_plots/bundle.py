"""Typed, read-only access to a dccat run bundle.

A bundle is a directory produced by `dccat run`/`dccat preset`: one
manifest.json plus CSV/JSON artifacts.  Loaders are strict about the files
they need and never write into the bundle.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

SUPPORTED_MANIFEST_SCHEMA = 1
SUPPORTED_GRID_SCHEMA = 1


class BundleError(RuntimeError):
    """Missing or malformed bundle content; the message names the file."""


class RunBundle:
    """One run directory: manifest plus typed artifact loaders."""

    def __init__(self, path):
        self.path = Path(path)
        manifest_path = self.path / "manifest.json"
        if not manifest_path.exists():
            raise BundleError(f"missing manifest: {manifest_path}")
        with open(manifest_path, "r", encoding="utf-8") as fh:
            self.manifest = json.load(fh)
        schema = self.manifest.get("schema_version")
        if schema != SUPPORTED_MANIFEST_SCHEMA:
            raise BundleError(
                f"{manifest_path}: manifest schema {schema!r} unsupported "
                f"(expected {SUPPORTED_MANIFEST_SCHEMA})"
            )

    @property
    def kind(self) -> str:
        return self.manifest.get("kind", "")

    @property
    def name(self) -> str:
        return self.manifest.get("name", self.path.name)

    def config_hash(self) -> str:
        """Stable hash of the resolved config embedded in the manifest."""
        blob = json.dumps(self.manifest.get("config", {}), sort_keys=True)
        return hashlib.md5(blob.encode()).hexdigest()[:12]

    def _require(self, name: str) -> Path:
        f = self.path / name
        if not f.exists():
            raise BundleError(f"missing artifact: {f}")
        return f

    def _csv(self, name: str, columns) -> dict:
        f = self._require(name)
        data = np.genfromtxt(f, delimiter=",", names=True)
        if data.dtype.names is None:
            raise BundleError(f"malformed CSV (no header): {f}")
        missing = [c for c in columns if c not in data.dtype.names]
        if missing:
            raise BundleError(f"{f}: missing columns {', '.join(missing)}")
        data = np.atleast_1d(data)
        return {c: np.asarray(data[c], dtype=float) for c in data.dtype.names}

    # -- typed loaders ------------------------------------------------------

    def trajectory(self, name: str) -> dict:
        return self._csv(
            name,
            ["t", "re_alpha", "im_alpha", "re_beta", "im_beta", "n_R",
             "phi_J_hat", "psi", "theta_a"],
        )

    def trajectories(self) -> dict:
        names = sorted(
            n for n in self.manifest.get("artifacts", []) if n.startswith("traj_")
        )
        if not names:
            raise BundleError(f"no trajectory CSVs listed in {self.path}/manifest.json")
        return {n: self.trajectory(n) for n in names}

    def arrows(self) -> dict:
        names = sorted(
            n for n in self.manifest.get("artifacts", []) if n.startswith("arrows")
        )
        return {n: self._csv(n, ["psi0", "theta0", "psi_f", "theta_f"]) for n in names}

    def fidelity_series(self) -> dict:
        out = {}
        for label, name in (
            ("effective", "fidelity_effective.csv"),
            ("full", "fidelity_full.csv"),
        ):
            if (self.path / name).exists():
                out[label] = self._csv(name, ["t", "fidelity", "parity"])
        if not out:
            raise BundleError(
                f"missing artifact: {self.path}/fidelity_effective.csv (or fidelity_full.csv)"
            )
        return out

    def wigner_map(self):
        data = self._csv("wigner.csv", ["re", "im", "w"])
        re_axis = np.unique(data["re"])
        im_axis = np.unique(data["im"])
        if len(re_axis) * len(im_axis) != len(data["w"]):
            raise BundleError(f"{self.path}/wigner.csv: not a rectangular grid")
        w = data["w"].reshape(len(im_axis), len(re_axis))
        return re_axis, im_axis, w

    def arnold_grid(self) -> dict:
        data = self._csv(
            "grid.csv", ["delta_omega", "eps_L", "psi_dot", "locked", "diverged"]
        )
        meta_path = self._require("grid.json")
        with open(meta_path, "r", encoding="utf-8") as fh:
            meta = json.load(fh)
        if meta.get("schema_version") != SUPPORTED_GRID_SCHEMA:
            raise BundleError(
                f"{meta_path}: grid schema {meta.get('schema_version')!r} unsupported"
            )
        deltas = np.unique(data["delta_omega"])
        eps = np.unique(data["eps_L"])
        if len(deltas) * len(eps) != len(data["psi_dot"]):
            raise BundleError(f"{self.path}/grid.csv: not a full rectangular grid")
        order = np.lexsort((data["delta_omega"], data["eps_L"]))
        shape = (len(eps), len(deltas))
        return {
            "delta_omega": deltas,
            "eps_L": eps,
            "psi_dot": data["psi_dot"][order].reshape(shape),
            "locked": data["locked"][order].reshape(shape).astype(bool),
            "diverged": data["diverged"][order].reshape(shape).astype(bool),
            "meta": meta,
        }

    def freqscan(self) -> dict:
        return self._csv(
            "freqscan.csv", ["omega_a_hz", "mean_abs_alpha", "std_abs_alpha"]
        )

    def checksums(self) -> dict:
        out = {}
        for f in sorted(self.path.iterdir()):
            if f.is_file():
                out[f.name] = hashlib.md5(f.read_bytes()).hexdigest()
        return out
