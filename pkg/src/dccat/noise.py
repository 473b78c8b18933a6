"""Piecewise-constant Gaussian voltage-noise process.

The DC-source frequency noise delta_omega_N(t) is held constant on intervals
of length hold_dt and redrawn independently from N(0, sigma^2) at every
boundary.  Draws are generated counter-based (Philox keyed by the seed,
positioned at the interval index) and mapped through the inverse normal CDF,
so a path can be evaluated out of order, in chunks, or in parallel and is
bit-identical for a fixed seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

KIND_NONE = "none"
KIND_WHITE_HOLD = "white_hold"
KIND_CONSTANT = "constant_offset"

_KINDS = (KIND_NONE, KIND_WHITE_HOLD, KIND_CONSTANT)

#: Independent-sample interval used in the reference simulations (0.01 ns).
DEFAULT_HOLD_DT = 1e-11


@dataclass(frozen=True)
class NoiseModel:
    """Statistical description of the frequency noise delta_omega_N(t).

    sigma (rad/s) is the standard deviation of each held sample, hold_dt (s)
    the redraw interval, offset (rad/s) the value taken by the
    constant_offset kind.
    """

    kind: str = KIND_NONE
    sigma: float = 0.0
    hold_dt: float = DEFAULT_HOLD_DT
    seed: int = 0
    offset: float = 0.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.sigma < 0.0:
            raise ValueError("sigma must be >= 0")
        if self.hold_dt <= 0.0:
            raise ValueError("hold_dt must be > 0")

    @property
    def is_stochastic(self) -> bool:
        return self.kind == KIND_WHITE_HOLD and self.sigma > 0.0

    def draws(self, start: int, count: int) -> np.ndarray:
        """Gaussian samples for hold intervals [start, start+count).

        Each interval index consumes exactly one 64-bit Philox word, so the
        result does not depend on chunking.
        """
        if count <= 0:
            return np.zeros(0)
        if not self.is_stochastic:
            return np.zeros(count)
        bg = np.random.Philox(key=self.seed)
        # advance() moves the 4-word counter block; position to the exact draw
        blocks, within = divmod(start, 4)
        if blocks:
            bg.advance(blocks)
        if within:
            bg.random_raw(within)
        raw = bg.random_raw(count)
        # uniforms in (0, 1): 53-bit mantissa plus a half-ulp offset
        u = (raw >> np.uint64(11)) * 2.0**-53 + 2.0**-54
        return self.sigma * ndtri(u)

    def sample_values(self, t_final: float) -> np.ndarray:
        """Held values covering [0, t_final] (one trailing extra interval)."""
        if t_final <= 0.0:
            raise ValueError("t_final must be > 0")
        n = int(math.ceil(t_final / self.hold_dt)) + 1
        if self.kind == KIND_CONSTANT:
            return np.full(n, self.offset)
        return self.draws(0, n)


class NoisePath:
    """A realized zero-order-hold path with its exact running integral.

    Immutable after construction; phi(t) = int_0^t delta_omega_N is evaluated
    by summing whole held intervals plus the linear remainder.
    """

    def __init__(self, model: NoiseModel, t_final: float):
        self.model = model
        self.t_final = float(t_final)
        self.values = model.sample_values(t_final)
        self.values.setflags(write=False)
        self._cum = np.concatenate(([0.0], np.cumsum(self.values) * model.hold_dt))

    def delta_omega(self, t):
        """Held noise value(s) at time t (zero-order hold)."""
        t = np.asarray(t, dtype=float)
        k = np.clip((t / self.model.hold_dt).astype(int), 0, len(self.values) - 1)
        return self.values[k]

    def phi(self, t):
        """Integrated phase phi_N(t) = int_0^t delta_omega_N(s) ds."""
        t = np.asarray(t, dtype=float)
        if self.model.kind == KIND_CONSTANT:
            return self.model.offset * t
        k = np.clip((t / self.model.hold_dt).astype(int), 0, len(self.values) - 1)
        return self._cum[k] + self.values[k] * (t - k * self.model.hold_dt)


def sample_path(model: NoiseModel, t_final: float) -> NoisePath:
    """Realize the noise process on [0, t_final]; deterministic per seed."""
    return NoisePath(model, t_final)


def predicted_locked_std(model: NoiseModel, eps_L: float, nu_0: float) -> float:
    """Steady-state standard deviation of the locked junction phase.

    The linearized locked dynamics is an Ornstein-Uhlenbeck process whose
    stationary spread is sqrt(sigma^2 hold_dt / (eps_L nu_0)).
    """
    if eps_L * nu_0 <= 0.0:
        raise ValueError("locking strength eps_L * nu_0 must be > 0")
    return math.sqrt(model.sigma**2 * model.hold_dt / (eps_L * nu_0))
