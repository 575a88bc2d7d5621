"""Fixed-step classical Runge-Kutta integration with down-sampled storage.

The scheme is deliberately fixed-step RK4 with no adaptivity: identical
inputs must reproduce identical trajectories bit for bit, across runs and
across worker processes, because the experiment sweeps are specified as pure
functions of their configuration.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .dynamics import PhaseField

__all__ = ["IntegratorConfig", "Trajectory", "DivergenceError", "integrate"]

# Phases are real lifts of bounded-velocity dynamics; reaching this magnitude
# means the right-hand side blew up.
_DIVERGENCE_LIMIT = 1e9


class DivergenceError(RuntimeError):
    """Raised when a state stops being finite (or explodes) during integration."""

    def __init__(self, step: int, time: float):
        super().__init__(f"state diverged at step {step} (t = {time:g})")
        self.step = step
        self.time = time


@dataclass(frozen=True)
class IntegratorConfig:
    """Step size, horizon, and storage stride for a fixed-step RK4 run.

    The horizon must be an integer number of steps (within 1e-9 relative
    slack).  Every `store_stride`-th state is kept, plus the final one.
    """

    step: float
    horizon: float
    store_stride: int = 1

    def __post_init__(self):
        if not (self.step > 0.0 and self.horizon > 0.0 and self.step <= self.horizon):
            raise ValueError(
                f"need 0 < step <= horizon, got step={self.step} horizon={self.horizon}"
            )
        ratio = self.horizon / self.step
        if abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio):
            raise ValueError(
                f"horizon/step = {ratio!r} does not round to an integer step count"
            )
        if int(self.store_stride) != self.store_stride or self.store_stride < 1:
            raise ValueError(f"store_stride must be a positive integer, got {self.store_stride}")

    @property
    def n_steps(self) -> int:
        return round(self.horizon / self.step)


@dataclass(frozen=True)
class Trajectory:
    """Stored states of one integration plus the RHS at the final state."""

    times: np.ndarray
    states: np.ndarray  # (len(times), mesh)
    final_rhs: np.ndarray

    def __post_init__(self):
        for name in ("times", "states", "final_rhs"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.times.ndim != 1 or self.states.shape[0] != self.times.size:
            raise ValueError("times and states are inconsistent")
        if np.any(np.diff(self.times) <= 0.0):
            raise ValueError("times must be strictly increasing")

    def __len__(self) -> int:
        return self.times.size

    def field(self, index: int) -> PhaseField:
        return PhaseField(self.states[index])

    @property
    def final_state(self) -> PhaseField:
        return PhaseField(self.states[-1])


def integrate(
    rhs: Callable[[np.ndarray, float], np.ndarray],
    initial: PhaseField | np.ndarray,
    cfg: IntegratorConfig,
) -> Trajectory:
    """Integrate dy/dt = rhs(y, t) from t=0 to the horizon with classical RK4.

    `rhs` operates on raw arrays; wrap a field-level right-hand side as
    ``lambda v, t: sds_rhs(PhaseField(v), net, coupling, t).values`` if
    needed.  Raises DivergenceError when the state stops being finite.
    """
    y = np.array(getattr(initial, "values", initial), dtype=float)
    h = cfg.step
    steps = cfg.n_steps
    stride = cfg.store_stride

    stored_times = [0.0]
    stored_states = [y.copy()]
    for k in range(steps):
        t = k * h
        k1 = rhs(y, t)
        k2 = rhs(y + (0.5 * h) * k1, t + 0.5 * h)
        k3 = rhs(y + (0.5 * h) * k2, t + 0.5 * h)
        k4 = rhs(y + h * k3, t + h)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        peak = np.max(np.abs(y))
        if not peak <= _DIVERGENCE_LIMIT:  # catches NaN as well
            raise DivergenceError(step=k + 1, time=(k + 1) * h)
        if (k + 1) % stride == 0 or k + 1 == steps:
            stored_times.append((k + 1) * h)
            stored_states.append(y.copy())
    stored_times[-1] = cfg.horizon  # pin the endpoint against step roundoff
    final_rhs = np.asarray(rhs(y, cfg.horizon), dtype=float)
    return Trajectory(
        times=np.array(stored_times),
        states=np.array(stored_states),
        final_rhs=final_rhs,
    )
