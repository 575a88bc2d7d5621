"""Order parameter, interpolant distances, phase diameter, and sync verdicts."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import PhaseField
from .integrator import Trajectory

__all__ = [
    "OrderParameter",
    "SyncVerdict",
    "order_parameter",
    "linf_distance",
    "phase_diameter",
    "sync_verdict",
]

# Below this magnitude the mean phasor direction is numerically meaningless
# and the average phase is reported as undefined (psi = None).
_R_DEFINED = 1e-12

_MAX_REFINEMENT = 1 << 24
_REFINEMENT_CHUNK = 1 << 20


@dataclass(frozen=True)
class OrderParameter:
    """Magnitude r of the mean unit phasor and its angle psi.

    psi lies in (-pi, pi] and is None when r is numerically zero, where the
    angle of the mean phasor carries no information.
    """

    r: float
    psi: float | None


def order_parameter(field: PhaseField) -> OrderParameter:
    """Mean-phasor magnitude and angle: r e^{i psi} = mean_j e^{i theta_j}."""
    c = float(np.mean(np.cos(field.values)))
    s = float(np.mean(np.sin(field.values)))
    r = math.hypot(c, s)
    psi = math.atan2(s, c) if r > _R_DEFINED else None
    return OrderParameter(r=r, psi=psi)


def linf_distance(a: PhaseField, b: PhaseField) -> float:
    """Sup-norm distance between the piecewise-constant interpolants of a and b.

    Computed exactly on the common refinement of the two meshes; the
    refinement size lcm(m_a, m_b) must not exceed 2**24.
    """
    ma, mb = a.mesh, b.mesh
    if ma == mb:
        return float(np.max(np.abs(a.values - b.values)))
    lcm = math.lcm(ma, mb)
    if lcm > _MAX_REFINEMENT:
        raise ValueError(
            f"common refinement of meshes {ma} and {mb} has {lcm} cells "
            f"(limit {_MAX_REFINEMENT})"
        )
    worst = 0.0
    for start in range(0, lcm, _REFINEMENT_CHUNK):
        idx = np.arange(start, min(start + _REFINEMENT_CHUNK, lcm))
        ia = idx * ma // lcm
        ib = idx * mb // lcm
        worst = max(worst, float(np.max(np.abs(a.values[ia] - b.values[ib]))))
    return worst


def phase_diameter(field: PhaseField) -> float:
    """max - min of the lifted phases.  Lifts are not wrapped: (0, 2*pi) has diameter 2*pi."""
    return float(np.ptp(field.values))


@dataclass(frozen=True)
class SyncVerdict:
    """Outcome of the synchronization detectors on a finished trajectory."""

    phase_sync: bool
    freq_sync: bool
    final_r: float
    final_diameter: float
    final_freq_spread: float


def sync_verdict(
    traj: Trajectory, phase_tol: float = 1e-2, freq_tol: float = 1e-3
) -> SyncVerdict:
    """Classify the end state of a trajectory.

    Frequency synchronization: the spread (max - min) of the final-time RHS
    is below freq_tol.  Phase synchronization: after moving every phase to a
    common lift (subtracting the nearest multiple of 2*pi relative to the
    first oscillator), the diameter is below phase_tol.  The recorded
    final_diameter is that common-lift diameter.
    """
    final = traj.states[-1]
    wrapped = final - 2.0 * np.pi * np.round((final - final[0]) / (2.0 * np.pi))
    diameter = float(np.ptp(wrapped))
    freq_spread = float(np.ptp(traj.final_rhs))
    return SyncVerdict(
        phase_sync=diameter < phase_tol,
        freq_sync=freq_spread < freq_tol,
        final_r=order_parameter(PhaseField(wrapped)).r,
        final_diameter=diameter,
        final_freq_spread=freq_spread,
    )
