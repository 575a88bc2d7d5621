"""Right-hand sides of the sampled, averaged, and continuum oscillator systems.

All three systems share the shape

    dtheta_i/dt = f(theta_i, t) + scale * sum_j w_ij D(theta_j - theta_i)

with weights w and scale depending on the system:

    sampled   (SDS): w = adjacency,        scale = 1/(n * alpha)
    averaged  (ADS): w = graphon cells,    scale = 1/n    (j = i included)
    continuum (CDS): w = W(x_i, x_j),      scale = 1/m    (left-endpoint
                     Riemann sum on the solver mesh x_i = i/m)

Phases are kept as real lifts and never wrapped; anything that needs a
circular quantity wraps explicitly.  For the sinusoidal kernel family
D(u) = sin(u + beta) the coupling sum is evaluated through the identity

    sum_j w_ij sin(theta_j - theta_i + beta)
        = cos(beta) [cos(theta_i) (w s)_i - sin(theta_i) (w c)_i]
        + sin(beta) [cos(theta_i) (w c)_i + sin(theta_i) (w s)_i]

with s = sin(theta), c = cos(theta), reducing each evaluation to two
matrix-vector products.  Custom kernels fall back to the pairwise sum.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .graphon import DiscretizedGraphon, Graphon, SampledNetwork

__all__ = [
    "CouplingSpec",
    "PhaseField",
    "kuramoto",
    "sakaguchi",
    "custom_coupling",
    "discretize_initial",
    "interpolate",
    "sds_rhs",
    "ads_rhs",
    "cds_rhs",
    "prepare_sds_rhs",
    "prepare_ads_rhs",
    "prepare_cds_rhs",
]

KURAMOTO = "kuramoto"
SAKAGUCHI = "sakaguchi"
CUSTOM = "custom"

# Row-block size for the pairwise fallback path; bounds transient memory at
# block * mesh floats.
_PAIRWISE_BLOCK = 256


@dataclass(frozen=True)
class CouplingSpec:
    """Coupling kernel D plus optional intrinsic drift and Lipschitz data.

    D must be 2*pi-periodic with max |D| = 1 (the normalization every bound
    in this package assumes).  `intrinsic` maps (theta array, t) to a drift
    array; None means zero.  Lipschitz constants of custom kernels are
    declared by the caller and trusted, not estimated.
    """

    kind: str
    beta: float = 0.0
    func: Callable[[np.ndarray], np.ndarray] | None = field(default=None, repr=False)
    intrinsic: Callable[[np.ndarray, float], np.ndarray] | None = field(
        default=None, repr=False
    )
    lipschitz_d: float = 1.0
    lipschitz_f: float = 0.0

    @property
    def is_sinusoidal(self) -> bool:
        return self.kind in (KURAMOTO, SAKAGUCHI)

    def d(self, u) -> np.ndarray:
        """Evaluate the coupling kernel at phase differences u."""
        if self.is_sinusoidal:
            return np.sin(np.asarray(u, dtype=float) + self.beta)
        return np.asarray(self.func(u), dtype=float)


def kuramoto(intrinsic=None) -> CouplingSpec:
    """Kuramoto coupling D(u) = sin(u)."""
    return CouplingSpec(kind=KURAMOTO, beta=0.0, intrinsic=intrinsic)


def sakaguchi(beta: float, intrinsic=None) -> CouplingSpec:
    """Sakaguchi coupling D(u) = sin(u + beta) with phase shift |beta| < pi/2."""
    if not -np.pi / 2 < beta < np.pi / 2:
        raise ValueError(f"beta must lie in (-pi/2, pi/2), got {beta}")
    return CouplingSpec(kind=SAKAGUCHI, beta=float(beta), intrinsic=intrinsic)


def custom_coupling(
    func: Callable[[np.ndarray], np.ndarray],
    lipschitz_d: float,
    intrinsic=None,
    lipschitz_f: float = 0.0,
    check_points: int = 4096,
) -> CouplingSpec:
    """Coupling with a user kernel; validates periodicity and normalization.

    The kernel is checked on a dense grid of one period: |D| <= 1 and
    |D(u) - D(u + 2*pi)| <= 1e-12.
    """
    u = np.linspace(-np.pi, np.pi, check_points, endpoint=False)
    vals = np.asarray(func(u), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise ValueError("custom coupling kernel is non-finite on the test grid")
    if np.max(np.abs(vals)) > 1.0 + 1e-12:
        raise ValueError("custom coupling kernel must satisfy max |D| <= 1")
    if np.max(np.abs(vals - np.asarray(func(u + 2 * np.pi), dtype=float))) > 1e-12:
        raise ValueError("custom coupling kernel must be 2*pi-periodic")
    return CouplingSpec(
        kind=CUSTOM,
        func=func,
        intrinsic=intrinsic,
        lipschitz_d=float(lipschitz_d),
        lipschitz_f=float(lipschitz_f),
    )


@dataclass(frozen=True)
class PhaseField:
    """Vector of lifted oscillator phases; node i owns the cell [i/m, (i+1)/m)."""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size < 1:
            raise ValueError("phase field must be a nonempty 1-D vector")
        if not np.all(np.isfinite(values)):
            raise ValueError("phase field contains non-finite entries")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def mesh(self) -> int:
        return self.values.size


def discretize_initial(eta: Callable[[np.ndarray], np.ndarray], n: int) -> PhaseField:
    """Sample an initial profile at the mesh nodes: values[i] = eta(i/n)."""
    if n < 1:
        raise ValueError(f"mesh size must be >= 1, got {n}")
    nodes = np.arange(n, dtype=float) / n
    try:
        values = np.asarray(eta(nodes), dtype=float)
        if values.shape != nodes.shape:
            raise TypeError
    except (TypeError, ValueError):
        values = np.array([float(eta(x)) for x in nodes])
    if not np.all(np.isfinite(values)):
        raise ValueError("initial profile evaluated non-finite at a mesh node")
    return PhaseField(values)


def interpolate(field: PhaseField, x) -> float | np.ndarray:
    """Piecewise-constant interpolant of the field at x in [0, 1].

    Cell boundaries belong to the right cell; x = 1 maps to the last cell.
    """
    xs = np.asarray(x, dtype=float)
    if np.any(xs < 0.0) or np.any(xs > 1.0):
        raise ValueError("interpolation point outside [0, 1]")
    m = field.mesh
    idx = np.minimum((xs * m).astype(int), m - 1)
    out = field.values[idx]
    return float(out) if np.isscalar(x) or xs.ndim == 0 else out


def _coupling_term(
    coupling: CouplingSpec,
    scale: float,
    weights: np.ndarray | None = None,
    constant: float | None = None,
    mesh: int | None = None,
) -> Callable[[np.ndarray], np.ndarray]:
    """Build the vectorised coupling-sum evaluator for fixed weights."""
    if coupling.is_sinusoidal:
        cb = float(np.cos(coupling.beta))
        sb = float(np.sin(coupling.beta))
        if constant is not None:
            const = float(constant)

            def term(values: np.ndarray) -> np.ndarray:
                s = np.sin(values)
                c = np.cos(values)
                ws = const * s.sum()
                wc = const * c.sum()
                return scale * (cb * (c * ws - s * wc) + sb * (c * wc + s * ws))

        else:

            def term(values: np.ndarray) -> np.ndarray:
                s = np.sin(values)
                c = np.cos(values)
                ws = weights @ s
                wc = weights @ c
                return scale * (cb * (c * ws - s * wc) + sb * (c * wc + s * ws))

        return term

    kernel = coupling.func

    def term(values: np.ndarray) -> np.ndarray:
        m = values.size
        out = np.empty(m)
        for start in range(0, m, _PAIRWISE_BLOCK):
            stop = min(start + _PAIRWISE_BLOCK, m)
            diff = values[None, :] - values[start:stop, None]
            dvals = np.asarray(kernel(diff), dtype=float)
            if constant is not None:
                out[start:stop] = constant * dvals.sum(axis=1)
            else:
                out[start:stop] = (weights[start:stop] * dvals).sum(axis=1)
        return scale * out

    return term


def _with_intrinsic(term, coupling: CouplingSpec):
    if coupling.intrinsic is None:
        return lambda values, t: term(values)
    intrinsic = coupling.intrinsic
    return lambda values, t: term(values) + np.asarray(intrinsic(values, t), dtype=float)


def prepare_sds_rhs(
    net: SampledNetwork, coupling: CouplingSpec
) -> Callable[[np.ndarray, float], np.ndarray]:
    """Array-level RHS of the sampled system for a fixed network."""
    scale = 1.0 / (net.n * net.alpha)
    return _with_intrinsic(
        _coupling_term(coupling, scale, weights=net.adjacency), coupling
    )


def prepare_ads_rhs(
    d: DiscretizedGraphon, coupling: CouplingSpec
) -> Callable[[np.ndarray, float], np.ndarray]:
    """Array-level RHS of the averaged system; the j = i cell is included."""
    cells = d.cells
    scale = 1.0 / d.n
    if np.ptp(cells) == 0.0:
        return _with_intrinsic(
            _coupling_term(coupling, scale, constant=float(cells.flat[0])), coupling
        )
    return _with_intrinsic(_coupling_term(coupling, scale, weights=cells), coupling)


def prepare_cds_rhs(
    g: Graphon, coupling: CouplingSpec, mesh: int
) -> Callable[[np.ndarray, float], np.ndarray]:
    """Array-level RHS of the discretized continuum system on an m-mesh.

    The integral over y is the left-endpoint Riemann sum at the mesh nodes,
    consistent with the piecewise-constant interpolant convention.
    """
    if mesh < 1:
        raise ValueError(f"mesh size must be >= 1, got {mesh}")
    scale = 1.0 / mesh
    if g.constant_value is not None:
        return _with_intrinsic(
            _coupling_term(coupling, scale, constant=g.constant_value), coupling
        )
    x = np.arange(mesh, dtype=float) / mesh
    weights = np.asarray(g.evaluator(x[:, None], x[None, :]), dtype=float)
    if not np.all(np.isfinite(weights)):
        raise ValueError(f"graphon '{g.label}' evaluated non-finite on the mesh")
    return _with_intrinsic(_coupling_term(coupling, scale, weights=weights), coupling)


def sds_rhs(
    state: PhaseField, net: SampledNetwork, coupling: CouplingSpec, t: float = 0.0
) -> PhaseField:
    """Sampled-system RHS: f(theta_i, t) + (n a)^-1 sum_j A_ij D(theta_j - theta_i)."""
    if state.mesh != net.n:
        raise ValueError(f"state mesh {state.mesh} != network size {net.n}")
    return PhaseField(prepare_sds_rhs(net, coupling)(state.values, t))


def ads_rhs(
    state: PhaseField,
    d: DiscretizedGraphon,
    coupling: CouplingSpec,
    t: float = 0.0,
) -> PhaseField:
    """Averaged-system RHS: f(theta_i, t) + n^-1 sum_j W_ij D(theta_j - theta_i)."""
    if state.mesh != d.n:
        raise ValueError(f"state mesh {state.mesh} != cell count {d.n}")
    return PhaseField(prepare_ads_rhs(d, coupling)(state.values, t))


def cds_rhs(
    state: PhaseField, g: Graphon, coupling: CouplingSpec, t: float = 0.0
) -> PhaseField:
    """Continuum RHS at the mesh nodes x_i = i/m via the Riemann-sum coupling."""
    return PhaseField(prepare_cds_rhs(g, coupling, state.mesh)(state.values, t))
