"""Closed-form bounds and thresholds, plus their empirical counterparts.

All logarithms are natural.  The beta/p threshold comes from the inequality

    cos(beta)^2 / sin(beta) > (2/p) * (1 + n^{-1/3}) / (1 - n^{-1/3})

whose equality form is solved both ways: for the smallest edge probability
at fixed beta, and for the largest phase shift at fixed p (a quadratic in
sin(beta)).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .graphon import DiscretizedGraphon, SampledNetwork

__all__ = [
    "BoundParams",
    "g_bar",
    "positive_system_bound",
    "beta_threshold_p",
    "max_beta_for",
    "connectivity_threshold",
    "empirical_g",
    "bound_curve_rows",
    "write_bound_curve",
]


@dataclass(frozen=True)
class BoundParams:
    """Rates of the scalar comparison system u' <= c u + d mean(u) + g on [0, T]."""

    c: float
    d: float
    g: float
    horizon: float

    def __post_init__(self):
        if not (self.c > 0 and self.d > 0 and self.g >= 0 and self.horizon > 0):
            raise ValueError("need c > 0, d > 0, g >= 0, horizon > 0")


def g_bar(n: int, delta: float, alpha: float) -> float:
    """Concentration level 2 ln(2n / delta) / (n alpha) for the row deviations."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0,1), got {delta}")
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0,1], got {alpha}")
    return 2.0 * math.log(2.0 * n / delta) / (n * alpha)


def positive_system_bound(p: BoundParams) -> float:
    """Growth bound g/(c+d) * (e^{(c+d)T} - 1) for the comparison system from 0."""
    rate = p.c + p.d
    return p.g / rate * math.expm1(rate * p.horizon)


def _size_factor(n: int | None) -> float:
    """Finite-size factor (1 + n^{-1/3}) / (1 - n^{-1/3}); 1 in the n -> inf limit."""
    if n is None:
        return 1.0
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    x = n ** (-1.0 / 3.0)
    return (1.0 + x) / (1.0 - x)


def beta_threshold_p(beta: float, n: int | None) -> float:
    """Smallest edge probability admitting the phase shift beta, at equality.

    Returns (2 sin(beta) / cos(beta)^2) * (1 + n^{-1/3}) / (1 - n^{-1/3});
    pass n=None for the asymptotic factor 1.  The inequality the threshold
    comes from is strict, so the returned value is an open lower bound.
    Values above 1 mean no feasible edge probability at this n.
    """
    if not 0.0 < beta < math.pi / 2:
        raise ValueError(f"beta must lie in (0, pi/2), got {beta}")
    return 2.0 * math.sin(beta) / math.cos(beta) ** 2 * _size_factor(n)


def max_beta_for(p: float, n: int | None) -> float:
    """Unique beta in (0, pi/2) solving the threshold at equality for given p.

    With R = (2/p) * (1 + n^{-1/3}) / (1 - n^{-1/3}) the equality
    cos(beta)^2 / sin(beta) = R becomes s^2 + R s - 1 = 0 in s = sin(beta),
    whose positive root s = (-R + sqrt(R^2 + 4)) / 2 always lies in (0, 1).
    """
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must lie in (0,1], got {p}")
    r = 2.0 / p * _size_factor(n)
    s = (-r + math.sqrt(r * r + 4.0)) / 2.0
    return math.asin(s)


def connectivity_threshold(n: int) -> float:
    """Erdos-Renyi connectivity threshold ln(n)/n."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    return math.log(n) / n


def empirical_g(net: SampledNetwork, d: DiscretizedGraphon) -> np.ndarray:
    """Per-row squared deviations (1/2) * (mean_j (A_ij / alpha - W_ij))^2.

    The mean runs over all j, with the stored zero diagonal of A; the forced
    j = i term contributes an O(1/n) bias to the row mean (self-loops are
    excluded by construction).
    """
    if net.n != d.n:
        raise ValueError(f"network size {net.n} != cell count {d.n}")
    dev = (net.adjacency / net.alpha - d.cells).mean(axis=1)
    return 0.5 * dev**2


def bound_curve_rows(
    n_values: Iterable[int], betas: Sequence[float]
) -> list[tuple[int, float, float]]:
    """(n, beta, p_min) rows for the synchronization bound curves.

    For beta = 0 the bound is the connectivity threshold ln(n)/n (phase
    synchronization); for beta > 0 it is the equality point of the
    beta/p threshold (frequency synchronization).
    """
    rows = []
    for n in n_values:
        for beta in betas:
            p_min = connectivity_threshold(n) if beta == 0.0 else beta_threshold_p(beta, n)
            rows.append((int(n), float(beta), float(p_min)))
    return rows


def write_bound_curve(path, n_values: Iterable[int], betas: Sequence[float]) -> None:
    """Write the bound curves as CSV with header n,beta,p_min."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "beta", "p_min"])
        for n, beta, p_min in bound_curve_rows(n_values, betas):
            writer.writerow([n, f"{beta:.9g}", f"{p_min:.9g}"])
