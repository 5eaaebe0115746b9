"""Lipschitz constants, concentration tail bounds, fluctuation statistics.

The tail bound is reported raw (it may exceed 1 at desk scale — that the
bound is often vacuous there is worth seeing); callers clamp when they
want a probability.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def lipschitz_bound(protocol: str, model: str, t: int, delta: float, sites: int = 1) -> float:
    """Upper bound on the QFI's Lipschitz constant over the unitary ensemble.

    Control: 4t²(t+1)Δ; state-prep: 8tΔ; the circuit model multiplies the
    matching global-model value by the site count (Δ then means the local
    spectral width).
    """
    if t < 1 or delta < 0 or sites < 1:
        raise ValueError("need t >= 1, delta >= 0, sites >= 1")
    if protocol == "control":
        base = 4.0 * t * t * (t + 1) * delta
    elif protocol == "state-prep":
        base = 8.0 * t * delta
    else:
        raise ValueError(f"unknown protocol {protocol!r}")
    if model == "rmm":
        return base
    if model == "rqc":
        return sites * base
    raise ValueError(f"unknown model {model!r}")


def tail_bound(dim_scale: float, delta: float, lip: float) -> float:
    """Concentration tail 2·exp(−dim·δ²/(4𝓛²)), uncapped."""
    if delta < 0:
        raise ValueError("delta must be >= 0")
    if lip == 0.0:
        # deterministic function: zero probability of any deviation
        return 0.0 if delta > 0 else 2.0
    return 2.0 * math.exp(-dim_scale * delta * delta / (4.0 * lip * lip))


def default_delta_grid(mean: float, points: int = 20) -> np.ndarray:
    """Log-spaced deviations covering [0.01·mean, 2·mean]."""
    scale = abs(mean) if mean != 0 else 1.0
    return np.geomspace(0.01 * scale, 2.0 * scale, points)


@dataclass(frozen=True)
class FluctuationStats:
    values: np.ndarray
    mean: float
    std: float
    stderr: float
    deltas: np.ndarray
    tail_fractions: np.ndarray

    @property
    def relative_std(self) -> float:
        return self.std / abs(self.mean) if self.mean != 0 else math.inf


def fluctuation_stats(values, deltas=None) -> FluctuationStats:
    """Empirical mean/std and tail fractions #{|v − mean| ≥ δ}/n on a δ-grid."""
    v = np.asarray(values, dtype=float)
    if v.size < 2:
        raise ValueError("need at least 2 values")
    mean = float(v.mean())
    std = float(v.std(ddof=1))
    if deltas is None:
        deltas = default_delta_grid(mean)
    deltas = np.asarray(deltas, dtype=float)
    dev = np.abs(v - mean)
    tails = np.array([float(np.mean(dev >= d)) for d in deltas])
    return FluctuationStats(
        values=v,
        mean=mean,
        std=std,
        stderr=std / math.sqrt(v.size),
        deltas=deltas,
        tail_fractions=tails,
    )
