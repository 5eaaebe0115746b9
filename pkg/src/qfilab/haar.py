"""Reproducible sampling of Haar-distributed (CUE) unitaries.

Seeds form a tree: a 64-bit master seed plus a tuple of child indices.
A sample's matrix is a pure function of its seed path, so ensembles are
bit-reproducible no matter how the samples are scheduled across workers.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import assert_unitary


@dataclass(frozen=True)
class SeedPath:
    """Hierarchical RNG seed: master seed plus (experiment, sample, gate, ...) counters."""

    master_seed: int
    indices: tuple[int, ...] = field(default_factory=tuple)

    def child(self, index: int) -> "SeedPath":
        return SeedPath(self.master_seed, self.indices + (int(index),))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.master_seed, spawn_key=self.indices)
        return np.random.default_rng(ss)

    def __str__(self) -> str:
        return "/".join(str(i) for i in (self.master_seed,) + self.indices)


def as_seed_path(seed) -> SeedPath:
    if isinstance(seed, SeedPath):
        return seed
    return SeedPath(int(seed))


def derive_subseed(path: SeedPath, index: int) -> SeedPath:
    """Deterministic, injective child stream of `path`."""
    return as_seed_path(path).child(index)


def _ginibre(rng: np.random.Generator, n: int, count: int | None = None) -> np.ndarray:
    shape = (n, n) if count is None else (count, n, n)
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def _phase_corrected_q(z: np.ndarray) -> np.ndarray:
    # Plain QR is biased on the unitary group; multiplying Q by the phases of
    # diag(R) restores Haar measure (Mezzadri's recipe).
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (d / np.abs(d))[..., None, :]


def sample_cue(n: int, seed) -> np.ndarray:
    """One Haar-random n×n unitary, a pure function of the seed path."""
    if n < 1:
        raise ValueError("dimension must be >= 1")
    rng = as_seed_path(seed).generator()
    u = _phase_corrected_q(_ginibre(rng, n))
    return assert_unitary(u)


def sample_cue_batch(n: int, count: int, seed) -> np.ndarray:
    """Stack of `count` CUE matrices drawn from a single stream.

    Vectorized path for Monte Carlo oracles; per-sample reproducibility
    across schedules is sample_cue's job, not this one's.
    """
    if n < 1:
        raise ValueError("dimension must be >= 1")
    rng = as_seed_path(seed).generator()
    u = _phase_corrected_q(_ginibre(rng, n, count))
    return assert_unitary(u)
