import math

import numpy as np
import pytest

from qfilab.concentration import (
    default_delta_grid,
    fluctuation_stats,
    lipschitz_bound,
    tail_bound,
)
from qfilab.haar import SeedPath, sample_cue
from qfilab.metrology import SensingSpec, qfi_operator


def test_lipschitz_control_rmm():
    assert lipschitz_bound("control", "rmm", 1, 2.0) == 16.0


def test_lipschitz_sp_rmm():
    assert lipschitz_bound("state-prep", "rmm", 2, 2.0) == 32.0


def test_lipschitz_rqc_is_sites_times_rmm():
    for protocol in ("control", "state-prep"):
        for t, delta, sites in ((1, 0.5, 3), (4, 2.0, 7)):
            assert lipschitz_bound(protocol, "rqc", t, delta, sites) == \
                sites * lipschitz_bound(protocol, "rmm", t, delta)


def test_tail_bound_vacuous_at_zero():
    assert tail_bound(100, 0.0, 5.0) == 2.0


def test_tail_bound_monotone():
    lip = 3.0
    deltas = np.linspace(0.1, 5, 20)
    vals = [tail_bound(100, d, lip) for d in deltas]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert tail_bound(400, 1.0, lip) < tail_bound(100, 1.0, lip)


def test_tail_bound_deterministic_function():
    assert tail_bound(100, 0.5, 0.0) == 0.0
    assert tail_bound(100, 0.0, 0.0) == 2.0


def test_fluctuation_stats_constant_input():
    stats = fluctuation_stats(np.full(10, 3.0), deltas=[0.1, 1.0])
    assert stats.std == 0.0
    assert np.all(stats.tail_fractions == 0.0)


def test_fluctuation_stats_two_values():
    stats = fluctuation_stats([0.0, 2.0], deltas=[0.5])
    assert stats.mean == 1.0
    assert stats.tail_fractions[0] == 1.0


def test_fluctuation_stats_needs_two():
    with pytest.raises(ValueError):
        fluctuation_stats([1.0])


def test_tail_fractions_bounded_and_non_increasing():
    rng = np.random.default_rng(1)
    stats = fluctuation_stats(rng.normal(size=500))
    tf = stats.tail_fractions
    assert np.all((tf >= 0) & (tf <= 1))
    assert np.all(np.diff(tf) <= 1e-12)


def test_default_grid_shape():
    grid = default_delta_grid(10.0)
    assert grid.size == 20
    assert abs(grid[0] - 0.1) <= 1e-12 and abs(grid[-1] - 20.0) <= 1e-9


def test_empirical_tails_within_bound_monte_carlo():
    n, t, count = 64, 2, 500
    spec = SensingSpec.two_block(n)
    psi = np.zeros(n, dtype=complex)
    psi[0] = 1.0
    vals = np.array([
        qfi_operator("control", sample_cue(n, SeedPath(700).child(k)), spec, t, psi)
        for k in range(count)
    ])
    stats = fluctuation_stats(vals)
    lip = lipschitz_bound("control", "rmm", t, spec.delta)
    for d, emp in zip(stats.deltas, stats.tail_fractions):
        assert emp <= min(1.0, tail_bound(n, d, lip)) + 1e-12
