import math

import numpy as np
import pytest

from qfilab.errors import NumericsError
from qfilab.haar import SeedPath, sample_cue
from qfilab.metrology import (
    Protocol,
    SensingSpec,
    control_variance_chain,
    metrological_generator,
    qfi_operator,
    qfi_recursion_curve,
    qfi_state_recursion,
    qfi_upper_bound,
    two_block_diag,
)


def random_state(n, seed):
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=n) + 1j * rng.normal(size=n)
    return psi / np.linalg.norm(psi)


def control_unitary(u, spec, t):
    m = spec.phases()[:, None] * u
    return np.linalg.matrix_power(m, t)


def sp_unitary(u, spec, t):
    return np.diag(spec.phases() ** t) @ np.linalg.matrix_power(u, t)


# ---------------------------------------------------------------------------
# sensing spec

def test_two_block_even():
    h = two_block_diag(6)
    assert np.array_equal(h, [1, 1, 1, -1, -1, -1])


def test_two_block_odd_traceless():
    h = two_block_diag(5)
    assert abs(h.sum()) <= 1e-12
    assert h[0] == h[1] == h[2] and h[3] == h[4]


def test_spec_derived_quantities():
    spec = SensingSpec(np.array([2.0, -1.0, 0.5]), 0.3)
    assert spec.tr_h == 1.5
    assert spec.tr_h2 == 5.25
    assert spec.delta == 3.0


# ---------------------------------------------------------------------------
# generator

def test_generator_t0_is_zero():
    spec = SensingSpec.two_block(4)
    u = sample_cue(4, 1)
    assert np.allclose(metrological_generator(Protocol.CONTROL, u, spec, 0), 0)


def test_generator_identity_u_control():
    spec = SensingSpec.two_block(6, 0.8)
    g = metrological_generator("control", np.eye(6, dtype=complex), spec, 5)
    assert np.max(np.abs(g - 5 * np.diag(spec.h_diag))) <= 1e-12


def test_generator_finite_difference_oracle():
    n, t = 8, 3
    spec = SensingSpec.two_block(n, 0.7)
    u = sample_cue(n, 5)
    for protocol, unitary in (("control", control_unitary), ("state-prep", sp_unitary)):
        g = metrological_generator(protocol, u, spec, t)
        d = 1e-6
        ut = unitary(u, spec, t)
        utd = unitary(u, SensingSpec(spec.h_diag, spec.theta + d), t)
        fd = 1j * ut.conj().T @ (utd - ut) / d
        assert np.max(np.abs(fd - g)) <= 1e-4


def test_generator_dimension_mismatch():
    with pytest.raises(ValueError):
        metrological_generator("control", np.eye(3, dtype=complex),
                               SensingSpec.two_block(4), 1)


# ---------------------------------------------------------------------------
# qfi paths

def test_qfi_t0_is_zero():
    spec = SensingSpec.two_block(4)
    u = sample_cue(4, 2)
    psi = random_state(4, 0)
    assert qfi_operator("control", u, spec, 0, psi) == 0.0
    assert qfi_state_recursion("control", lambda v: u @ v, spec, 0, psi) == 0.0


def test_qfi_zero_for_eigenvector():
    spec = SensingSpec.two_block(4)
    psi = np.zeros(4, dtype=complex)
    psi[0] = 1.0
    assert qfi_operator("control", np.eye(4, dtype=complex), spec, 3, psi) == 0.0


def test_qfi_extremal_superposition_saturates_bound():
    n, t = 6, 4
    spec = SensingSpec.two_block(n)
    psi = np.zeros(n, dtype=complex)
    psi[0] = psi[-1] = 1 / math.sqrt(2)
    f = qfi_operator("control", np.eye(n, dtype=complex), spec, t, psi)
    assert abs(f - qfi_upper_bound(t, spec.delta)) <= 1e-9


def test_recursion_matches_operator():
    n = 16
    spec = SensingSpec.two_block(n, 1.3)
    u = sample_cue(n, 11)
    psi = random_state(n, 3)
    for protocol in ("control", "state-prep"):
        for t in (1, 2, 5):
            a = qfi_operator(protocol, u, spec, t, psi)
            b = qfi_state_recursion(protocol, lambda v: u @ v, spec, t, psi)
            assert abs(a - b) <= 1e-8 * max(abs(a), 1.0)


def test_recursion_matches_fidelity_finite_difference():
    n, t, d = 12, 3, 1e-4
    spec = SensingSpec.two_block(n, 0.9)
    u = sample_cue(n, 13)
    psi = random_state(n, 4)
    for protocol, unitary in (("control", control_unitary), ("state-prep", sp_unitary)):
        f = qfi_state_recursion(protocol, lambda v: u @ v, spec, t, psi)
        pa = unitary(u, spec, t) @ psi
        pb = unitary(u, SensingSpec(spec.h_diag, spec.theta + d), t) @ psi
        fid = 8 * (1 - abs(np.vdot(pa, pb))) / d**2
        assert abs(f - fid) <= 1e-3 * max(abs(f), 1.0)


def test_unnormalized_state_rejected():
    spec = SensingSpec.two_block(4)
    u = sample_cue(4, 21)
    with pytest.raises(ValueError):
        qfi_operator("control", u, spec, 1, np.ones(4, dtype=complex))


def test_curve_is_prefix_consistent():
    n = 8
    spec = SensingSpec.two_block(n)
    u = sample_cue(n, 31)
    psi = random_state(n, 6)
    curve = qfi_recursion_curve("control", lambda v: u @ v, spec, 6, psi)
    for t in (1, 3, 6):
        assert abs(curve[t - 1] -
                   qfi_state_recursion("control", lambda v: u @ v, spec, t, psi)) <= 1e-12


# ---------------------------------------------------------------------------
# invariants

def test_gauge_invariance():
    n, t = 10, 3
    base = two_block_diag(n)
    u = sample_cue(n, 41)
    psi = random_state(n, 8)
    ref = {p: qfi_operator(p, u, SensingSpec(base, 1.0), t, psi)
           for p in ("control", "state-prep")}
    for c in (-1.0, 0.5, 3.0):
        spec = SensingSpec(base + c, 1.0)
        for p in ("control", "state-prep"):
            assert abs(qfi_operator(p, u, spec, t, psi) - ref[p]) <= 1e-9


def test_protocols_agree_at_t1():
    n = 12
    spec = SensingSpec.two_block(n, 0.6)
    psi = random_state(n, 9)
    for k in range(5):
        u = sample_cue(n, SeedPath(50).child(k))
        a = qfi_operator("control", u, spec, 1, psi)
        b = qfi_operator("state-prep", u, spec, 1, psi)
        assert abs(a - b) <= 1e-9


def test_ensemble_mean_initial_state_independent():
    n, t, count = 16, 2, 400
    spec = SensingSpec.two_block(n)
    psi_a = np.zeros(n, dtype=complex)
    psi_a[0] = 1.0
    psi_b = np.zeros(n, dtype=complex)
    psi_b[1] = 1.0
    va, vb = [], []
    for k in range(count):
        u = sample_cue(n, SeedPath(60).child(k))
        va.append(qfi_operator("control", u, spec, t, psi_a))
        vb.append(qfi_operator("control", u, spec, t, psi_b))
    va, vb = np.array(va), np.array(vb)
    comb_se = math.hypot(va.std(ddof=1), vb.std(ddof=1)) / math.sqrt(count)
    assert abs(va.mean() - vb.mean()) <= 3 * comb_se


def test_bound_chain_monotone():
    n, t = 10, 5
    spec = SensingSpec.two_block(n, 1.1)
    psi = random_state(n, 10)
    for k in range(5):
        u = sample_cue(n, SeedPath(70).child(k))
        f = qfi_operator("control", u, spec, t, psi)
        c1, c2, c3 = control_variance_chain(u, spec, t, psi)
        assert f <= c1 + 1e-9
        assert c1 <= c2 + 1e-9
        assert c2 <= c3 + 1e-9


def test_upper_bound_values():
    assert qfi_upper_bound(0, 5.0) == 0.0
    assert qfi_upper_bound(3, 2.0) == 36.0


def test_hard_bound_monte_carlo():
    n, count = 32, 120
    spec = SensingSpec.two_block(n)
    psi = random_state(n, 12)
    for t in (1, 4, 8):
        cap = qfi_upper_bound(t, spec.delta)
        for k in range(count // 3):
            u = sample_cue(n, SeedPath(80 + t).child(k))
            assert qfi_operator("control", u, spec, t, psi) <= cap + 1e-9
