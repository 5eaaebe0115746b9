import math

import numpy as np
import pytest

from qfilab.errors import CapabilityError, ConfigError
from qfilab.circuits import (
    Brickwork,
    ChainGeometry,
    LocalSensingSpec,
    MomentComparison,
    SigmaConfig,
    build_floquet,
    cue_equivalence_moment,
    global_sensing_hamiltonian,
    global_sensing_spec,
    make_state,
    qfi_rqc,
    sample_gate_set,
    staircase_sigma,
    symmetric_projector,
    symmetric_subspace_trace_h2,
)
from qfilab.haar import SeedPath, sample_cue
from qfilab.linalg import two_site_embedding, unitarity_defect
from qfilab.metrology import qfi_operator
from qfilab.weingarten import sym_predictions


# ---------------------------------------------------------------------------
# schedules and the floquet builder

def test_identity_gates_give_identity():
    geom = ChainGeometry(4, 2)
    eye_gates = [np.eye(4, dtype=complex)] * 4
    for schedule in (Brickwork(), staircase_sigma(4)):
        dense = build_floquet(geom, schedule, eye_gates, mode="dense")
        assert np.allclose(dense, np.eye(16))


def test_brickwork_l2_matches_kron_oracle():
    geom = ChainGeometry(2, 2)
    gates = sample_gate_set(geom, 7)
    dense = build_floquet(geom, Brickwork(), gates, mode="dense")
    swap = np.eye(4)[[0, 2, 1, 3]]
    u_o = gates[0]                      # bond (1,2)
    u_e = swap @ gates[1] @ swap        # bond (2,1) written in (site2, site1) order
    assert np.max(np.abs(dense - u_e @ u_o)) <= 1e-12


def test_brickwork_requires_even_sites():
    geom = ChainGeometry(3, 2)
    gates = [np.eye(4, dtype=complex)] * 3
    with pytest.raises(ConfigError):
        build_floquet(geom, Brickwork(), gates, mode="dense")


def test_floquet_unitarity():
    geom = ChainGeometry(4, 2)
    gates = sample_gate_set(geom, 8)
    dense = build_floquet(geom, Brickwork(), gates, mode="dense")
    assert unitarity_defect(dense) <= 1e-10 * geom.dim


def test_dense_and_applier_agree():
    rng = np.random.default_rng(2)
    geom = ChainGeometry(4, 2)
    gates = sample_gate_set(geom, 9)
    psi = rng.normal(size=16) + 1j * rng.normal(size=16)
    psi /= np.linalg.norm(psi)
    for schedule in (Brickwork(), staircase_sigma(4), SigmaConfig((1, 1, -1, -1))):
        dense = build_floquet(geom, schedule, gates, mode="dense")
        applier = build_floquet(geom, schedule, gates, mode="applier")
        assert np.max(np.abs(dense @ psi - applier(psi))) <= 1e-12


def test_staircase_sigma_is_descending_sweep():
    geom = ChainGeometry(4, 2)
    gates = sample_gate_set(geom, 10)
    dense = build_floquet(geom, staircase_sigma(4), gates, mode="dense")
    ref = np.eye(16, dtype=complex)
    for bond in (4, 3, 2, 1):
        ref = two_site_embedding(gates[bond - 1], bond, 4, 2) @ ref
    assert np.max(np.abs(dense - ref)) <= 1e-12


def test_alternating_sigma_equals_brickwork():
    geom = ChainGeometry(4, 2)
    gates = sample_gate_set(geom, 11)
    alt = build_floquet(geom, SigmaConfig((-1, 1, -1, 1)), gates, mode="dense")
    bw = build_floquet(geom, Brickwork(), gates, mode="dense")
    assert np.max(np.abs(alt - bw)) <= 1e-12


def test_random_sigma_configs_unitary():
    rng = np.random.default_rng(3)
    geom = ChainGeometry(5, 2)
    for trial in range(6):
        sigma = rng.choice([-1, 1], size=5)
        if len(set(sigma)) == 1:
            sigma[0] = -sigma[0]
        gates = sample_gate_set(geom, 100 + trial)
        dense = build_floquet(geom, SigmaConfig(tuple(sigma)), gates, mode="dense")
        assert unitarity_defect(dense) <= 1e-10 * geom.dim


def test_constant_sigma_rejected():
    with pytest.raises(ConfigError):
        SigmaConfig((1, 1, 1, 1))
    with pytest.raises(ConfigError):
        SigmaConfig((-1, -1, -1))


def test_sigma_needs_three_sites():
    with pytest.raises(ConfigError):
        SigmaConfig((1, -1))


def test_dense_capability_cap():
    geom = ChainGeometry(14, 2)  # 2^14 > 4096
    gates = [np.eye(4, dtype=complex)] * 14
    with pytest.raises(CapabilityError):
        build_floquet(geom, Brickwork(), gates, mode="dense")


def test_gate_count_checked():
    geom = ChainGeometry(4, 2)
    with pytest.raises(ConfigError):
        build_floquet(geom, Brickwork(), [np.eye(4, dtype=complex)] * 3)


# ---------------------------------------------------------------------------
# sensing hamiltonian

def test_global_hamiltonian_single_site():
    local = LocalSensingSpec(np.array([0.5, -0.5, 2.0]))
    h = global_sensing_hamiltonian(ChainGeometry(1, 3), local)
    assert np.allclose(h, local.h_diag)


def test_global_hamiltonian_traces():
    q, sites = 3, 3
    local = LocalSensingSpec.two_block(q)
    h = global_sensing_hamiltonian(ChainGeometry(sites, q), local)
    assert abs(h.sum()) <= 1e-9
    assert abs((h**2).sum() - sites * q ** (sites - 1) * local.tr_h2) <= 1e-9


def test_global_hamiltonian_matches_kron_sum():
    q, sites = 2, 3
    local = LocalSensingSpec(np.array([1.0, -1.0]))
    h = global_sensing_hamiltonian(ChainGeometry(sites, q), local)
    eye = np.eye(q)
    hd = np.diag(local.h_diag)
    dense = (np.kron(np.kron(hd, eye), eye) + np.kron(np.kron(eye, hd), eye)
             + np.kron(np.kron(eye, eye), hd))
    assert np.allclose(h, np.diag(dense))


# ---------------------------------------------------------------------------
# states

def test_product_state():
    psi = make_state("product", ChainGeometry(3, 4))
    assert abs(np.linalg.norm(psi) - 1) <= 1e-12
    assert np.count_nonzero(psi) == 1


def test_ghz_bell_case():
    psi = make_state("ghz", ChainGeometry(2, 2))
    expected = np.zeros(4)
    expected[0] = expected[3] = 1 / math.sqrt(2)
    assert np.allclose(psi, expected)


def test_ghz_single_site_purity():
    q, sites = 3, 2
    psi = make_state("ghz", ChainGeometry(sites, q))
    rho = np.outer(psi, psi.conj()).reshape(q, q, q, q)
    rho1 = np.trace(rho, axis1=1, axis2=3)
    purity = np.trace(rho1 @ rho1).real
    assert abs(purity - 0.5) <= 1e-12


def test_custom_state_normalized():
    psi = make_state("custom", ChainGeometry(2, 2), amplitudes=[1, 1, 0, 0])
    assert abs(np.linalg.norm(psi) - 1) <= 1e-12


# ---------------------------------------------------------------------------
# rqc qfi

def test_qfi_rqc_t0():
    geom = ChainGeometry(2, 2)
    gates = sample_gate_set(geom, 12)
    local = LocalSensingSpec.two_block(2)
    psi = make_state("product", geom)
    assert qfi_rqc("control", geom, Brickwork(), gates, local, 0, psi) == 0.0


def test_qfi_rqc_dense_cross_check():
    geom = ChainGeometry(2, 2)
    local = LocalSensingSpec.two_block(2, 1.0)
    gates = sample_gate_set(geom, 13)
    dense = build_floquet(geom, Brickwork(), gates, mode="dense")
    spec = global_sensing_spec(geom, local)
    psi = make_state("product", geom)
    for protocol in ("control", "state-prep"):
        a = qfi_operator(protocol, dense, spec, 3, psi)
        b = qfi_rqc(protocol, geom, Brickwork(), gates, local, 3, psi)
        assert abs(a - b) <= 1e-8 * max(abs(a), 1.0)


def test_qfi_rqc_zero_variance_case():
    geom = ChainGeometry(2, 2)
    gates = [np.eye(4, dtype=complex)] * 2
    local = LocalSensingSpec.two_block(2)
    psi = make_state("product", geom)  # h0 eigenstate on every site
    assert qfi_rqc("control", geom, Brickwork(), gates, local, 4, psi) <= 1e-12


def test_qfi_rqc_hard_bound_per_realization():
    geom = ChainGeometry(4, 2)
    local = LocalSensingSpec.two_block(2)
    psi = make_state("ghz", geom)
    for k in range(10):
        gates = sample_gate_set(geom, SeedPath(200).child(k))
        for t in (1, 3):
            f = qfi_rqc("control", geom, Brickwork(), gates, local, t, psi)
            assert f <= t * t * (geom.sites * local.delta) ** 2 + 1e-9


# ---------------------------------------------------------------------------
# symmetric subspace

def test_symmetric_projector_triplet():
    basis, dim = symmetric_projector(ChainGeometry(2, 2))
    assert dim == 3
    idx = {tuple(np.nonzero(row)[0]): row for row in basis}
    assert np.allclose(idx[(0,)][0], 1.0)
    assert np.allclose(idx[(3,)][3], 1.0)
    assert np.allclose(idx[(1, 2)][[1, 2]], 1 / math.sqrt(2))


@pytest.mark.parametrize("sites", [2, 3, 4])
@pytest.mark.parametrize("q", [2, 3, 4])
def test_symmetric_dimension_matches_prediction(sites, q):
    basis, dim = symmetric_projector(ChainGeometry(sites, q))
    assert dim == sym_predictions(sites, q, 1.0)[0]
    # orthonormality
    assert np.allclose(basis @ basis.T, np.eye(dim), atol=1e-12)


def test_symmetric_trace_closed_form():
    local = LocalSensingSpec.two_block(2)
    got = symmetric_subspace_trace_h2(ChainGeometry(2, 2), local)
    assert abs(got - 8.0) <= 1e-9


# ---------------------------------------------------------------------------
# cue equivalence moment

def test_cue_reference_at_t1():
    m = cue_equivalence_moment(ChainGeometry(2, 2), 1, 50, 5)
    assert m.cue_value == 1.0
    assert m.cue_stderr == 0.0


def test_l2_moment_consistent_with_independent_run():
    # at L=2 both gates act on the whole space, so the circuit ensemble is
    # exactly CUE; two independently seeded estimates must agree within 3 SE
    geom = ChainGeometry(2, 2)
    a = cue_equivalence_moment(geom, 1, 3000, 901)
    b = cue_equivalence_moment(geom, 1, 3000, 902)
    comb = math.hypot(a.rqc_stderr, b.rqc_stderr)
    assert abs(a.rqc_mean - b.rqc_mean) <= 3 * comb
    assert abs(a.rqc_mean - a.cue_value) <= 3 * a.rqc_stderr


def test_moment_gap_shrinks_with_q_at_l4():
    # L=4 brickwork is genuinely non-CUE; the relative gap decays with q
    t = 2
    gaps = {}
    for q, samples in ((2, 3000), (3, 1200)):
        m = cue_equivalence_moment(ChainGeometry(4, q), t, samples, 910 + q)
        gaps[q] = m.relative_gap
    assert gaps[3] < gaps[2]


def test_moment_requires_t_within_dim():
    with pytest.raises(ValueError):
        cue_equivalence_moment(ChainGeometry(2, 2), 5, 10, 1)


def test_moment_comparison_fields():
    m = MomentComparison(2.1, 0.05, 2.0)
    assert abs(m.relative_gap - 0.05) <= 1e-12
