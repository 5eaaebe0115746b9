import numpy as np
import pytest

from qfilab.errors import CapabilityError
from qfilab.haar import sample_cue
from qfilab.linalg import (
    apply_two_site_gate,
    kron,
    sensing_gate,
    two_site_embedding,
    unitarity_defect,
)

SWAP = np.eye(4)[[0, 2, 1, 3]].astype(complex)


def test_kron_identity():
    assert np.array_equal(kron(np.eye(2), np.eye(2)), np.eye(4))


def test_kron_diagonal():
    out = kron(np.diag([1.0, -1.0]), np.eye(2))
    assert np.array_equal(out, np.diag([1.0, 1.0, -1.0, -1.0]))


def test_kron_shape_arithmetic():
    a = np.ones((2, 3))
    b = np.ones((4, 5))
    assert kron(a, b).shape == (8, 15)


def test_kron_size_cap():
    big = np.ones((2**7, 2**7))
    with pytest.raises(CapabilityError):
        kron(big, big, max_entries=2**24)


def test_kron_associative_on_integers():
    rng = np.random.default_rng(0)
    a, b, c = (rng.integers(-3, 4, size=(2, 2)) for _ in range(3))
    assert np.array_equal(kron(kron(a, b), c), kron(a, kron(b, c)))


def test_sensing_gate_zero_theta():
    assert np.allclose(sensing_gate(np.array([1.0, -1.0]), 0.0), np.eye(2))


def test_sensing_gate_pi():
    g = sensing_gate(np.array([1.0, -1.0]), np.pi)
    assert np.allclose(g, -np.eye(2), atol=1e-15)


def test_sensing_gate_unit_theta():
    g = sensing_gate(np.array([1.0, -1.0]), 1.0)
    assert np.allclose(np.diag(g), [np.exp(-1j), np.exp(1j)])


def test_sensing_gate_rejects_nonfinite_theta():
    with pytest.raises(ValueError):
        sensing_gate(np.array([1.0]), np.inf)


def test_apply_identity_gate():
    psi = np.arange(8, dtype=complex)
    psi /= np.linalg.norm(psi)
    out = apply_two_site_gate(psi, np.eye(4, dtype=complex), 2, 2)
    assert np.allclose(out, psi)


def test_swap_on_01():
    psi = np.zeros(4, dtype=complex)
    psi[1] = 1.0  # |01>
    out = apply_two_site_gate(psi, SWAP, 1, 2)
    expected = np.zeros(4, dtype=complex)
    expected[2] = 1.0  # |10>
    assert np.allclose(out, expected)


def test_gate_application_matches_dense_embedding_l3():
    rng = np.random.default_rng(1)
    gate = sample_cue(4, 17)
    psi = rng.normal(size=8) + 1j * rng.normal(size=8)
    psi /= np.linalg.norm(psi)
    for site in (1, 2, 3):
        dense = two_site_embedding(gate, site, 3, 2)
        assert np.max(np.abs(dense @ psi - apply_two_site_gate(psi, gate, site, 2))) <= 1e-12


@pytest.mark.parametrize("L,q", [(2, 2), (3, 2), (4, 2), (2, 3), (3, 3), (4, 3)])
def test_gate_application_matches_dense_all_geometries(L, q):
    rng = np.random.default_rng(L * 10 + q)
    psi = rng.normal(size=q**L) + 1j * rng.normal(size=q**L)
    psi /= np.linalg.norm(psi)
    for trial in range(3):
        gate = sample_cue(q * q, 1000 * L + 10 * q + trial)
        site = int(rng.integers(1, L + 1))
        dense = two_site_embedding(gate, site, L, q)
        assert np.max(np.abs(dense @ psi - apply_two_site_gate(psi, gate, site, q))) <= 1e-12


def test_norm_preserved_over_gate_sequences():
    rng = np.random.default_rng(5)
    q, L = 3, 3
    psi = rng.normal(size=q**L) + 1j * rng.normal(size=q**L)
    psi /= np.linalg.norm(psi)
    for k in range(30):
        gate = sample_cue(q * q, 7000 + k)
        psi = apply_two_site_gate(psi, gate, 1 + k % L, q)
    assert abs(np.linalg.norm(psi) - 1.0) <= 1e-10


def test_embedding_is_unitary():
    gate = sample_cue(9, 23)
    assert unitarity_defect(two_site_embedding(gate, 3, 3, 3)) <= 1e-10 * 27
