"""Dense complex linear algebra and qudit-chain state operations.

States on an L-site chain of qudits (local dimension q) are flat complex
vectors of length q**L with site 1 as the most significant digit of the
basis index. All functions are pure; arrays are never mutated in place.
"""
from __future__ import annotations

import numpy as np

from .errors import CapabilityError, NumericsError

# Largest dense object (by entry count) any routine here will allocate.
MAX_DENSE_ENTRIES = 2**24


def check_finite(a: np.ndarray, what: str = "array") -> np.ndarray:
    a = np.asarray(a)
    if not np.all(np.isfinite(a)):
        raise NumericsError(f"non-finite entries in {what}")
    return a


def unitarity_defect(u: np.ndarray) -> float:
    """Max-norm deviation of U†U from the identity."""
    u = np.asarray(u)
    n = u.shape[-1]
    return float(np.max(np.abs(u.conj().swapaxes(-1, -2) @ u - np.eye(n))))


def assert_unitary(u: np.ndarray, tol_per_dim: float = 1e-10) -> np.ndarray:
    """Raise unless ‖U†U − I‖_max ≤ tol_per_dim · dim."""
    u = np.asarray(u, dtype=complex)
    n = u.shape[-1]
    defect = unitarity_defect(u)
    if defect > tol_per_dim * n:
        raise NumericsError(f"matrix not unitary: defect {defect:.3e} > {tol_per_dim * n:.3e}")
    return u


def assert_state(psi: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    nrm = np.linalg.norm(psi)
    if abs(nrm - 1.0) > tol:
        raise ValueError(f"state not normalized: ‖ψ‖ = {nrm!r}")
    return psi


def kron(a: np.ndarray, b: np.ndarray, max_entries: int = MAX_DENSE_ENTRIES) -> np.ndarray:
    """Kronecker product with a hard cap on the result size."""
    a = np.asarray(a)
    b = np.asarray(b)
    entries = a.shape[0] * b.shape[0] * a.shape[1] * b.shape[1]
    if entries > max_entries:
        raise CapabilityError(f"kron result would hold {entries} entries (cap {max_entries})")
    return np.kron(a, b)


def kron_all(mats, max_entries: int = MAX_DENSE_ENTRIES) -> np.ndarray:
    out = np.asarray(mats[0])
    for m in mats[1:]:
        out = kron(out, m, max_entries)
    return out


def sensing_gate(h_diag: np.ndarray, theta: float) -> np.ndarray:
    """Dense diagonal unitary e^{-i θ h} for a real diagonal Hamiltonian h."""
    if not np.isfinite(theta):
        raise ValueError("theta must be finite")
    return np.diag(sensing_phases(h_diag, theta))


def sensing_phases(h_diag: np.ndarray, theta: float) -> np.ndarray:
    """Diagonal of e^{-i θ h} as a flat vector (cheap form of sensing_gate)."""
    if not np.isfinite(theta):
        raise ValueError("theta must be finite")
    h = np.asarray(h_diag, dtype=float)
    return np.exp(-1j * theta * h)


def apply_two_site_gate(psi: np.ndarray, gate: np.ndarray, site: int, q: int) -> np.ndarray:
    """Apply a q²×q² gate to (site, site+1) of a periodic chain state.

    Sites are 1-based; site L pairs with site 1 through the periodic wrap,
    implemented by contracting the first and last tensor axes rather than
    rotating the state. The gate's row/column indices are ordered
    (site, site+1) in the q·q product basis.
    """
    psi = np.asarray(psi)
    n = psi.size
    L = round(np.log(n) / np.log(q))
    if q**L != n:
        raise ValueError(f"state length {n} is not a power of q={q}")
    if gate.shape != (q * q, q * q):
        raise ValueError(f"gate shape {gate.shape} does not match q²={q * q}")
    if not 1 <= site <= L:
        raise ValueError(f"site {site} outside 1..{L}")
    if L == 1:
        raise ValueError("two-site gate needs at least two sites")

    ax1 = site - 1
    ax2 = site % L
    g4 = gate.reshape(q, q, q, q)
    t = psi.reshape((q,) * L)
    in_labels = list(range(L))
    out_labels = list(range(L))
    out_labels[ax1] = L
    out_labels[ax2] = L + 1
    out = np.einsum(g4, [L, L + 1, ax1, ax2], t, in_labels, out_labels)
    return out.reshape(n)


def two_site_embedding(gate: np.ndarray, site: int, L: int, q: int) -> np.ndarray:
    """Dense q^L × q^L embedding of a two-site gate on (site, site+1 mod L)."""
    n = q**L
    if n * n > MAX_DENSE_ENTRIES:
        raise CapabilityError(f"dense embedding of size {n}² exceeds cap")
    if site < L:
        left = np.eye(q ** (site - 1))
        right = np.eye(q ** (L - site - 1))
        return kron_all([left, gate, right])
    # wrap gate on (L, 1): build in site order (L, 1, 2, ..., L-1), then
    # permute both row and column axes back to natural order (1, ..., L)
    big = kron(gate, np.eye(q ** (L - 2))).reshape((q,) * (2 * L))
    order = [L] + list(range(1, L))  # current axis i holds site order[i]
    perm = [order.index(s + 1) for s in range(L)]
    full_perm = perm + [L + p for p in perm]
    return big.transpose(full_perm).reshape(n, n)
