"""Per-realization QFI for the control and state-preparation protocols.

Two independent computation paths are kept on purpose: a dense
operator-variance path (builds the metrological generator explicitly,
capped at dimension 1024) and a state-derivative recursion that only ever
touches vectors. They serve as mutual oracles.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .errors import NumericsError
from .linalg import assert_state, sensing_phases

OPERATOR_DIM_CAP = 1024
VAR_CLAMP = 1e-9


class Protocol(Enum):
    CONTROL = "control"
    STATE_PREP = "state-prep"


def as_protocol(p) -> Protocol:
    if isinstance(p, Protocol):
        return p
    return Protocol(str(p))


def two_block_diag(dim: int) -> np.ndarray:
    """Traceless ±1 two-block diagonal; odd dims get the mean subtracted."""
    h = np.ones(dim)
    h[(dim + 1) // 2:] = -1.0
    return h - h.mean()


@dataclass(frozen=True)
class SensingSpec:
    """Diagonal sensing Hamiltonian H₀ plus the encoding parameter θ."""

    h_diag: np.ndarray
    theta: float = 1.0

    def __post_init__(self):
        h = np.asarray(self.h_diag, dtype=float)
        if h.ndim != 1:
            raise ValueError("h_diag must be a flat real diagonal")
        object.__setattr__(self, "h_diag", h)
        if not np.isfinite(self.theta):
            raise ValueError("theta must be finite")

    @classmethod
    def two_block(cls, dim: int, theta: float = 1.0) -> "SensingSpec":
        return cls(two_block_diag(dim), theta)

    @property
    def dim(self) -> int:
        return self.h_diag.size

    @property
    def tr_h(self) -> float:
        return float(self.h_diag.sum())

    @property
    def tr_h2(self) -> float:
        return float((self.h_diag**2).sum())

    @property
    def delta(self) -> float:
        """Spectral width: max eigenvalue minus min eigenvalue."""
        return float(self.h_diag.max() - self.h_diag.min())

    def phases(self) -> np.ndarray:
        return sensing_phases(self.h_diag, self.theta)


def metrological_generator(protocol, u: np.ndarray, spec: SensingSpec, t: int) -> np.ndarray:
    """Hermitian generator whose variance gives the QFI (dense path).

    Control: Σ_{s=1..t} (U†W†)ˢ H₀ (WU)ˢ; state-prep: t · U†ᵗ H₀ Uᵗ.
    """
    protocol = as_protocol(protocol)
    u = np.asarray(u, dtype=complex)
    n = u.shape[0]
    if n != spec.dim:
        raise ValueError(f"dimension mismatch: U is {n}, spec is {spec.dim}")
    if n > OPERATOR_DIM_CAP:
        raise NumericsError(f"operator path capped at dim {OPERATOR_DIM_CAP}")
    if t < 0:
        raise ValueError("t must be >= 0")
    if t == 0:
        return np.zeros((n, n), dtype=complex)
    h = spec.h_diag
    if protocol is Protocol.CONTROL:
        m = spec.phases()[:, None] * u  # W U
        g = np.zeros((n, n), dtype=complex)
        ms = np.eye(n, dtype=complex)
        for _ in range(t):
            ms = m @ ms
            g += ms.conj().T * h @ ms
    else:
        ut = np.linalg.matrix_power(u, t)
        g = t * (ut.conj().T * h @ ut)
    g = 0.5 * (g + g.conj().T)
    return g


def _variance(op: np.ndarray, psi: np.ndarray) -> float:
    gpsi = op @ psi
    mean = np.vdot(psi, gpsi)
    if abs(mean.imag) > 1e-8 * max(1.0, abs(mean)):
        raise NumericsError("generator expectation not real — operator not Hermitian?")
    var = float(np.vdot(gpsi, gpsi).real - mean.real**2)
    return var


def _clamped(var: float) -> float:
    if var < -VAR_CLAMP:
        raise NumericsError(f"variance {var} below clamp tolerance -{VAR_CLAMP}")
    return max(var, 0.0)


def qfi_operator(protocol, u: np.ndarray, spec: SensingSpec, t: int, psi0: np.ndarray) -> float:
    """QFI = 4·Var of the metrological generator on a pure initial state."""
    psi0 = assert_state(psi0)
    g = metrological_generator(protocol, u, spec, t)
    return 4.0 * _clamped(_variance(g, psi0))


StepApplier = Callable[[np.ndarray], np.ndarray]


def qfi_recursion_curve(protocol, step_applier: StepApplier, spec: SensingSpec,
                        t_max: int, psi0: np.ndarray) -> np.ndarray:
    """QFI at every t = 1..t_max via |∂_θψ⟩ propagation; O(t) applier calls.

    step_applier applies the random part U of one time step to a state
    vector; the sensing phase and its θ-derivative are handled here.
    """
    protocol = as_protocol(protocol)
    psi0 = assert_state(psi0)
    if t_max < 0:
        raise ValueError("t_max must be >= 0")
    h = spec.h_diag
    w = spec.phases()
    out = np.empty(t_max)
    if protocol is Protocol.CONTROL:
        psi = psi0.astype(complex)
        dpsi = np.zeros_like(psi)
        for s in range(1, t_max + 1):
            psi = w * step_applier(psi)
            dpsi = w * step_applier(dpsi) - 1j * h * psi
            out[s - 1] = 4.0 * _clamped(
                float(np.vdot(dpsi, dpsi).real - abs(np.vdot(psi, dpsi)) ** 2)
            )
    else:
        psi = psi0.astype(complex)
        for s in range(1, t_max + 1):
            psi = step_applier(psi)
            # ψ_θ = Wˢψ and ∂_θψ_θ = −i·s·H₀ψ_θ; the diagonal phase Wˢ drops
            # out of the variance, so evaluate on the unencoded state.
            hpsi = h * psi
            var = float(np.vdot(hpsi, hpsi).real - np.vdot(psi, hpsi).real ** 2)
            out[s - 1] = 4.0 * s * s * _clamped(var)
    return out


def qfi_state_recursion(protocol, step_applier: StepApplier, spec: SensingSpec,
                        t: int, psi0: np.ndarray) -> float:
    """QFI at a single time t via the state-derivative recursion."""
    if t == 0:
        assert_state(psi0)
        return 0.0
    return float(qfi_recursion_curve(protocol, step_applier, spec, t, psi0)[-1])


def qfi_upper_bound(t: int, delta: float) -> float:
    """Hard ceiling t²Δ² on the QFI of either protocol."""
    if t < 0 or delta < 0:
        raise ValueError("t and delta must be >= 0")
    return float(t * t * delta * delta)


def control_variance_chain(u: np.ndarray, spec: SensingSpec, t: int,
                           psi0: np.ndarray) -> tuple[float, float, float]:
    """The three-step bound chain for the control protocol.

    Returns (4(Σ_s√Var[H(s)])², 4tΣ_sVar[H(s)], t²Δ²), each term
    dominating the previous one and the first dominating the QFI.
    """
    psi0 = assert_state(psi0)
    h = spec.h_diag
    m = spec.phases()[:, None] * np.asarray(u, dtype=complex)
    ms = np.eye(spec.dim, dtype=complex)
    variances = []
    for _ in range(t):
        ms = m @ ms
        hs = ms.conj().T * h @ ms
        variances.append(_clamped(_variance(0.5 * (hs + hs.conj().T), psi0)))
    sqrt_sum = sum(np.sqrt(v) for v in variances)
    return (
        4.0 * sqrt_sum**2,
        4.0 * t * sum(variances),
        qfi_upper_bound(t, spec.delta),
    )
