"""Floquet circuits on periodic qudit chains and the RQC-side QFI.

Two one-period layouts are supported. The brickwork schedule applies a
layer of gates on odd bonds (1,2),(3,4),... followed by a layer on even
bonds (2,3),...,(L,1). The generic one-period layout is parametrized by a
per-site sign σ(μ) selecting which neighboring gate's output is wired
into which input; every non-constant σ yields an acyclic wiring, i.e. an
ordinary circuit, and is realized as a sequential product of the L bond
gates in topological order. The two constant sign patterns close the
wiring into a loop around the ring and do not define a unitary (a SWAP
gate makes the contraction q times a shift), so they are rejected.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations_with_replacement, permutations as iter_permutations

import numpy as np

from .errors import CapabilityError, ConfigError
from .haar import as_seed_path, sample_cue
from .linalg import apply_two_site_gate, two_site_embedding
from .metrology import (
    SensingSpec,
    qfi_recursion_curve,
    qfi_state_recursion,
    two_block_diag,
)

DENSE_DIM_CAP = 4096
STATE_DIM_CAP = 2**24


@dataclass(frozen=True)
class ChainGeometry:
    """Periodic chain of `sites` qudits with local dimension q."""

    sites: int
    q: int

    def __post_init__(self):
        if self.sites < 1:
            raise ConfigError("sites must be >= 1")
        if self.q < 2:
            raise ConfigError("q must be >= 2")

    @property
    def dim(self) -> int:
        return self.q**self.sites

    def require_state(self):
        if self.dim > STATE_DIM_CAP:
            raise CapabilityError(f"q^L = {self.dim} exceeds state cap {STATE_DIM_CAP}")

    def require_dense(self):
        if self.dim > DENSE_DIM_CAP:
            raise CapabilityError(f"q^L = {self.dim} exceeds dense cap {DENSE_DIM_CAP}")


@dataclass(frozen=True)
class Brickwork:
    """Odd-bond layer then even-bond layer; needs an even number of sites."""

    def bond_order(self, sites: int) -> list[int]:
        if sites % 2 != 0:
            raise ConfigError("brickwork schedule requires an even number of sites")
        odd = list(range(1, sites + 1, 2))
        even = list(range(2, sites + 1, 2))
        return odd + even


@dataclass(frozen=True)
class SigmaConfig:
    """Per-site ±1 wiring choice for the generic one-period layout."""

    sigma: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "sigma", tuple(int(s) for s in self.sigma))
        if any(s not in (1, -1) for s in self.sigma):
            raise ConfigError("sigma entries must be +1 or -1")
        if len(self.sigma) < 3:
            raise ConfigError("sigma layout needs at least 3 sites (bond labels are "
                              "ambiguous on a 2-site ring)")
        if len(set(self.sigma)) == 1:
            raise ConfigError("constant sigma wires the ring into a closed loop and "
                              "does not define a unitary")

    def bond_order(self, sites: int) -> list[int]:
        """Topological order of the bond gates; bond μ couples (μ, μ+1)."""
        if sites != len(self.sigma):
            raise ConfigError(f"sigma has {len(self.sigma)} entries for {sites} sites")
        # σ(μ)=+1: gate on bond μ-1 feeds gate on bond μ at site μ;
        # σ(μ)=-1: the reverse. Edges (before -> after) over the bond ring.
        after = {b: set() for b in range(1, sites + 1)}
        indeg = {b: 0 for b in range(1, sites + 1)}
        for mu in range(1, sites + 1):
            prev_bond = mu - 1 if mu > 1 else sites
            if self.sigma[mu - 1] == 1:
                a, b = prev_bond, mu
            else:
                a, b = mu, prev_bond
            if b not in after[a]:
                after[a].add(b)
                indeg[b] += 1
        order, ready = [], [b for b in range(1, sites + 1) if indeg[b] == 0]
        while ready:
            ready.sort()
            cur = ready.pop(0)
            order.append(cur)
            for nxt in sorted(after[cur]):
                indeg[nxt] -= 1
                if indeg[nxt] == 0:
                    ready.append(nxt)
        if len(order) != sites:
            raise ConfigError("sigma wiring is cyclic")  # unreachable for non-constant σ
        return order


def staircase_sigma(sites: int) -> SigmaConfig:
    """σ = (+1, −1, ..., −1): the bond gates composed in one descending sweep."""
    return SigmaConfig((1,) + (-1,) * (sites - 1))


@dataclass(frozen=True)
class LocalSensingSpec:
    """Single-site sensing Hamiltonian h₀ (diagonal) and encoding θ."""

    h_diag: np.ndarray
    theta: float = 1.0

    def __post_init__(self):
        h = np.asarray(self.h_diag, dtype=float)
        if h.ndim != 1:
            raise ValueError("h_diag must be a flat real diagonal")
        object.__setattr__(self, "h_diag", h)

    @classmethod
    def two_block(cls, q: int, theta: float = 1.0) -> "LocalSensingSpec":
        return cls(two_block_diag(q), theta)

    @property
    def q(self) -> int:
        return self.h_diag.size

    @property
    def tr_h(self) -> float:
        return float(self.h_diag.sum())

    @property
    def tr_h2(self) -> float:
        return float((self.h_diag**2).sum())

    @property
    def delta(self) -> float:
        return float(self.h_diag.max() - self.h_diag.min())


def global_sensing_hamiltonian(geom: ChainGeometry, local: LocalSensingSpec) -> np.ndarray:
    """Diagonal of H₀ = Σ_μ I⊗…⊗h₀⊗…⊗I on the full chain."""
    if local.q != geom.q:
        raise ValueError("local spec dimension differs from chain q")
    geom.require_state()
    h = np.zeros(geom.dim)
    for mu in range(geom.sites):
        shape = [1] * geom.sites
        shape[mu] = geom.q
        h = h + np.broadcast_to(
            local.h_diag.reshape(shape), (geom.q,) * geom.sites
        ).reshape(geom.dim)
    return h


def global_sensing_spec(geom: ChainGeometry, local: LocalSensingSpec) -> SensingSpec:
    return SensingSpec(global_sensing_hamiltonian(geom, local), local.theta)


def _resolve_schedule(schedule) -> Brickwork | SigmaConfig:
    if isinstance(schedule, (Brickwork, SigmaConfig)):
        return schedule
    if schedule == "brickwork":
        return Brickwork()
    raise ConfigError(f"unknown schedule {schedule!r}")


def build_floquet(geom: ChainGeometry, schedule, gates, mode: str = "applier"):
    """One-period evolution from L two-site gates, one per bond.

    gates[μ-1] acts on bond μ = (μ, μ+1 mod L) regardless of schedule; the
    schedule only fixes the composition order. mode="applier" returns a
    function mapping a state vector through one period (works up to
    q^L = 2²⁴); mode="dense" returns the full matrix (up to q^L = 4096).
    """
    schedule = _resolve_schedule(schedule)
    order = schedule.bond_order(geom.sites)
    gates = [np.asarray(g, dtype=complex) for g in gates]
    if len(gates) != geom.sites:
        raise ConfigError(f"schedule needs {geom.sites} gates, got {len(gates)}")
    qq = geom.q * geom.q
    for g in gates:
        if g.shape != (qq, qq):
            raise ConfigError(f"gate shape {g.shape} != ({qq}, {qq})")

    if mode == "applier":
        geom.require_state()
        q = geom.q

        def applier(psi: np.ndarray) -> np.ndarray:
            for bond in order:
                psi = apply_two_site_gate(psi, gates[bond - 1], bond, q)
            return psi

        return applier
    if mode == "dense":
        geom.require_dense()
        u = np.eye(geom.dim, dtype=complex)
        for bond in order:
            u = two_site_embedding(gates[bond - 1], bond, geom.sites, geom.q) @ u
        return u
    raise ConfigError(f"unknown mode {mode!r}")


def sample_gate_set(geom: ChainGeometry, seed) -> list[np.ndarray]:
    """L independent Haar q²×q² gates, one child seed per bond slot."""
    path = as_seed_path(seed)
    return [sample_cue(geom.q**2, path.child(i)) for i in range(geom.sites)]


def make_state(kind: str, geom: ChainGeometry, amplitudes=None) -> np.ndarray:
    """Initial states: |0…0⟩ product, two-branch GHZ on levels {0, q−1}, or custom."""
    geom.require_state()
    n = geom.dim
    if kind == "product":
        psi = np.zeros(n, dtype=complex)
        psi[0] = 1.0
        return psi
    if kind == "ghz":
        psi = np.zeros(n, dtype=complex)
        psi[0] = 1.0 / math.sqrt(2.0)
        psi[-1] = 1.0 / math.sqrt(2.0)  # index q^L−1 = |(q−1)…(q−1)⟩
        return psi
    if kind == "custom":
        if amplitudes is None:
            raise ConfigError("custom state needs amplitudes")
        psi = np.asarray(amplitudes, dtype=complex)
        if psi.size != n:
            raise ConfigError(f"custom state has {psi.size} amplitudes, expected {n}")
        return psi / np.linalg.norm(psi)
    raise ConfigError(f"unknown state kind {kind!r}")


def qfi_rqc(protocol, geom: ChainGeometry, schedule, gates, local: LocalSensingSpec,
            t: int, psi0: np.ndarray) -> float:
    """QFI of one circuit realization, via the state recursion."""
    applier = build_floquet(geom, schedule, gates, mode="applier")
    spec = global_sensing_spec(geom, local)
    return qfi_state_recursion(protocol, applier, spec, t, psi0)


def qfi_rqc_curve(protocol, geom, schedule, gates, local, t_max, psi0) -> np.ndarray:
    applier = build_floquet(geom, schedule, gates, mode="applier")
    spec = global_sensing_spec(geom, local)
    return qfi_recursion_curve(protocol, applier, spec, t_max, psi0)


def symmetric_projector(geom: ChainGeometry) -> tuple[np.ndarray, int]:
    """Orthonormal basis of the permutation-symmetric (bosonic) subspace.

    Returns (basis, dim) with basis rows living in the q^L product space.
    """
    geom.require_dense()
    L, q = geom.sites, geom.q
    occupations = list(combinations_with_replacement(range(q), L))
    dim = math.comb(L + q - 1, L)
    basis = np.zeros((len(occupations), geom.dim))
    weights = q ** np.arange(L - 1, -1, -1)
    for row, levels in enumerate(occupations):
        arrangements = set(iter_permutations(levels))
        amp = 1.0 / math.sqrt(len(arrangements))
        for arr in arrangements:
            basis[row, int(np.dot(arr, weights))] = amp
    assert len(occupations) == dim
    return basis, dim


def symmetric_subspace_trace_h2(geom: ChainGeometry, local: LocalSensingSpec) -> float:
    """tr over the symmetric subspace of H₀², via the explicit projector."""
    basis, _ = symmetric_projector(geom)
    h2 = global_sensing_hamiltonian(geom, local) ** 2
    return float(np.einsum("bi,i,bi->", basis, h2, basis))


@dataclass(frozen=True)
class MomentComparison:
    """Monte Carlo ⟨|Tr U_F^t|²⟩ for the circuit ensemble vs the CUE value."""

    rqc_mean: float
    rqc_stderr: float
    cue_value: float
    cue_stderr: float = 0.0  # min(t, N) is exact, not estimated

    @property
    def relative_gap(self) -> float:
        return abs(self.rqc_mean - self.cue_value) / self.cue_value


def cue_equivalence_moment(geom: ChainGeometry, t: int, samples: int, seed,
                           schedule=None) -> MomentComparison:
    """Compare the circuit's trace moment against the CUE value min(t, q^L)."""
    geom.require_dense()
    if t > geom.dim:
        raise ValueError("moment comparison assumes t <= q^L")
    schedule = Brickwork() if schedule is None else _resolve_schedule(schedule)
    root = as_seed_path(seed)
    vals = np.empty(samples)
    for k in range(samples):
        gates = sample_gate_set(geom, root.child(k))
        uf = build_floquet(geom, schedule, gates, mode="dense")
        vals[k] = abs(np.trace(np.linalg.matrix_power(uf, t))) ** 2
    cue = float(min(t, geom.dim))
    return MomentComparison(
        rqc_mean=float(vals.mean()),
        rqc_stderr=float(vals.std(ddof=1) / math.sqrt(samples)),
        cue_value=cue,
    )
