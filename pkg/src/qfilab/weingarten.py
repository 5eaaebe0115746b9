"""Exact Weingarten tables and small-degree Haar moment evaluation.

The table for degree t and dimension N is built by inverting the Gram
matrix G[σ,τ] = N^(#cycles of σ⁻¹τ) over the symmetric group S_t:
exact rational inversion when G is invertible (N ≥ t), floating-point
pseudo-inversion in the degenerate regime N < t. Haar averages of trace
products of degree ≤ 3 are evaluated by summing all (t!)² permutation
pairings, which is exact but factorially expensive — hence the hard caps.

Also collects every closed-form prediction used elsewhere: the exact
one-step QFI law, the asymptotic scaling table, the spectral-form-factor
analytics and the symmetric-subspace trace identity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations as all_permutations

import numpy as np

from .errors import CapabilityError, NumericsError

MAX_TABLE_DEGREE = 6
MAX_WORD_DEGREE = 3
MAX_TRACE_GROUPS = 2

# Sentinels for unitary slots inside a trace word.
U = "u"
UDAG = "udag"


# ---------------------------------------------------------------------------
# permutations (0-based image tuples)

def compose(p: tuple[int, ...], q: tuple[int, ...]) -> tuple[int, ...]:
    """(p ∘ q)(i) = p[q[i]]."""
    return tuple(p[q[i]] for i in range(len(p)))


def inverse(p: tuple[int, ...]) -> tuple[int, ...]:
    inv = [0] * len(p)
    for i, pi in enumerate(p):
        inv[pi] = i
    return tuple(inv)


def cycle_type(p: tuple[int, ...]) -> tuple[int, ...]:
    """Cycle lengths of a permutation, sorted descending (a partition of t)."""
    seen = [False] * len(p)
    lengths = []
    for start in range(len(p)):
        if seen[start]:
            continue
        length = 0
        i = start
        while not seen[i]:
            seen[i] = True
            i = p[i]
            length += 1
        lengths.append(length)
    return tuple(sorted(lengths, reverse=True))


def partitions(t: int) -> list[tuple[int, ...]]:
    """All partitions of t, each sorted descending."""
    if t == 0:
        return [()]
    out = []

    def rec(remaining, maxpart, prefix):
        if remaining == 0:
            out.append(tuple(prefix))
            return
        for k in range(min(remaining, maxpart), 0, -1):
            rec(remaining - k, k, prefix + [k])

    rec(t, t, [])
    return out


# ---------------------------------------------------------------------------
# Weingarten tables

@dataclass(frozen=True)
class WeingartenTable:
    degree: int
    dim: int
    values: dict  # cycle type -> Fraction (exact branch) or float
    exact: bool

    def value(self, ct: tuple[int, ...]):
        return self.values[ct]

    def entries(self):
        return sorted(self.values.items(), key=lambda kv: kv[0], reverse=True)

    def to_json_dict(self) -> dict:
        entries = []
        for ct, v in self.entries():
            if isinstance(v, Fraction):
                num, den = v.numerator, v.denominator
            else:
                num, den = float(v).as_integer_ratio()
            entries.append({"cycle_type": list(ct), "numerator": num, "denominator": den})
        return {"t": self.degree, "N": self.dim, "entries": entries}


def _fraction_inverse(g: list[list[Fraction]]) -> list[list[Fraction]]:
    """Exact Gauss-Jordan inverse; raises ZeroDivisionError if singular."""
    m = len(g)
    aug = [row[:] + [Fraction(int(i == j)) for j in range(m)] for i, row in enumerate(g)]
    for col in range(m):
        pivot = next((r for r in range(col, m) if aug[r][col] != 0), None)
        if pivot is None:
            raise ZeroDivisionError("singular matrix")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        pv = aug[col][col]
        aug[col] = [x / pv for x in aug[col]]
        for r in range(m):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [row[m:] for row in aug]


def weingarten_table(t: int, n: int) -> WeingartenTable:
    """Weingarten values for degree t on U(n), one entry per partition of t."""
    if t < 1:
        raise ValueError("degree must be >= 1")
    if t > MAX_TABLE_DEGREE:
        raise CapabilityError(f"degree {t} > {MAX_TABLE_DEGREE}: (t!)² pairing count blows up")
    if n < 1:
        raise ValueError("dimension must be >= 1")
    perms = list(all_permutations(range(t)))
    cycles = [len(cycle_type(p)) for p in perms]
    # G depends on σ⁻¹τ only; compute the row for σ = identity and permute.
    exact = n >= t and t <= MAX_WORD_DEGREE
    if exact:
        gram = [
            [Fraction(n) ** len(cycle_type(compose(inverse(p), q))) for q in perms]
            for p in perms
        ]
        try:
            winv = _fraction_inverse(gram)
        except ZeroDivisionError:
            exact = False
    if not exact:
        gram_f = np.array(
            [[float(n) ** len(cycle_type(compose(inverse(p), q))) for q in perms] for p in perms]
        )
        winv = np.linalg.pinv(gram_f)
    values = {}
    id_index = perms.index(tuple(range(t)))
    for j, q in enumerate(perms):
        ct = cycle_type(q)
        v = winv[id_index][j]
        if ct in values:
            # class function: all permutations of one cycle type share a value
            prev = values[ct]
            if abs(float(prev) - float(v)) > 1e-9 * max(1.0, abs(float(prev))):
                raise NumericsError("Weingarten values not constant on a conjugacy class")
        else:
            values[ct] = v if exact else float(v)
    return WeingartenTable(t, n, values, exact)


# ---------------------------------------------------------------------------
# trace-product Haar averages

@dataclass(frozen=True)
class TraceProductSpec:
    """Product of trace groups; each group is a cyclic word of U/UDAG slots
    and concrete square matrices, e.g. (rho, UDAG, h, U) for Tr(ρU†hU)."""

    groups: tuple

    @staticmethod
    def of(*groups) -> "TraceProductSpec":
        return TraceProductSpec(tuple(tuple(g) for g in groups))


def _normalize_groups(spec) -> list[list]:
    if isinstance(spec, TraceProductSpec):
        groups = spec.groups
    else:
        groups = spec
    return [list(g) for g in groups]


class _UnionFind:
    def __init__(self, size):
        self.parent = list(range(size))

    def find(self, i):
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def average_trace_product(spec, n: int) -> complex:
    """Haar average ⟨∏_j Tr(word_j)⟩ over U(n), by exhaustive pairing sum.

    Words with unequal U and U† counts vanish identically under the Haar
    measure and return 0 without computation. Degree is capped at 3 and
    the number of trace groups at 2.
    """
    groups = _normalize_groups(spec)
    if len(groups) > MAX_TRACE_GROUPS:
        raise CapabilityError(f"{len(groups)} trace groups > {MAX_TRACE_GROUPS}")

    # one bond label per factor boundary; factor i of a group carries
    # (row, col) = (label[i], label[i+1 mod k])
    u_rows, u_cols = [], []          # per U slot
    ud_alphas, ud_betas = [], []     # per U† slot: α = col label, β = row label
    mats = []                        # (matrix, row_label, col_label)
    n_labels = 0
    for group in groups:
        k = len(group)
        if k == 0:
            raise ValueError("empty trace group")
        labels = list(range(n_labels, n_labels + k))
        n_labels += k
        for i, item in enumerate(group):
            row, col = labels[i], labels[(i + 1) % k]
            if isinstance(item, str) and item == U:
                u_rows.append(row)
                u_cols.append(col)
            elif isinstance(item, str) and item == UDAG:
                ud_betas.append(row)
                ud_alphas.append(col)
            else:
                m = np.asarray(item, dtype=complex)
                if m.shape != (n, n):
                    raise ValueError(f"operator shape {m.shape} != ({n}, {n})")
                mats.append((m, row, col))

    t = len(u_rows)
    if t != len(ud_alphas):
        return 0.0 + 0.0j
    if t > MAX_WORD_DEGREE:
        raise CapabilityError(f"degree {t} > {MAX_WORD_DEGREE}")
    if t == 0:
        total = 1.0 + 0.0j
        for group in groups:
            prod = np.eye(n, dtype=complex)
            for item in group:
                prod = prod @ np.asarray(item, dtype=complex)
            total *= np.trace(prod)
        return complex(total)

    table = weingarten_table(t, n)
    perms = list(all_permutations(range(t)))
    total = 0.0 + 0.0j
    for p in perms:
        for pp in perms:
            v = float(table.value(cycle_type(compose(inverse(p), pp))))
            total += v * _contract_pairing(n, n_labels, mats, u_rows, u_cols,
                                           ud_alphas, ud_betas, p, pp)
    return complex(total)


def _contract_pairing(n, n_labels, mats, u_rows, u_cols, ud_alphas, ud_betas, p, pp):
    """Value of T_{P,P'}: glue U legs per the pairing, trace operator loops."""
    uf = _UnionFind(n_labels)
    for xi in range(len(u_rows)):
        uf.union(u_rows[xi], ud_alphas[p[xi]])
        uf.union(u_cols[xi], ud_betas[pp[xi]])

    row_of = {}   # class -> index of matrix whose row leg lives there
    col_of = {}
    for idx, (_, row, col) in enumerate(mats):
        rc, cc = uf.find(row), uf.find(col)
        if rc in row_of or cc in col_of:
            raise NumericsError("invalid contraction: duplicated operator leg in a class")
        row_of[rc] = idx
        col_of[cc] = idx

    touched = set(row_of) | set(col_of)
    all_classes = {uf.find(i) for i in range(n_labels)}
    value = complex(n) ** len(all_classes - touched)

    # each remaining class joins exactly one row leg and one col leg, so the
    # operators decompose into disjoint multiplication loops
    visited = [False] * len(mats)
    for start in range(len(mats)):
        if visited[start]:
            continue
        prod = np.eye(n, dtype=complex)
        idx = start
        while not visited[idx]:
            visited[idx] = True
            m, row, _ = mats[idx]
            prod = m @ prod
            rc = uf.find(row)
            if rc not in col_of:
                raise NumericsError("invalid contraction: open operator chain")
            idx = col_of[rc]
        if idx != start:
            raise NumericsError("invalid contraction: loop did not close on its start")
        value *= np.trace(prod)
    return value


# ---------------------------------------------------------------------------
# closed-form predictions

def qfi_t1_exact(n: int, tr_h: float, tr_h2: float) -> float:
    """Exact ensemble-averaged one-step QFI for a global Haar gate.

    4·( Tr[H²]/N − (Tr[H]² + Tr[H²])/(N²−1) + (Tr[H]² + Tr[H²])/(N(N²−1)) );
    the subtracted combination is the Haar mean of the squared expectation,
    (Tr[H]² + Tr[H²])/(N(N+1)).
    """
    if n < 2:
        raise ValueError("dimension must be >= 2")
    mixed = tr_h * tr_h + tr_h2
    return 4.0 * (tr_h2 / n - mixed / (n**2 - 1) + mixed / (n * (n**2 - 1)))


@dataclass(frozen=True)
class AsymptoticPrediction:
    """Leading-order average-QFI coefficient inputs for one protocol/model cell."""

    protocol: str               # "control" | "state-prep"
    model: str                  # "rmm" | "rqc"
    tr_h2: float                # Tr H₀² (rmm) or Tr h₀² (rqc, single site)
    dim: int | None = None      # N, rmm only
    q: int | None = None        # local dimension, rqc only
    sites: int | None = None    # L, rqc only

    def __post_init__(self):
        if self.protocol not in ("control", "state-prep"):
            raise ValueError(f"unknown protocol {self.protocol!r}")
        if self.model == "rmm":
            if not self.dim:
                raise ValueError("rmm prediction needs dim")
        elif self.model == "rqc":
            if not (self.q and self.sites):
                raise ValueError("rqc prediction needs q and sites")
        else:
            raise ValueError(f"unknown model {self.model!r}")


def predict_qfi(pred: AsymptoticPrediction, t: float) -> float:
    """Asymptotic average QFI: linear in t for control, quadratic for state-prep."""
    if t < 0:
        raise ValueError("t must be >= 0")
    tpow = t if pred.protocol == "control" else t * t
    if pred.model == "rmm":
        return 4.0 * pred.tr_h2 * tpow / pred.dim
    return 4.0 * pred.tr_h2 * tpow * pred.sites / pred.q


def k_analytics(t: int, w_trace_sq: float, n: int) -> tuple[float, float]:
    """Leading-order SFF-type pair: K_ctr(t) = t, K_sp(t) = (t−1)|TrWᵗ|²/N² + 1."""
    if t < 1:
        raise ValueError("t must be >= 1")
    k_ctr = float(t)
    k_sp = (t - 1) * w_trace_sq / n**2 + 1.0
    return k_ctr, k_sp


def k_sp_exact(t: int, w_trace_sq: float, n: int) -> float:
    """Finite-N value of the state-preparation trace moment (t ≤ N).

    Derived from the two invariant second moments of Uᵗ on the unitary
    group: ⟨Tr(Uᵗ)Tr(U†ᵗ)⟩ = min(t, N) and ⟨Tr(UᵗU†ᵗ)⟩ = N.
    """
    k0 = min(t, n)
    return (n**2 - k0) / (n**2 - 1) + (k0 - 1) * w_trace_sq / (n**2 - 1)


def sym_predictions(sites: int, q: int, tr_h2: float) -> tuple[int, float]:
    """Symmetric-subspace dimension and tr_S(H₀²) closed form (traceless h₀)."""
    if sites < 1 or q < 2:
        raise ValueError("need sites >= 1 and q >= 2")
    dim = math.comb(sites + q - 1, sites)
    tr_sym = sites * (sites + q) * tr_h2 / (q * (q + 1)) * dim
    return dim, tr_sym
