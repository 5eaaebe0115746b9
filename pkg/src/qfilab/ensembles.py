"""Deterministic Monte Carlo ensembles and scaling-law fits.

Each sample's value vector is a pure function of (estimator, params,
sample seed path); results land in pre-indexed slots and are reduced
after the fact, so the output is bit-identical for any worker count.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .circuits import (
    Brickwork,
    ChainGeometry,
    LocalSensingSpec,
    SigmaConfig,
    build_floquet,
    global_sensing_spec,
    make_state,
    sample_gate_set,
    staircase_sigma,
)
from .errors import FitError
from .haar import SeedPath, derive_subseed, sample_cue
from .metrology import SensingSpec, qfi_recursion_curve
from .weingarten import k_analytics


@dataclass(frozen=True)
class EnsembleConfig:
    estimator: str
    params: Mapping
    samples: int
    master_seed: int
    workers: int = 1


@dataclass
class EnsembleResult:
    config: EnsembleConfig
    values: np.ndarray          # (samples, k)
    seed_paths: list[str] = field(default_factory=list)

    @property
    def mean(self) -> np.ndarray:
        return self.values.mean(axis=0)

    @property
    def stderr(self) -> np.ndarray:
        n = self.values.shape[0]
        if n < 2:
            return np.zeros(self.values.shape[1])
        return self.values.std(axis=0, ddof=1) / math.sqrt(n)

    def summary_dict(self) -> dict:
        return {
            "estimator": self.config.estimator,
            "params": dict(self.config.params),
            "samples": self.config.samples,
            "master_seed": self.config.master_seed,
            "mean": self.mean.tolist(),
            "stderr": self.stderr.tolist(),
        }


Estimator = Callable[[Mapping, SeedPath], np.ndarray]
ESTIMATORS: dict[str, Estimator] = {}


def register_estimator(name: str):
    def deco(fn: Estimator) -> Estimator:
        ESTIMATORS[name] = fn
        return fn
    return deco


def run_ensemble(cfg: EnsembleConfig) -> EnsembleResult:
    """Evaluate the estimator on `samples` independent seed paths."""
    if cfg.samples < 1:
        raise ValueError("need at least 1 sample")
    try:
        estimator = ESTIMATORS[cfg.estimator]
    except KeyError:
        raise KeyError(f"unknown estimator {cfg.estimator!r}; "
                       f"known: {sorted(ESTIMATORS)}") from None
    root = SeedPath(cfg.master_seed)
    paths = [derive_subseed(root, i) for i in range(cfg.samples)]

    def one(i: int) -> np.ndarray:
        try:
            return np.atleast_1d(np.asarray(estimator(cfg.params, paths[i]), dtype=float))
        except Exception as exc:
            raise RuntimeError(
                f"estimator {cfg.estimator!r} failed on sample {i} (seed {paths[i]}): {exc}"
            ) from exc

    first = one(0)
    values = np.empty((cfg.samples, first.size))
    values[0] = first
    rest = range(1, cfg.samples)
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            for i, val in zip(rest, pool.map(one, rest)):
                values[i] = val
    else:
        for i in rest:
            values[i] = one(i)
    return EnsembleResult(cfg, values, [str(p) for p in paths])


# ---------------------------------------------------------------------------
# estimators

def _resolve_sensing(params, n) -> SensingSpec:
    theta = float(params.get("theta", 1.0))
    h = params.get("h_diag")
    if h is None:
        return SensingSpec.two_block(n, theta)
    return SensingSpec(np.asarray(h, dtype=float), theta)


def _initial_state_rmm(params, n) -> np.ndarray:
    kind = params.get("init", "basis0")
    if kind == "basis0":
        psi = np.zeros(n, dtype=complex)
        psi[0] = 1.0
        return psi
    if kind == "basis1":
        psi = np.zeros(n, dtype=complex)
        psi[1] = 1.0
        return psi
    psi = np.asarray(kind, dtype=complex)
    return psi / np.linalg.norm(psi)


@register_estimator("rmm_qfi")
def rmm_qfi_estimator(params, seed: SeedPath) -> np.ndarray:
    """QFI curve over ts for one global Haar realization."""
    n = int(params["N"])
    ts = [int(t) for t in params["ts"]]
    spec = _resolve_sensing(params, n)
    psi0 = _initial_state_rmm(params, n)
    u = sample_cue(n, seed.child(0))
    curve = qfi_recursion_curve(params.get("protocol", "control"),
                                lambda v: u @ v, spec, max(ts), psi0)
    return curve[np.asarray(ts) - 1]


def _resolve_local(params, q) -> LocalSensingSpec:
    theta = float(params.get("theta", 1.0))
    h = params.get("h_diag")
    if h is None:
        return LocalSensingSpec.two_block(q, theta)
    return LocalSensingSpec(np.asarray(h, dtype=float), theta)


def _schedule_for(geom: ChainGeometry, params):
    name = params.get("schedule", "auto")
    if name == "auto":
        return Brickwork() if geom.sites % 2 == 0 else staircase_sigma(geom.sites)
    if name == "brickwork":
        return Brickwork()
    if name == "sigma":
        if "sigma" in params:
            return SigmaConfig(tuple(params["sigma"]))
        return staircase_sigma(geom.sites)
    raise ValueError(f"unknown schedule {name!r}")


@register_estimator("rqc_qfi")
def rqc_qfi_estimator(params, seed: SeedPath) -> np.ndarray:
    """QFI curve over ts for one circuit realization at fixed (L, q)."""
    geom = ChainGeometry(int(params["L"]), int(params["q"]))
    ts = [int(t) for t in params["ts"]]
    local = _resolve_local(params, geom.q)
    psi0 = make_state(params.get("state", "product"), geom)
    gates = sample_gate_set(geom, seed)
    applier = build_floquet(geom, _schedule_for(geom, params), gates, mode="applier")
    spec = global_sensing_spec(geom, local)
    curve = qfi_recursion_curve(params.get("protocol", "control"),
                                applier, spec, max(ts), psi0)
    return curve[np.asarray(ts) - 1]


@register_estimator("rqc_qfi_sites")
def rqc_qfi_sites_estimator(params, seed: SeedPath) -> np.ndarray:
    """QFI at fixed t across a grid of chain lengths (independent gates per L)."""
    q = int(params["q"])
    t = int(params["t"])
    ls = [int(x) for x in params["Ls"]]
    out = np.empty(len(ls))
    for j, L in enumerate(ls):
        geom = ChainGeometry(L, q)
        local = _resolve_local(params, q)
        psi0 = make_state(params.get("state", "product"), geom)
        gates = sample_gate_set(geom, seed.child(j))
        applier = build_floquet(geom, _schedule_for(geom, params), gates, mode="applier")
        spec = global_sensing_spec(geom, local)
        out[j] = qfi_recursion_curve(params.get("protocol", "control"),
                                     applier, spec, t, psi0)[-1]
    return out


@register_estimator("sff")
def sff_estimator(params, seed: SeedPath) -> np.ndarray:
    """|Tr 𝒰(t)|² over ts for one realization, 𝒰 = (WU)ᵗ or WᵗUᵗ."""
    n = int(params["N"])
    ts = [int(t) for t in params["ts"]]
    protocol = params.get("protocol", "control")
    spec = _resolve_sensing(params, n)
    u = sample_cue(n, seed.child(0))
    w = spec.phases()
    out = np.empty(len(ts))
    t_max = max(ts)
    lookup = {t: j for j, t in enumerate(ts)}
    if protocol == "control":
        m = w[:, None] * u
        p = np.eye(n, dtype=complex)
        for t in range(1, t_max + 1):
            p = m @ p
            if t in lookup:
                out[lookup[t]] = abs(np.trace(p)) ** 2
    else:
        p = np.eye(n, dtype=complex)
        wt = np.ones(n, dtype=complex)
        for t in range(1, t_max + 1):
            p = u @ p
            wt = wt * w
            if t in lookup:
                out[lookup[t]] = abs(np.sum(wt * np.diagonal(p))) ** 2
    return out


@register_estimator("rqc_trace_moment")
def rqc_trace_moment_estimator(params, seed: SeedPath) -> np.ndarray:
    """|Tr U_F^t|² for one brickwork realization (dense)."""
    geom = ChainGeometry(int(params["L"]), int(params["q"]))
    t = int(params["t"])
    gates = sample_gate_set(geom, seed)
    uf = build_floquet(geom, Brickwork(), gates, mode="dense")
    return np.array([abs(np.trace(np.linalg.matrix_power(uf, t))) ** 2])


# ---------------------------------------------------------------------------
# scaling fits

FIT_MODELS = ("linear-through-origin", "quadratic-through-origin", "affine")
_ALIASES = {"linear": "linear-through-origin", "quadratic": "quadratic-through-origin"}


@dataclass(frozen=True)
class ScalingFit:
    model: str
    coefficients: tuple[float, ...]   # leading coefficient first
    stderr: float                     # standard error of the leading coefficient
    residual_rms: float

    @property
    def coefficient(self) -> float:
        return self.coefficients[0]


def fit_scaling(xs, ys, model: str) -> ScalingFit:
    """Least squares y ≈ a·x, a·x², or a·x + b."""
    model = _ALIASES.get(model, model)
    if model not in FIT_MODELS:
        raise FitError(f"unknown fit model {model!r}")
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.size != y.size or x.size < 2:
        raise FitError("need at least 2 matching points")
    if np.unique(x).size != x.size:
        raise FitError("x values must be distinct")

    if model == "affine":
        design = np.column_stack([x, np.ones_like(x)])
    else:
        w = x if model == "linear-through-origin" else x * x
        design = w[:, None]
    gram = design.T @ design
    if np.linalg.matrix_rank(gram) < design.shape[1]:
        raise FitError("degenerate design matrix")
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    dof = max(x.size - design.shape[1], 1)
    s2 = float(resid @ resid) / dof
    cov = s2 * np.linalg.inv(gram)
    return ScalingFit(
        model=model,
        coefficients=tuple(float(c) for c in coef),
        stderr=float(np.sqrt(cov[0, 0])),
        residual_rms=float(np.sqrt(np.mean(resid**2))),
    )


def sff_prediction(protocol: str, spec: SensingSpec, ts) -> np.ndarray:
    """Leading-order K-curve for a sensing gate W built from `spec`."""
    n = spec.dim
    w = spec.phases()
    out = np.empty(len(ts))
    for j, t in enumerate(ts):
        wt_trace_sq = abs(np.sum(w**t)) ** 2
        k_ctr, k_sp = k_analytics(int(t), wt_trace_sq, n)
        out[j] = k_ctr if protocol == "control" else k_sp
    return out
