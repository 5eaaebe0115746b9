"""Config-driven experiments: presets, runners, and emitted artifacts.

Every run resolves a JSON-style config, executes deterministically from
its seed, and (optionally) writes results.csv / summary.json / plot.svg
plus per-sample sidecars into an output directory. Verdicts are computed
from tolerances recorded in the config, never hard-coded.
"""
from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .circuits import ChainGeometry, LocalSensingSpec, cue_equivalence_moment, \
    symmetric_subspace_trace_h2, DENSE_DIM_CAP, STATE_DIM_CAP
from .concentration import default_delta_grid, fluctuation_stats, lipschitz_bound, tail_bound
from .ensembles import EnsembleConfig, ScalingFit, fit_scaling, run_ensemble, sff_prediction
from .errors import CapabilityError, ConfigError
from .metrology import SensingSpec, two_block_diag
from .weingarten import (
    AsymptoticPrediction,
    predict_qfi,
    qfi_t1_exact,
    sym_predictions,
    weingarten_table,
)

EXPERIMENT_KINDS = (
    "rmm-time", "rqc-sites", "rqc-time", "sff", "t1-exact",
    "weingarten-dump", "concentration", "cue-equivalence", "symmetric-check",
)

CSV_HEADER = "x,mean,stderr,prediction"


@dataclass
class Curve:
    name: str
    xlabel: str
    x: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray
    prediction: np.ndarray
    samples: np.ndarray | None = None       # (n_samples, len(x))
    bound: np.ndarray | None = None         # hard QFI ceiling per x, where defined
    seed_paths: list = field(default_factory=list)


@dataclass
class Verdict:
    name: str
    passed: bool
    detail: str
    tolerance: float

    def as_dict(self) -> dict:
        return {"name": self.name, "passed": bool(self.passed),
                "detail": self.detail, "tolerance": self.tolerance}


@dataclass
class RunReport:
    kind: str
    config: dict
    curves: list
    fits: dict
    verdicts: list
    extras: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)


# ---------------------------------------------------------------------------
# validation

def _field(cfg: dict, path: str, typ, default=None, required=False):
    node = cfg
    parts = path.split(".")
    for p in parts[:-1]:
        node = node.get(p, {})
        if not isinstance(node, dict):
            raise ConfigError(f"{path}: parent {p!r} is not an object")
    leaf = parts[-1]
    if leaf not in node or node[leaf] is None:
        if required:
            raise ConfigError(f"{path}: required field missing")
        return default
    val = node[leaf]
    try:
        if typ is int and isinstance(val, bool):
            raise TypeError
        return typ(val)
    except (TypeError, ValueError):
        raise ConfigError(f"{path}: expected {typ.__name__}, got {val!r}") from None


def _int_list(cfg: dict, path: str, default=None, required=False) -> list[int]:
    raw = _field(cfg, path, list, default=default, required=required)
    if raw is None:
        return default
    try:
        return [int(v) for v in raw]
    except (TypeError, ValueError):
        raise ConfigError(f"{path}: expected a list of integers") from None


def _protocols(cfg: dict) -> list[str]:
    raw = cfg.get("params", {}).get("protocols", ["control", "state-prep"])
    if isinstance(raw, str):
        raw = [raw]
    for p in raw:
        if p not in ("control", "state-prep"):
            raise ConfigError(f"params.protocols: unknown protocol {p!r}")
    return list(raw)


def validate_config(cfg: dict) -> dict:
    """Resolve defaults and check the config; raises ConfigError with a field path."""
    if not isinstance(cfg, dict) or not cfg:
        raise ConfigError("config: empty or not a JSON object")
    kind = _field(cfg, "experiment", str, required=True)
    if kind not in EXPERIMENT_KINDS:
        raise ConfigError(f"experiment: unknown kind {kind!r}; choose from {EXPERIMENT_KINDS}")
    out = {
        "experiment": kind,
        "seed": _field(cfg, "seed", int, default=0),
        "samples": _field(cfg, "samples", int, default=100),
        "workers": _field(cfg, "workers", int, default=1),
        "params": dict(cfg.get("params", {})),
        "tolerances": dict(cfg.get("tolerances", {})),
    }
    if out["samples"] < 1 and kind not in ("weingarten-dump", "symmetric-check"):
        raise ConfigError("samples: must be >= 1")
    p = out["params"]
    if kind in ("rmm-time", "sff", "t1-exact", "concentration"):
        if kind == "concentration":
            ns = _int_list(cfg, "params.N_list", required=True)
            if any(n < 2 for n in ns):
                raise ConfigError("params.N_list: dimensions must be >= 2")
        else:
            n = _field(cfg, "params.N", int, required=True)
            if n < 2:
                raise ConfigError("params.N: must be >= 2")
    if kind in ("rqc-sites", "rqc-time", "cue-equivalence", "symmetric-check"):
        qs = p.get("q_list") or ([p.get("q")] if p.get("q") else None)
        ls = p.get("L_list") or p.get("Ls") or ([p.get("L")] if p.get("L") else None)
        if kind != "symmetric-check" and (not qs or not ls):
            raise ConfigError("params: rqc experiments need q (or q_list) and L (or Ls)")
        cap = STATE_DIM_CAP if kind in ("rqc-sites", "rqc-time") else DENSE_DIM_CAP
        for q in qs or [2]:
            for L in ls or [1]:
                if int(q) ** int(L) > cap:
                    raise CapabilityError(
                        f"q^L = {int(q)**int(L)} exceeds cap {cap} (q={q}, L={L})")
    if kind == "weingarten-dump":
        t = _field(cfg, "params.t", int, required=True)
        if t < 1:
            raise ConfigError("params.t: must be >= 1")
        _field(cfg, "params.N", int, required=True)
    if kind == "rmm-time" or kind == "rqc-time":
        t_max = _field(cfg, "params.t_max", int, default=10)
        if t_max < 1:
            raise ConfigError("params.t_max: must be >= 1")
        p["t_max"] = t_max
    _protocols(out)
    return out


# ---------------------------------------------------------------------------
# kind runners (each returns curves/fits/verdicts/extras)

def _qfi_bound_curve(ts, delta) -> np.ndarray:
    return np.array([float(t * t) * delta * delta for t in ts])


def _fit_verdict(name, fitval: ScalingFit, target: float, tol: float) -> Verdict:
    rel = abs(fitval.coefficient - target) / abs(target)
    return Verdict(
        name=name,
        passed=rel <= tol,
        detail=f"coefficient {fitval.coefficient:.4g} vs {target:.4g} (rel err {rel:.3f})",
        tolerance=tol,
    )


def _run_rmm_time(cfg: dict):
    p = cfg["params"]
    n = int(p["N"])
    theta = float(p.get("theta", 1.0))
    ts = list(range(1, int(p.get("t_max", 10)) + 1))
    spec = SensingSpec.two_block(n, theta)
    tol = float(cfg["tolerances"].get("fit_rel_err", 0.10))
    curves, fits, verdicts = [], {}, []
    for protocol in _protocols(cfg):
        res = run_ensemble(EnsembleConfig(
            estimator="rmm_qfi",
            params={"N": n, "theta": theta, "ts": ts, "protocol": protocol},
            samples=cfg["samples"], master_seed=cfg["seed"], workers=cfg["workers"]))
        pred = np.array([predict_qfi(
            AsymptoticPrediction(protocol, "rmm", spec.tr_h2, dim=n), t) for t in ts])
        model = "linear-through-origin" if protocol == "control" else "quadratic-through-origin"
        fitval = fit_scaling(ts, res.mean, model)
        target = 4.0 * spec.tr_h2 / n
        curves.append(Curve(protocol, "t", np.array(ts, float), res.mean, res.stderr,
                            pred, res.values, _qfi_bound_curve(ts, spec.delta),
                            res.seed_paths))
        fits[protocol] = fitval
        verdicts.append(_fit_verdict(f"{protocol}-fit", fitval, target, tol))
    return curves, fits, verdicts, {}


def _rqc_local(p, q) -> LocalSensingSpec:
    theta = float(p.get("theta", 1.0))
    if p.get("h_diag") is not None:
        return LocalSensingSpec(np.asarray(p["h_diag"], float), theta)
    return LocalSensingSpec.two_block(q, theta)


def _run_rqc_sites(cfg: dict):
    p = cfg["params"]
    q = int(p["q"])
    t = int(p.get("t", 2))
    ls = [int(x) for x in (p.get("Ls") or p.get("L_list"))]
    local = _rqc_local(p, q)
    state = p.get("state", "product")
    tol = float(cfg["tolerances"].get("slope_rel_err", 0.15))
    resid_frac = cfg["tolerances"].get("resid_frac")
    curves, fits, verdicts = [], {}, []
    for protocol in _protocols(cfg):
        res = run_ensemble(EnsembleConfig(
            estimator="rqc_qfi_sites",
            params={"q": q, "t": t, "Ls": ls, "theta": local.theta, "state": state,
                    "protocol": protocol, "schedule": p.get("schedule", "auto"),
                    "h_diag": p.get("h_diag")},
            samples=cfg["samples"], master_seed=cfg["seed"], workers=cfg["workers"]))
        pred = np.array([predict_qfi(
            AsymptoticPrediction(protocol, "rqc", local.tr_h2, q=q, sites=L), t)
            for L in ls])
        fitval = fit_scaling(ls, res.mean, "linear-through-origin")
        tpow = t if protocol == "control" else t * t
        target = 4.0 * local.tr_h2 * tpow / q
        bound = np.array([float(t * t) * (L * local.delta) ** 2 for L in ls])
        curves.append(Curve(protocol, "L", np.array(ls, float), res.mean, res.stderr,
                            pred, res.values, bound, res.seed_paths))
        fits[protocol] = fitval
        if resid_frac is not None:
            rel = fitval.residual_rms / float(res.mean.max())
            verdicts.append(Verdict(f"{protocol}-residual", rel <= float(resid_frac),
                                    f"residual RMS fraction {rel:.3f}", float(resid_frac)))
        else:
            verdicts.append(_fit_verdict(f"{protocol}-slope", fitval, target, tol))
    return curves, fits, verdicts, {}


def _run_rqc_time(cfg: dict):
    p = cfg["params"]
    q, L = int(p["q"]), int(p["L"])
    ts = list(range(1, int(p.get("t_max", 10)) + 1))
    local = _rqc_local(p, q)
    state = p.get("state", "product")
    mode = p.get("verdict", "fit-residual")
    curves, fits, verdicts = [], {}, []
    for protocol in _protocols(cfg):
        res = run_ensemble(EnsembleConfig(
            estimator="rqc_qfi",
            params={"q": q, "L": L, "ts": ts, "theta": local.theta, "state": state,
                    "protocol": protocol, "schedule": p.get("schedule", "auto"),
                    "h_diag": p.get("h_diag")},
            samples=cfg["samples"], master_seed=cfg["seed"], workers=cfg["workers"]))
        pred = np.array([predict_qfi(
            AsymptoticPrediction(protocol, "rqc", local.tr_h2, q=q, sites=L), t)
            for t in ts])
        bound = np.array([float(t * t) * (L * local.delta) ** 2 for t in ts])
        curves.append(Curve(protocol, "t", np.array(ts, float), res.mean, res.stderr,
                            pred, res.values, bound, res.seed_paths))
        model = "linear-through-origin" if protocol == "control" else "quadratic-through-origin"
        fitval = fit_scaling(ts, res.mean, model)
        fits[protocol] = fitval
        if mode == "fit-residual":
            frac = float(cfg["tolerances"].get("resid_frac", 0.10))
            rel = fitval.residual_rms / float(res.mean.max())
            verdicts.append(Verdict(f"{protocol}-residual", rel <= frac,
                                    f"residual RMS fraction {rel:.3f}", frac))
        elif mode == "envelope":
            slack = float(cfg["tolerances"].get("envelope_slack", 0.15))
            base = float(res.mean[0])
            lo = base * np.array(ts, float) * (1.0 - slack)
            hi = base * np.array(ts, float) ** 2 * (1.0 + slack)
            ok = bool(np.all(res.mean >= lo) and np.all(res.mean <= hi))
            verdicts.append(Verdict(
                f"{protocol}-envelope", ok,
                "curve stays between the linear and quadratic envelopes anchored at t=1",
                slack))
        else:
            raise ConfigError(f"params.verdict: unknown mode {mode!r}")
    return curves, fits, verdicts, {}


def _run_sff(cfg: dict):
    p = cfg["params"]
    n = int(p["N"])
    theta = float(p.get("theta", 1.0))
    ts = [int(t) for t in p.get("ts", range(1, 6))]
    protocol = p.get("protocol", "control")
    spec = SensingSpec.two_block(n, theta)
    res = run_ensemble(EnsembleConfig(
        estimator="sff",
        params={"N": n, "theta": theta, "ts": ts, "protocol": protocol},
        samples=cfg["samples"], master_seed=cfg["seed"], workers=cfg["workers"]))
    pred = sff_prediction(protocol, spec, ts)
    se_mult = float(cfg["tolerances"].get("se_mult", 3.0))
    rel_slack = float(cfg["tolerances"].get("rel_slack", 0.0))
    gaps = np.abs(res.mean - pred)
    allowed = np.maximum(se_mult * res.stderr, rel_slack * np.abs(pred))
    ok = bool(np.all(gaps <= allowed))
    worst = int(np.argmax(gaps - allowed))
    verdict = Verdict(
        f"{protocol}-moment", ok,
        f"worst point t={ts[worst]}: |gap| {gaps[worst]:.4g} vs allowed {allowed[worst]:.4g}",
        se_mult)
    curve = Curve(protocol, "t", np.array(ts, float), res.mean, res.stderr, pred,
                  res.values, None, res.seed_paths)
    return [curve], {}, [verdict], {}


def _run_t1_exact(cfg: dict):
    p = cfg["params"]
    n = int(p["N"])
    h = np.asarray(p.get("h_diag", two_block_diag(n)), dtype=float)
    res = run_ensemble(EnsembleConfig(
        estimator="rmm_qfi",
        params={"N": n, "theta": float(p.get("theta", 1.0)), "ts": [1],
                "protocol": "control", "h_diag": h.tolist()},
        samples=cfg["samples"], master_seed=cfg["seed"], workers=cfg["workers"]))
    exact = qfi_t1_exact(n, float(h.sum()), float((h**2).sum()))
    se_mult = float(cfg["tolerances"].get("se_mult", 3.0))
    gap = abs(float(res.mean[0]) - exact)
    ok = gap <= se_mult * float(res.stderr[0])
    verdict = Verdict("t1-exact", ok,
                      f"mean {res.mean[0]:.5g} vs exact {exact:.5g} "
                      f"(gap {gap:.4g}, SE {res.stderr[0]:.4g})", se_mult)
    delta = float(h.max() - h.min())
    curve = Curve("control", "t", np.array([1.0]), res.mean, res.stderr,
                  np.array([exact]), res.values, np.array([delta**2]), res.seed_paths)
    return [curve], {}, [verdict], {}


def _run_weingarten_dump(cfg: dict):
    p = cfg["params"]
    t, n = int(p["t"]), int(p["N"])
    table = weingarten_table(t, n)
    entries = table.entries()
    x = np.arange(len(entries), dtype=float)
    vals = np.array([float(v) for _, v in entries])
    if t == 1 and n >= 1:
        pred = np.array([1.0 / n])
    elif t == 2 and n >= 2:
        ref = {(1, 1): 1.0 / (n**2 - 1), (2,): -1.0 / (n * (n**2 - 1))}
        pred = np.array([ref[ct] for ct, _ in entries])
    else:
        pred = vals.copy()
    ok = bool(np.allclose(vals, pred, rtol=0, atol=1e-12))
    verdict = Verdict("table-closed-form", ok,
                      f"{len(entries)} entries, exact={table.exact}", 1e-12)
    curve = Curve("weingarten", "entry", x, vals, np.zeros_like(vals), pred)
    return [curve], {}, [verdict], {"weingarten": table.to_json_dict()}


def _run_concentration(cfg: dict):
    p = cfg["params"]
    ns = [int(n) for n in p["N_list"]]
    t = int(p.get("t", 2))
    theta = float(p.get("theta", 1.0))
    protocol = p.get("protocol", "control")
    points = int(p.get("delta_points", 20))
    means, stderrs, rel_stds, tails_tables, all_values = [], [], [], {}, []
    for j, n in enumerate(ns):
        res = run_ensemble(EnsembleConfig(
            estimator="rmm_qfi",
            params={"N": n, "theta": theta, "ts": [t], "protocol": protocol},
            samples=cfg["samples"], master_seed=cfg["seed"] + j, workers=cfg["workers"]))
        vals = res.values[:, 0]
        stats = fluctuation_stats(vals, default_delta_grid(float(vals.mean()), points))
        spec = SensingSpec.two_block(n, theta)
        lip = lipschitz_bound(protocol, "rmm", t, spec.delta)
        raw = np.array([tail_bound(n, d, lip) for d in stats.deltas])
        tails_tables[n] = {
            "delta": stats.deltas, "empirical_tail": stats.tail_fractions,
            "bound_raw": raw, "bound_clamped": np.minimum(raw, 1.0),
        }
        means.append(stats.mean)
        stderrs.append(stats.stderr)
        rel_stds.append(stats.relative_std)
        all_values.append(vals)
    tol_verdicts = []
    for n in ns:
        tt = tails_tables[n]
        ok = bool(np.all(tt["empirical_tail"] <= tt["bound_clamped"] + 1e-12))
        tol_verdicts.append(Verdict(f"tail-bound-N{n}", ok,
                                    "empirical tail within the clamped bound", 0.0))
    dec = all(rel_stds[i + 1] < rel_stds[i] for i in range(len(ns) - 1))
    tol_verdicts.append(Verdict(
        "relative-std-decreasing", dec,
        "rel std " + " > ".join(f"{r:.4f}" for r in rel_stds), 0.0))
    pred = np.array([predict_qfi(
        AsymptoticPrediction(protocol, "rmm", float(SensingSpec.two_block(n, theta).tr_h2),
                             dim=n), t) for n in ns])
    samples_mat = np.column_stack(all_values)
    bounds = np.array([float(t * t) * SensingSpec.two_block(n, theta).delta ** 2
                       for n in ns])
    curve = Curve(protocol, "N", np.array(ns, float), np.array(means),
                  np.array(stderrs), pred, samples_mat, bounds)
    return [curve], {}, tol_verdicts, {"tails": tails_tables}


def _run_cue_equivalence(cfg: dict):
    p = cfg["params"]
    L = int(p.get("L", 2))
    qs = [int(q) for q in p["q_list"]]
    t = int(p.get("t", 2))
    theta = float(p.get("theta", 1.0))
    per_q = p.get("samples_per_q") or [cfg["samples"]] * len(qs)
    means, stderrs, preds, gaps, per_point = [], [], [], [], []
    for j, (q, n_samples) in enumerate(zip(qs, per_q)):
        local = LocalSensingSpec.two_block(q, theta)
        res = run_ensemble(EnsembleConfig(
            estimator="rqc_qfi",
            params={"q": q, "L": L, "ts": [t], "theta": theta,
                    "state": "product", "protocol": "control"},
            samples=int(n_samples), master_seed=cfg["seed"] + j, workers=cfg["workers"]))
        pred = predict_qfi(AsymptoticPrediction("control", "rqc", local.tr_h2,
                                                q=q, sites=L), t)
        means.append(float(res.mean[0]))
        stderrs.append(float(res.stderr[0]))
        preds.append(pred)
        gaps.append(abs(means[-1] - pred) / pred)
        per_point.append({"q": q, "samples": res.values[:, 0],
                          "bound": float(t * t) * (L * local.delta) ** 2})
    mono = all(gaps[i + 1] < gaps[i] for i in range(len(qs) - 1))
    verdict = Verdict("gap-monotone-in-q", mono,
                      "relative gaps " + " > ".join(f"{g:.4f}" for g in gaps), 0.0)
    curve = Curve("control", "q", np.array(qs, float), np.array(means),
                  np.array(stderrs), np.array(preds))
    return [curve], {}, [verdict], {"relative_gaps": gaps, "per_point": per_point}


def _run_symmetric_check(cfg: dict):
    p = cfg["params"]
    ls = [int(x) for x in p.get("L_list", [1, 2, 3, 4])]
    qs = [int(x) for x in p.get("q_list", [2, 3, 4])]
    tol = float(cfg["tolerances"].get("abs_err", 1e-9))
    theta = float(p.get("theta", 1.0))
    xs, got, want = [], [], []
    for L in ls:
        for q in qs:
            local = LocalSensingSpec.two_block(q, theta)
            geom = ChainGeometry(L, q)
            got.append(symmetric_subspace_trace_h2(geom, local))
            want.append(sym_predictions(L, q, local.tr_h2)[1])
            xs.append(len(xs))
    got, want = np.array(got), np.array(want)
    worst = float(np.max(np.abs(got - want)))
    verdict = Verdict("projector-vs-closed-form", worst <= tol,
                      f"max |projector − closed form| = {worst:.3e}", tol)
    curve = Curve("sym-trace", "case", np.array(xs, float), got,
                  np.zeros_like(got), want)
    return [curve], {}, [verdict], {"cases": [
        {"L": L, "q": q} for L in ls for q in qs]}


_RUNNERS = {
    "rmm-time": _run_rmm_time,
    "rqc-sites": _run_rqc_sites,
    "rqc-time": _run_rqc_time,
    "sff": _run_sff,
    "t1-exact": _run_t1_exact,
    "weingarten-dump": _run_weingarten_dump,
    "concentration": _run_concentration,
    "cue-equivalence": _run_cue_equivalence,
    "symmetric-check": _run_symmetric_check,
}


# ---------------------------------------------------------------------------
# artifact emission

def _fmt(v: float) -> str:
    return repr(float(v))


def _write_curve_csv(path: Path, curve: Curve):
    lines = [CSV_HEADER]
    for j in range(curve.x.size):
        lines.append(",".join([
            _fmt(curve.x[j]), _fmt(curve.mean[j]), _fmt(curve.stderr[j]),
            _fmt(curve.prediction[j]),
        ]))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_samples_csv(path: Path, curve: Curve):
    if curve.samples is None:
        return
    cols = ",".join(f"v{j}" for j in range(curve.samples.shape[1]))
    lines = [f"sample,seed_path,{cols}"]
    for i in range(curve.samples.shape[0]):
        seed = curve.seed_paths[i] if i < len(curve.seed_paths) else ""
        lines.append(f"{i},{seed}," + ",".join(_fmt(v) for v in curve.samples[i]))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_report(report: RunReport, out_dir) -> dict:
    """Emit results CSVs, sidecars, summary.json and plot.svg; returns file map."""
    from .svgplot import emit_svg

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = {}
    for i, curve in enumerate(report.curves):
        name = "results.csv" if i == 0 else f"results_{curve.name}.csv"
        _write_curve_csv(out / name, curve)
        files[name] = curve.name
        if curve.samples is not None:
            sname = f"samples_{curve.name}.csv"
            _write_samples_csv(out / sname, curve)
            files[sname] = curve.name

    for n, table in report.extras.get("tails", {}).items():
        lines = ["delta,empirical_tail,bound_raw,bound_clamped"]
        for j in range(len(table["delta"])):
            lines.append(",".join(_fmt(table[k][j]) for k in
                                  ("delta", "empirical_tail", "bound_raw", "bound_clamped")))
        tname = f"tails_N{n}.csv"
        (out / tname).write_text("\n".join(lines) + "\n", encoding="utf-8")
        files[tname] = f"N={n}"

    if "weingarten" in report.extras:
        (out / "weingarten.json").write_text(
            json.dumps(report.extras["weingarten"], indent=2) + "\n", encoding="utf-8")
        files["weingarten.json"] = "table"

    plot_curves = []
    for curve in report.curves:
        plot_curves.append({"x": curve.x, "y": curve.mean, "yerr": curve.stderr,
                            "label": curve.name, "style": "data"})
        plot_curves.append({"x": curve.x, "y": curve.prediction,
                            "label": f"{curve.name} prediction", "style": "prediction"})
    for name, fitval in report.fits.items():
        curve = next(c for c in report.curves if c.name == name)
        if fitval.model == "linear-through-origin":
            fy = fitval.coefficient * curve.x
        elif fitval.model == "quadratic-through-origin":
            fy = fitval.coefficient * curve.x**2
        else:
            fy = fitval.coefficients[0] * curve.x + fitval.coefficients[1]
        plot_curves.append({"x": curve.x, "y": fy, "label": f"{name} fit", "style": "fit"})
    logy = bool(report.config.get("params", {}).get("log_scale", False))
    emit_svg(plot_curves, out / "plot.svg",
             title=report.kind, xlabel=report.curves[0].xlabel, ylabel="value",
             logy=logy)
    files["plot.svg"] = "plot"

    summary = {
        "experiment": report.kind,
        "config": report.config,
        "verdicts": [v.as_dict() for v in report.verdicts],
        "passed": report.passed,
        "fits": {k: {"model": f.model, "coefficients": list(f.coefficients),
                     "stderr": f.stderr, "residual_rms": f.residual_rms}
                 for k, f in report.fits.items()},
        "curves": {c.name: {"xlabel": c.xlabel, "x": c.x.tolist(),
                            "mean": c.mean.tolist(), "stderr": c.stderr.tolist(),
                            "prediction": c.prediction.tolist()}
                   for c in report.curves},
        "timings": report.timings,
        "files": files,
    }
    if "desk_scale_note" in report.config.get("params", {}):
        summary["desk_scale_note"] = report.config["params"]["desk_scale_note"]
    if "relative_gaps" in report.extras:
        summary["relative_gaps"] = report.extras["relative_gaps"]
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n",
                                      encoding="utf-8")
    files["summary.json"] = "summary"
    return files


def run_experiment(cfg: dict, out_dir=None, *, seed=None, samples=None,
                   workers=None) -> RunReport:
    """Validate, run, and (if out_dir is given) write artifacts."""
    cfg = dict(cfg)
    if seed is not None:
        cfg["seed"] = int(seed)
    if samples is not None:
        cfg["samples"] = int(samples)
    if workers is not None:
        cfg["workers"] = int(workers)
    resolved = validate_config(cfg)
    start = time.monotonic()
    curves, fits, verdicts, extras = _RUNNERS[resolved["experiment"]](resolved)
    report = RunReport(resolved["experiment"], resolved, curves, fits, verdicts,
                       extras, {"total_s": round(time.monotonic() - start, 3)})
    if out_dir is not None:
        write_report(report, out_dir)
    return report


def load_config(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"config file: {exc}") from exc
    if not text.strip():
        raise ConfigError("config: file is empty")
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON ({exc})") from exc
    return cfg


# ---------------------------------------------------------------------------
# presets: one per reproduced figure or identity

PRESETS: dict[str, dict] = {
    "rmm-time": {
        "experiment": "rmm-time", "seed": 11001, "samples": 100,
        "params": {"N": 100, "theta": 1.0, "t_max": 10,
                   "protocols": ["control", "state-prep"]},
        "tolerances": {"fit_rel_err": 0.10},
    },
    "t1-exact": {
        "experiment": "t1-exact", "seed": 11002, "samples": 20000,
        "params": {"N": 4, "h_diag": [1, 1, -1, -1], "theta": 1.0},
        "tolerances": {"se_mult": 3.0},
    },
    "rqc-sites-product": {
        "experiment": "rqc-sites", "seed": 11003, "samples": 100,
        "params": {"q": 4, "t": 2, "Ls": [2, 3, 4, 5], "theta": 1.0,
                   "state": "product", "schedule": "auto",
                   "protocols": ["control", "state-prep"],
                   "desk_scale_note": "odd chain lengths use the generic staircase "
                                      "layout (brickwork needs even L); sizes are "
                                      "capped by the state-vector limit q^L <= 2^24"},
        "tolerances": {"slope_rel_err": 0.15},
    },
    "rqc-sites-ghz": {
        "experiment": "rqc-sites", "seed": 11004, "samples": 100,
        "params": {"q": 4, "t": 2, "Ls": [2, 3, 4, 5], "theta": 1.0,
                   "state": "ghz", "schedule": "auto",
                   "protocols": ["control", "state-prep"]},
        "tolerances": {"slope_rel_err": 0.15},
    },
    "rqc-small-q-sites": {
        "experiment": "rqc-sites", "seed": 11005, "samples": 200,
        "params": {"q": 2, "t": 2, "Ls": [4, 6, 8], "theta": 1.0,
                   "state": "product", "schedule": "auto",
                   "protocols": ["control", "state-prep"]},
        "tolerances": {"resid_frac": 0.15},
    },
    "rqc-time-product": {
        "experiment": "rqc-time", "seed": 11006, "samples": 100,
        "params": {"q": 2, "L": 8, "t_max": 10, "theta": 1.0, "state": "product",
                   "protocols": ["control", "state-prep"]},
        "tolerances": {"resid_frac": 0.10},
    },
    "rqc-time-ghz": {
        "experiment": "rqc-time", "seed": 11007, "samples": 100,
        "params": {"q": 2, "L": 8, "t_max": 10, "theta": 1.0, "state": "ghz",
                   "protocols": ["control", "state-prep"]},
        "tolerances": {"resid_frac": 0.10},
    },
    "rqc-small-Lq-time": {
        "experiment": "rqc-time", "seed": 11008, "samples": 200,
        "params": {"q": 2, "L": 4, "t_max": 30, "theta": 1.0, "state": "product",
                   "protocols": ["control"], "verdict": "envelope",
                   "desk_scale_note": "reduced from the long-time study "
                                      "(t <= 30, 200 runs); asserts only the "
                                      "envelope property"},
        "tolerances": {"envelope_slack": 0.15},
    },
    "sff-ctr": {
        "experiment": "sff", "seed": 21009, "samples": 10000,
        "params": {"N": 50, "theta": 1.0, "ts": [1, 2, 3, 4, 5],
                   "protocol": "control"},
        "tolerances": {"se_mult": 3.0, "rel_slack": 0.0},
    },
    "sff-sp": {
        "experiment": "sff", "seed": 11010, "samples": 4000,
        "params": {"N": 100, "theta": 1.0, "ts": [1, 2, 3, 4, 5],
                   "protocol": "state-prep"},
        "tolerances": {"se_mult": 3.0, "rel_slack": 0.05},
    },
    "concentration-rmm": {
        "experiment": "concentration", "seed": 11011, "samples": 300,
        "params": {"N_list": [100, 400], "t": 2, "theta": 1.0,
                   "protocol": "control", "delta_points": 20},
    },
    "cue-equivalence": {
        "experiment": "cue-equivalence", "seed": 11012, "samples": 400,
        "params": {"L": 2, "q_list": [2, 4, 8], "t": 2, "theta": 1.0,
                   "samples_per_q": [4000, 1200, 400]},
    },
    "symmetric-check": {
        "experiment": "symmetric-check", "seed": 11013, "samples": 1,
        "params": {"L_list": [1, 2, 3, 4], "q_list": [2, 3, 4], "theta": 1.0},
        "tolerances": {"abs_err": 1e-9},
    },
}


def preset_config(name: str) -> dict:
    try:
        return json.loads(json.dumps(PRESETS[name]))
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; see `qfi list-presets`") from None
