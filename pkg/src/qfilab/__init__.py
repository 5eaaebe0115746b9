"""Numerical laboratory for QFI scaling laws in chaotic Floquet dynamics."""

from .circuits import (
    Brickwork,
    ChainGeometry,
    LocalSensingSpec,
    SigmaConfig,
    build_floquet,
    cue_equivalence_moment,
    global_sensing_hamiltonian,
    make_state,
    qfi_rqc,
    sample_gate_set,
    staircase_sigma,
    symmetric_projector,
    symmetric_subspace_trace_h2,
)
from .concentration import fluctuation_stats, lipschitz_bound, tail_bound
from .ensembles import EnsembleConfig, ScalingFit, fit_scaling, run_ensemble
from .errors import CapabilityError, ConfigError, FitError, NumericsError
from .haar import SeedPath, derive_subseed, sample_cue, sample_cue_batch
from .linalg import apply_two_site_gate, kron, sensing_gate
from .metrology import (
    Protocol,
    SensingSpec,
    metrological_generator,
    qfi_operator,
    qfi_state_recursion,
    qfi_upper_bound,
)
from .weingarten import (
    U,
    UDAG,
    AsymptoticPrediction,
    TraceProductSpec,
    average_trace_product,
    cycle_type,
    k_analytics,
    predict_qfi,
    qfi_t1_exact,
    sym_predictions,
    weingarten_table,
)
from .experiments import PRESETS, preset_config, run_experiment

__all__ = [
    "AsymptoticPrediction", "Brickwork", "CapabilityError", "ChainGeometry",
    "ConfigError", "EnsembleConfig", "FitError", "LocalSensingSpec",
    "NumericsError", "PRESETS", "Protocol", "ScalingFit", "SeedPath",
    "SensingSpec", "SigmaConfig", "TraceProductSpec", "U", "UDAG",
    "apply_two_site_gate", "average_trace_product", "build_floquet",
    "cue_equivalence_moment", "cycle_type", "derive_subseed", "fit_scaling",
    "fluctuation_stats", "global_sensing_hamiltonian", "k_analytics", "kron",
    "lipschitz_bound", "make_state", "metrological_generator", "predict_qfi",
    "preset_config", "qfi_operator", "qfi_rqc", "qfi_state_recursion",
    "qfi_t1_exact", "qfi_upper_bound", "run_ensemble", "run_experiment",
    "sample_cue", "sample_cue_batch", "sample_gate_set", "sensing_gate",
    "staircase_sigma", "sym_predictions", "symmetric_projector",
    "symmetric_subspace_trace_h2", "tail_bound", "weingarten_table",
]

__version__ = "0.1.0"
