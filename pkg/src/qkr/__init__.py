"""Atom-optics delta-kicked rotor with Loschmidt time-reversal pulse trains."""

__version__ = "0.1.0"

from .core import (
    DEFAULT_N_MAX,
    AliasingError,
    PhysicalParams,
    QuantumState,
    apply_kick,
    dense_step_oracle,
    fidelity,
    free_evolve,
    kick_strength,
    kinetic_energy,
    plane_wave,
    rabi_frequency,
    recoil_frequency,
    scaled_period,
)
from .ensemble import (
    AnalysisError,
    AnalysisResult,
    InitialEnsemble,
    MomentumDistribution,
    ResolutionWarning,
    analyze_distribution,
    calibrated_resolution,
    convolve_resolution,
    ensemble_distribution,
    fwhm_central_peak,
    normalize_W,
    order_heights,
    p0_fraction,
)
from .sequences import (
    Drift,
    Kick,
    PulseTrain,
    Trajectory,
    loschmidt_train,
    periodic_train,
    run,
)

__all__ = [
    "DEFAULT_N_MAX",
    "AliasingError",
    "AnalysisError",
    "AnalysisResult",
    "Drift",
    "InitialEnsemble",
    "Kick",
    "MomentumDistribution",
    "PhysicalParams",
    "PulseTrain",
    "QuantumState",
    "ResolutionWarning",
    "Trajectory",
    "analyze_distribution",
    "apply_kick",
    "calibrated_resolution",
    "convolve_resolution",
    "dense_step_oracle",
    "ensemble_distribution",
    "fidelity",
    "free_evolve",
    "fwhm_central_peak",
    "kick_strength",
    "kinetic_energy",
    "loschmidt_train",
    "normalize_W",
    "order_heights",
    "p0_fraction",
    "periodic_train",
    "plane_wave",
    "rabi_frequency",
    "recoil_frequency",
    "run",
    "scaled_period",
    "__version__",
]
