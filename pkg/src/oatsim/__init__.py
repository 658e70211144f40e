"""Simulation toolkit for one-axis-twisted two-mode states.

Exact states and rotations live in :mod:`oatsim.spin`, figures of merit in
:mod:`oatsim.metrology`, detection-imperfection models in
:mod:`oatsim.imperfections`, sweep drivers in :mod:`oatsim.experiments`, and
the command-line interface in :mod:`oatsim.cli`.
"""

__version__ = "0.1.0"

from .spin import (  # noqa: E402
    CollectiveOps,
    Direction,
    SpinState,
    X_AXIS,
    Y_AXIS,
    Z_AXIS,
    apply_oat,
    build_ops,
    make_coherent_state,
    rotate,
)
from .metrology import (  # noqa: E402
    DEFAULT_THETA_PROBE,
    MetrologyReport,
    OutcomeAmplitudes,
    OutcomeDistribution,
    axis_for,
    classical_fi,
    crlb,
    fi_bs_exact_decomposition,
    fi_mzi_exact_decomposition,
    fi_plateau_approx,
    fidelity,
    metrology_report,
    optimize_squeezing,
    outcome_distribution,
    pure_family,
    qfi_fast_phase_approx,
    qfi_optimized,
    qfi_pure,
    rotated_amplitudes,
    spin_squeezing,
    variance,
)
from .imperfections import (  # noqa: E402
    ResolutionKernel,
    StateEnsemble,
    convolve_resolution,
    convolved_family,
    dalpha_scaling_prediction,
    ensemble_distribution,
    ensemble_family,
    mix_over_alpha,
    resolution_scaling_fit,
)
from .experiments import (  # noqa: E402
    SweepRecord,
    SweepResult,
    probe_fidelity,
    sweep_alpha,
    sweep_dalpha,
    sweep_sigma,
)

__all__ = [
    "__version__",
    "CollectiveOps", "Direction", "SpinState", "X_AXIS", "Y_AXIS", "Z_AXIS",
    "apply_oat", "build_ops", "make_coherent_state", "rotate",
    "DEFAULT_THETA_PROBE", "MetrologyReport", "OutcomeAmplitudes",
    "OutcomeDistribution", "axis_for", "classical_fi", "crlb",
    "fi_bs_exact_decomposition", "fi_mzi_exact_decomposition",
    "fi_plateau_approx", "fidelity", "metrology_report", "optimize_squeezing",
    "outcome_distribution", "pure_family", "qfi_fast_phase_approx",
    "qfi_optimized", "qfi_pure", "rotated_amplitudes", "spin_squeezing",
    "variance",
    "ResolutionKernel", "StateEnsemble", "convolve_resolution",
    "convolved_family", "dalpha_scaling_prediction", "ensemble_distribution",
    "ensemble_family", "mix_over_alpha", "resolution_scaling_fit",
    "SweepRecord", "SweepResult", "probe_fidelity", "sweep_alpha",
    "sweep_dalpha", "sweep_sigma",
]
