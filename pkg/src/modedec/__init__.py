"""Toolkit for designing and validating multiply-modulated decoupling fields."""

from .cascade import (
    FrameCascade,
    ModeDesign,
    OffsetTrajectory,
    alpha_fixed_point,
    alpha_step,
    build_cascade,
    offset_trajectory,
)
from .resonance import GapAssignment, GapResult, assignment_value, gap_report, min_gap
from .spinsim import (
    EfficiencyResult,
    Engine,
    SimConfig,
    SimTrace,
    SpinSystem,
    efficiency,
    inhomogeneity_sweep,
    offset_sweep,
    propagate,
)
from .waveform import (
    AmpPhaseSample,
    GuardError,
    Waveform,
    WaveformMeta,
    amp_phase_arrays,
    export_shape,
    load_waveform,
    make_cw,
    make_tppm,
    match_rms,
    max_amplitude,
    mode_field,
    rms_amplitude,
    synthesize_mode,
)

__version__ = "0.1.0"

__all__ = [
    "AmpPhaseSample",
    "EfficiencyResult",
    "Engine",
    "FrameCascade",
    "GapAssignment",
    "GapResult",
    "GuardError",
    "ModeDesign",
    "OffsetTrajectory",
    "SimConfig",
    "SimTrace",
    "SpinSystem",
    "Waveform",
    "WaveformMeta",
    "alpha_fixed_point",
    "alpha_step",
    "amp_phase_arrays",
    "assignment_value",
    "build_cascade",
    "efficiency",
    "export_shape",
    "gap_report",
    "inhomogeneity_sweep",
    "load_waveform",
    "make_cw",
    "make_tppm",
    "match_rms",
    "max_amplitude",
    "min_gap",
    "mode_field",
    "offset_sweep",
    "offset_trajectory",
    "propagate",
    "rms_amplitude",
    "synthesize_mode",
]
