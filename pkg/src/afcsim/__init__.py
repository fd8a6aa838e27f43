"""Simulation toolkit for atomic-frequency-comb (AFC) optical storage.

The package models an inhomogeneously broadened three-ground-level ion
ensemble: comb preparation (parametric or by spectral hole burning),
causal linear pulse propagation with echo emission, spin-wave storage via
control-pulse transfers, and the decay/fringe fitting used to characterize
such memories.  Frequencies are in MHz and times in microseconds
throughout.
"""

from .comb import (
    CombMeasurement,
    CombParams,
    comb_depth,
    grid_for_comb,
    measure_comb,
    parametric_comb,
)
from .errors import NoLineError, ValidationError
from .experiments import (
    StorageRun,
    run_fringe_experiment,
    run_full_storage_experiment,
    run_spin_decay_experiment,
    run_t2_experiment,
    simulate_interference,
    simulate_two_pulse_echo,
    storage_decay_scan,
)
from .fitting import (
    DecayFit,
    FringeFit,
    NoiseModel,
    fit_fringe,
    fit_log_linear,
)
from .holeburning import (
    BurnSequence,
    BurnStep,
    PopulationState,
    simulate_hole_burning,
)
from .propagation import (
    EchoReport,
    acausal_energy_fraction,
    analytic_efficiency,
    delay_trace,
    discrete_atom_oracle,
    echo_efficiency,
    impulse_response,
    kk_phase,
    minimum_phase_transfer,
    propagate,
)
from .pulses import PulseEnvelope, gaussian_pulse, intensity_fwhm, read_trace, write_trace
from .spectral import (
    AbsorptionProfile,
    FrequencyGrid,
    HyperfineScheme,
    InhomogeneousLine,
    LineMeasurement,
    build_line_profile,
    line_depth,
    measure_line,
    read_profile,
    write_profile,
)
from .spinwave import (
    SpinParams,
    SpinWaveResult,
    decay_series,
    run_spin_wave,
    spin_dephasing_factor,
)

__version__ = "0.1.0"

__all__ = [
    "AbsorptionProfile",
    "BurnSequence",
    "BurnStep",
    "CombMeasurement",
    "CombParams",
    "DecayFit",
    "EchoReport",
    "FrequencyGrid",
    "FringeFit",
    "HyperfineScheme",
    "InhomogeneousLine",
    "LineMeasurement",
    "NoLineError",
    "NoiseModel",
    "PopulationState",
    "PulseEnvelope",
    "SpinParams",
    "SpinWaveResult",
    "StorageRun",
    "ValidationError",
    "acausal_energy_fraction",
    "analytic_efficiency",
    "build_line_profile",
    "comb_depth",
    "decay_series",
    "delay_trace",
    "discrete_atom_oracle",
    "echo_efficiency",
    "fit_fringe",
    "fit_log_linear",
    "gaussian_pulse",
    "grid_for_comb",
    "impulse_response",
    "intensity_fwhm",
    "kk_phase",
    "line_depth",
    "measure_comb",
    "measure_line",
    "minimum_phase_transfer",
    "parametric_comb",
    "propagate",
    "read_profile",
    "read_trace",
    "run_fringe_experiment",
    "run_full_storage_experiment",
    "run_spin_decay_experiment",
    "run_spin_wave",
    "run_t2_experiment",
    "simulate_hole_burning",
    "simulate_interference",
    "simulate_two_pulse_echo",
    "spin_dephasing_factor",
    "storage_decay_scan",
    "write_profile",
    "write_trace",
]
