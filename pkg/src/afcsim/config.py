"""Run configuration: strict parsing of nested YAML sections.

Every section mirrors a domain type; unknown keys are rejected with the
offending section named, so typos fail before any computation starts.  One
top-level seed controls all randomness in a run.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from .comb import CombParams
from .errors import ValidationError
from .fitting import NoiseModel
from .holeburning import BurnSequence
from .pulses import PulseEnvelope, gaussian_pulse
from .spectral import FrequencyGrid, HyperfineScheme, InhomogeneousLine
from .spinwave import SpinParams

EXPERIMENT_KINDS = ("comb", "store", "spinwave", "spin_decay", "t2", "fringe")

DEFAULT_NOISE_SIGMA = 0.03
DEFAULT_PAD_FACTOR = 64


def _check_keys(mapping: dict, allowed: set[str], context: str) -> None:
    if not isinstance(mapping, dict):
        raise ValidationError(f"{context} must be a mapping")
    unknown = set(mapping) - allowed
    if unknown:
        raise ValidationError(f"{context}: unknown keys {sorted(unknown)}")


def _require(mapping: dict, key: str, context: str):
    if key not in mapping:
        raise ValidationError(f"{context}: missing required key '{key}'")
    return mapping[key]


def _axis(mapping, context: str) -> np.ndarray:
    """Parse an axis given either as explicit values or start/stop/count."""
    if isinstance(mapping, list):
        return np.asarray(mapping, dtype=float)
    _check_keys(mapping, {"values", "start", "stop", "count"}, context)
    if "values" in mapping:
        return np.asarray(mapping["values"], dtype=float)
    return np.linspace(
        float(_require(mapping, "start", context)),
        float(_require(mapping, "stop", context)),
        int(_require(mapping, "count", context)),
    )


@dataclass(frozen=True)
class PulseSpec:
    fwhm_us: float
    peak_time_us: float
    dt_us: float
    n_samples: int
    amplitude: float = 1.0
    carrier_detuning_mhz: float = 0.0

    def build(self) -> PulseEnvelope:
        return gaussian_pulse(
            fwhm_us=self.fwhm_us,
            peak_time_us=self.peak_time_us,
            dt_us=self.dt_us,
            n_samples=self.n_samples,
            amplitude=self.amplitude,
            carrier_detuning_mhz=self.carrier_detuning_mhz,
        )


@dataclass(frozen=True)
class T2Spec:
    series: tuple[tuple[str, float], ...]  # (label, t2_us)
    spacings_us: tuple[float, ...]
    amplitude0: float = 1.0


@dataclass(frozen=True)
class DecaySpec:
    tau_s_us: tuple[float, ...]
    base_amplitude: float = 1.0
    amplitude_convention: str = "field"


@dataclass(frozen=True)
class FringeSpec:
    i_echo: float
    i_ref: float
    overlap: float
    phi0_deg: float
    phase_step_deg: float
    n_phases: int
    averages: int = 1

    def phases_rad(self) -> np.ndarray:
        return np.deg2rad(self.phase_step_deg) * np.arange(self.n_phases)


@dataclass(frozen=True)
class RunConfig:
    experiment: str
    seed: int
    output: str | None
    grid: FrequencyGrid | None
    line: InhomogeneousLine | None
    scheme: HyperfineScheme | None
    comb: CombParams | None
    burn_sequence: BurnSequence | None
    pulse: PulseSpec | None
    spin: SpinParams | None
    noise: NoiseModel
    pad_factor: int
    t2_spec: T2Spec | None
    decay_spec: DecaySpec | None
    fringe_spec: FringeSpec | None
    repro_targets: dict | None
    raw: dict = dataclasses.field(compare=False, repr=False, default_factory=dict)

    def build_pulse(self) -> PulseEnvelope:
        if self.pulse is None:
            raise ValidationError("config has no 'pulse' section")
        return self.pulse.build()

    def with_spin(self, spin: SpinParams) -> "RunConfig":
        return dataclasses.replace(self, spin=spin)

    def to_mapping(self) -> dict:
        """Snapshot that re-parses to an equivalent RunConfig."""
        return self.raw


_TOP_KEYS = {
    "experiment", "seed", "output", "grid", "line", "scheme", "comb",
    "burn_sequence", "pulse", "spin", "noise", "propagation",
    "t2_experiment", "decay_experiment", "fringe_experiment", "repro_targets",
}


def parse_config(data: dict, source: str = "config") -> RunConfig:
    _check_keys(data, _TOP_KEYS, source)
    experiment = _require(data, "experiment", source)
    if experiment not in EXPERIMENT_KINDS:
        raise ValidationError(
            f"{source}: experiment must be one of {EXPERIMENT_KINDS}, "
            f"got {experiment!r}"
        )
    seed = int(data.get("seed", 0))
    output = data.get("output")

    grid = line = scheme = comb = burn = pulse = spin = None
    if "grid" in data:
        sec = data["grid"]
        _check_keys(sec, {"span_mhz", "n_points", "center_abs_thz"}, "grid")
        grid = FrequencyGrid(
            span_mhz=float(_require(sec, "span_mhz", "grid")),
            n_points=int(_require(sec, "n_points", "grid")),
            center_abs_thz=float(sec.get("center_abs_thz", 0.0)),
        )
    if "line" in data:
        sec = data["line"]
        _check_keys(
            sec, {"shape", "fwhm_mhz", "peak_depth", "center_offset_mhz"}, "line"
        )
        line = InhomogeneousLine(
            shape=str(_require(sec, "shape", "line")),
            fwhm_mhz=float(_require(sec, "fwhm_mhz", "line")),
            peak_depth=float(_require(sec, "peak_depth", "line")),
            center_offset_mhz=float(sec.get("center_offset_mhz", 0.0)),
        )
    if "scheme" in data:
        sec = data["scheme"]
        _check_keys(
            sec,
            {"ground_offsets_mhz", "excited_offsets_mhz", "branching"},
            "scheme",
        )
        scheme = HyperfineScheme(
            ground_offsets_mhz=tuple(_require(sec, "ground_offsets_mhz", "scheme")),
            excited_offsets_mhz=tuple(_require(sec, "excited_offsets_mhz", "scheme")),
            branching=tuple(
                tuple(row) for row in _require(sec, "branching", "scheme")
            ),
        )
    if "comb" in data:
        sec = data["comb"]
        _check_keys(
            sec,
            {"delta_mhz", "finesse", "bandwidth_mhz", "peak_depth",
             "tooth_shape", "background_depth"},
            "comb",
        )
        comb = CombParams(
            delta_mhz=float(_require(sec, "delta_mhz", "comb")),
            finesse=float(_require(sec, "finesse", "comb")),
            bandwidth_mhz=float(_require(sec, "bandwidth_mhz", "comb")),
            peak_depth=float(_require(sec, "peak_depth", "comb")),
            tooth_shape=str(sec.get("tooth_shape", "square")),
            background_depth=float(sec.get("background_depth", 0.0)),
        )
    if "burn_sequence" in data:
        burn = BurnSequence.from_mapping(data["burn_sequence"])
    if "pulse" in data:
        sec = data["pulse"]
        _check_keys(
            sec,
            {"fwhm_us", "peak_time_us", "dt_us", "n_samples", "amplitude",
             "carrier_detuning_mhz"},
            "pulse",
        )
        pulse = PulseSpec(
            fwhm_us=float(_require(sec, "fwhm_us", "pulse")),
            peak_time_us=float(_require(sec, "peak_time_us", "pulse")),
            dt_us=float(_require(sec, "dt_us", "pulse")),
            n_samples=int(_require(sec, "n_samples", "pulse")),
            amplitude=float(sec.get("amplitude", 1.0)),
            carrier_detuning_mhz=float(sec.get("carrier_detuning_mhz", 0.0)),
        )
    if "spin" in data:
        sec = data["spin"]
        _check_keys(
            sec, {"gamma_s_mhz", "eta_transfer", "tau_c_us", "tau_s_us"}, "spin"
        )
        spin = SpinParams(
            gamma_s_mhz=float(_require(sec, "gamma_s_mhz", "spin")),
            eta_transfer=float(_require(sec, "eta_transfer", "spin")),
            tau_c_us=float(_require(sec, "tau_c_us", "spin")),
            tau_s_us=float(_require(sec, "tau_s_us", "spin")),
        )

    noise_sec = data.get("noise", {})
    _check_keys(noise_sec, {"kind", "sigma"}, "noise")
    noise = NoiseModel(
        kind=str(noise_sec.get("kind", "multiplicative_gaussian")),
        sigma=float(noise_sec.get("sigma", DEFAULT_NOISE_SIGMA)),
        seed=seed,
    )

    prop_sec = data.get("propagation", {})
    _check_keys(prop_sec, {"pad_factor"}, "propagation")
    pad_factor = int(prop_sec.get("pad_factor", DEFAULT_PAD_FACTOR))

    t2_spec = decay_spec = fringe_spec = None
    if "t2_experiment" in data:
        sec = data["t2_experiment"]
        _check_keys(sec, {"series", "spacings_us", "amplitude0"}, "t2_experiment")
        series = []
        for k, item in enumerate(_require(sec, "series", "t2_experiment")):
            _check_keys(item, {"label", "t2_us"}, f"t2_experiment.series[{k}]")
            series.append(
                (str(item.get("label", f"series{k}")),
                 float(_require(item, "t2_us", f"t2_experiment.series[{k}]")))
            )
        t2_spec = T2Spec(
            series=tuple(series),
            spacings_us=tuple(
                _axis(_require(sec, "spacings_us", "t2_experiment"),
                      "t2_experiment.spacings_us")
            ),
            amplitude0=float(sec.get("amplitude0", 1.0)),
        )
    if "decay_experiment" in data:
        sec = data["decay_experiment"]
        _check_keys(
            sec, {"tau_s_us", "base_amplitude", "amplitude_convention"},
            "decay_experiment",
        )
        decay_spec = DecaySpec(
            tau_s_us=tuple(
                _axis(_require(sec, "tau_s_us", "decay_experiment"),
                      "decay_experiment.tau_s_us")
            ),
            base_amplitude=float(sec.get("base_amplitude", 1.0)),
            amplitude_convention=str(sec.get("amplitude_convention", "field")),
        )
    if "fringe_experiment" in data:
        sec = data["fringe_experiment"]
        _check_keys(
            sec,
            {"i_echo", "i_ref", "overlap", "phi0_deg", "phase_step_deg",
             "n_phases", "averages"},
            "fringe_experiment",
        )
        fringe_spec = FringeSpec(
            i_echo=float(_require(sec, "i_echo", "fringe_experiment")),
            i_ref=float(_require(sec, "i_ref", "fringe_experiment")),
            overlap=float(_require(sec, "overlap", "fringe_experiment")),
            phi0_deg=float(sec.get("phi0_deg", 0.0)),
            phase_step_deg=float(_require(sec, "phase_step_deg", "fringe_experiment")),
            n_phases=int(_require(sec, "n_phases", "fringe_experiment")),
            averages=int(sec.get("averages", 1)),
        )

    cfg = RunConfig(
        experiment=experiment,
        seed=seed,
        output=output,
        grid=grid,
        line=line,
        scheme=scheme,
        comb=comb,
        burn_sequence=burn,
        pulse=pulse,
        spin=spin,
        noise=noise,
        pad_factor=pad_factor,
        t2_spec=t2_spec,
        decay_spec=decay_spec,
        fringe_spec=fringe_spec,
        repro_targets=data.get("repro_targets"),
        raw=data,
    )
    _validate_requirements(cfg, source)
    return cfg


def _validate_requirements(cfg: RunConfig, source: str) -> None:
    kind = cfg.experiment
    if cfg.comb is not None and cfg.burn_sequence is not None:
        raise ValidationError(
            f"{source}: give either 'comb' or 'burn_sequence', not both"
        )
    if kind in ("comb", "store", "spinwave"):
        if cfg.grid is None:
            raise ValidationError(f"{source}: experiment '{kind}' needs 'grid'")
        if cfg.comb is None and cfg.burn_sequence is None:
            raise ValidationError(
                f"{source}: experiment '{kind}' needs 'comb' or 'burn_sequence'"
            )
        if cfg.burn_sequence is not None and (cfg.line is None or cfg.scheme is None):
            raise ValidationError(
                f"{source}: 'burn_sequence' needs 'line' and 'scheme' sections"
            )
    if kind in ("store", "spinwave") and cfg.pulse is None:
        raise ValidationError(f"{source}: experiment '{kind}' needs 'pulse'")
    if kind in ("spinwave", "spin_decay") and cfg.spin is None:
        raise ValidationError(f"{source}: experiment '{kind}' needs 'spin'")
    if kind == "spin_decay" and cfg.decay_spec is None:
        raise ValidationError(f"{source}: experiment 'spin_decay' needs 'decay_experiment'")
    if kind == "t2" and cfg.t2_spec is None:
        raise ValidationError(f"{source}: experiment 't2' needs 't2_experiment'")
    if kind == "fringe" and cfg.fringe_spec is None:
        raise ValidationError(f"{source}: experiment 'fringe' needs 'fringe_experiment'")


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ValidationError(f"cannot parse {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ValidationError(f"{path} does not contain a configuration mapping")
    return parse_config(data, source=str(path))


def apply_overrides(
    cfg: RunConfig,
    seed: int | None = None,
    output: str | None = None,
) -> RunConfig:
    """Rebuild a config with command-line seed/output overrides applied."""
    raw = dict(cfg.raw)
    if seed is not None:
        raw["seed"] = int(seed)
    if output is not None:
        raw["output"] = output
    return parse_config(raw, source="config")
