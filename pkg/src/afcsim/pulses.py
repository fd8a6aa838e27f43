"""Complex baseband pulse envelopes on uniform time grids."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ValidationError


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class PulseEnvelope:
    """Complex field envelope sampled at dt_us starting at t0_us.

    `carrier_detuning_mhz` is the offset of the pulse carrier from the
    absorption-grid center; the samples themselves are baseband relative to
    that carrier.
    """

    dt_us: float
    samples: np.ndarray = field(repr=False)
    t0_us: float = 0.0
    carrier_detuning_mhz: float = 0.0

    def __post_init__(self):
        if not (self.dt_us > 0):
            raise ValidationError("pulse.dt_us must be > 0")
        s = np.array(self.samples, dtype=complex, copy=True)
        if s.ndim != 1 or not _is_pow2(len(s)):
            raise ValidationError(
                f"pulse sample count must be a power of two, got {s.size}"
            )
        if not np.all(np.isfinite(s.view(float))):
            raise ValidationError("pulse samples must be finite")
        s.flags.writeable = False
        object.__setattr__(self, "samples", s)

    @property
    def n_samples(self) -> int:
        return len(self.samples)

    def times(self) -> np.ndarray:
        return self.t0_us + np.arange(self.n_samples) * self.dt_us

    def intensity(self) -> np.ndarray:
        return np.abs(self.samples) ** 2

    @property
    def energy(self) -> float:
        """Integrated intensity, sum(|a|^2) * dt."""
        return float(np.sum(np.abs(self.samples) ** 2) * self.dt_us)

    def centroid_us(self) -> float:
        """Energy-weighted mean arrival time."""
        w = self.intensity()
        tot = w.sum()
        if tot <= 0:
            raise ValidationError("cannot take the centroid of an empty pulse")
        return float((w * self.times()).sum() / tot)


def gaussian_pulse(
    fwhm_us: float,
    peak_time_us: float,
    dt_us: float,
    n_samples: int,
    amplitude: float = 1.0,
    carrier_detuning_mhz: float = 0.0,
    t0_us: float = 0.0,
) -> PulseEnvelope:
    """Gaussian pulse whose intensity profile has the given FWHM."""
    if not (fwhm_us > 0):
        raise ValidationError("fwhm_us must be > 0")
    t = t0_us + np.arange(n_samples) * dt_us
    samples = amplitude * np.exp(
        -2.0 * np.log(2.0) * (t - peak_time_us) ** 2 / fwhm_us**2
    )
    return PulseEnvelope(
        dt_us=dt_us,
        samples=samples.astype(complex),
        t0_us=t0_us,
        carrier_detuning_mhz=carrier_detuning_mhz,
    )


def intensity_fwhm(pulse: PulseEnvelope, window: tuple[float, float] | None = None) -> float:
    """FWHM of the intensity profile by linear interpolation, optionally
    restricted to a time window."""
    t = pulse.times()
    y = pulse.intensity()
    if window is not None:
        sel = (t >= window[0]) & (t <= window[1])
        t, y = t[sel], y[sel]
    if y.size < 3 or y.max() <= 0:
        raise ValidationError("no intensity peak to measure")
    i = int(np.argmax(y))
    half = 0.5 * y[i]
    j = i
    while j > 0 and y[j - 1] >= half:
        j -= 1
    k = i
    while k < len(y) - 1 and y[k + 1] >= half:
        k += 1
    if j == 0 or k == len(y) - 1:
        raise ValidationError("intensity peak is clipped by the trace window")
    left = np.interp(half, [y[j - 1], y[j]], [t[j - 1], t[j]])
    right = np.interp(half, [y[k + 1], y[k]], [t[k + 1], t[k]])
    return float(right - left)


def write_trace(pulse: PulseEnvelope, path: str | Path) -> None:
    """Write a trace as text columns (t_us, re, im, intensity)."""
    header = (
        f"# afcsim time trace\n"
        f"# dt_us = {pulse.dt_us!r}\n"
        f"# t0_us = {pulse.t0_us!r}\n"
        f"# carrier_detuning_mhz = {pulse.carrier_detuning_mhz!r}\n"
        f"# columns: t_us\tre\tim\tintensity"
    )
    data = np.column_stack(
        [pulse.times(), pulse.samples.real, pulse.samples.imag, pulse.intensity()]
    )
    np.savetxt(path, data, fmt="%.17g", delimiter="\t", header=header, comments="")


def read_trace(path: str | Path) -> PulseEnvelope:
    meta: dict[str, str] = {}
    with open(path) as fh:
        for raw in fh:
            if not raw.startswith("#"):
                break
            if "=" in raw:
                key, _, val = raw.lstrip("# ").partition("=")
                meta[key.strip()] = val.strip()
    data = np.loadtxt(path, comments="#")
    samples = data[:, 1] + 1j * data[:, 2]
    return PulseEnvelope(
        dt_us=float(meta["dt_us"]),
        samples=samples,
        t0_us=float(meta.get("t0_us", 0.0)),
        carrier_detuning_mhz=float(meta.get("carrier_detuning_mhz", 0.0)),
    )
