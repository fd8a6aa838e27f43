"""Frequency grids, inhomogeneous absorption lines, and the hyperfine level scheme.

Unit conventions used throughout the package: frequencies and linewidths in
MHz, times in microseconds, so that frequency-time products are
dimensionless.  Absolute optical frequencies (THz) are carried as metadata
only; all physics runs on detuning axes centered on zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import NoLineError, ValidationError

LINE_SHAPES = ("gaussian", "lorentzian")

#: Transition labels mapped to (ground index, excited index).  Index 0/1/2
#: corresponds to the |1/2>, |3/2>, |5/2> sublevels of each manifold.
TRANSITION_INDEX = {"f0": (0, 2), "f1": (1, 2), "f2": (2, 1)}


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform detuning grid, symmetric about zero.

    Parameters
    ----------
    span_mhz : half-width of the detuning axis; the grid covers
        [-span, +span].
    n_points : number of samples; must be a power of two (required by the
        transform-based propagator).
    center_abs_thz : absolute frequency of the grid center, bookkeeping only.
    """

    span_mhz: float
    n_points: int
    center_abs_thz: float = 0.0

    def __post_init__(self):
        if not isinstance(self.n_points, int) or self.n_points < 2:
            raise ValidationError("grid.n_points must be an integer >= 2")
        if not _is_pow2(self.n_points):
            raise ValidationError(
                f"grid.n_points must be a power of two, got {self.n_points}"
            )
        if not (self.span_mhz > 0 and np.isfinite(self.span_mhz)):
            raise ValidationError("grid.span_mhz must be positive and finite")

    @property
    def spacing_mhz(self) -> float:
        return 2.0 * self.span_mhz / (self.n_points - 1)

    def detunings(self) -> np.ndarray:
        """Detuning samples in MHz, ascending, symmetric about zero."""
        return np.linspace(-self.span_mhz, self.span_mhz, self.n_points)


@dataclass(frozen=True)
class InhomogeneousLine:
    """Inhomogeneously broadened absorption line on a detuning axis."""

    shape: str
    fwhm_mhz: float
    peak_depth: float
    center_offset_mhz: float = 0.0

    def __post_init__(self):
        if self.shape not in LINE_SHAPES:
            raise ValidationError(
                f"line.shape must be one of {LINE_SHAPES}, got {self.shape!r}"
            )
        if not (self.fwhm_mhz > 0):
            raise ValidationError("line.fwhm_mhz must be > 0")
        if self.peak_depth < 0:
            raise ValidationError("line.peak_depth must be >= 0")


def line_depth(line: InhomogeneousLine, freqs_mhz: np.ndarray) -> np.ndarray:
    """Evaluate the optical depth of `line` at the given detunings."""
    x = np.asarray(freqs_mhz, dtype=float) - line.center_offset_mhz
    if line.shape == "gaussian":
        return line.peak_depth * np.exp(-4.0 * np.log(2.0) * x**2 / line.fwhm_mhz**2)
    return line.peak_depth / (1.0 + (2.0 * x / line.fwhm_mhz) ** 2)


@dataclass(frozen=True)
class HyperfineScheme:
    """Three ground and three excited sublevels with relative line strengths.

    `branching` is a 3x3 matrix of relative oscillator strengths, rows
    indexed by ground level and columns by excited level; each row sums to
    one.  The labels f0, f1 and f2 name the input, control and preparation
    transitions and are fixed to the (ground, excited) pairs in
    TRANSITION_INDEX.
    """

    ground_offsets_mhz: tuple[float, float, float]
    excited_offsets_mhz: tuple[float, float, float]
    branching: tuple[tuple[float, float, float], ...]

    def __post_init__(self):
        g = tuple(float(v) for v in self.ground_offsets_mhz)
        e = tuple(float(v) for v in self.excited_offsets_mhz)
        if len(g) != 3 or len(e) != 3:
            raise ValidationError("scheme offsets must have exactly 3 entries")
        if not (g[0] < g[1] < g[2]) or not (e[0] < e[1] < e[2]):
            raise ValidationError("scheme offsets must be strictly increasing")
        b = np.asarray(self.branching, dtype=float)
        if b.shape != (3, 3):
            raise ValidationError("scheme.branching must be a 3x3 matrix")
        if np.any(b < 0) or np.any(b > 1):
            raise ValidationError("branching entries must lie in [0, 1]")
        if np.any(np.abs(b.sum(axis=1) - 1.0) > 1e-12):
            raise ValidationError("branching rows must each sum to 1")
        object.__setattr__(self, "ground_offsets_mhz", g)
        object.__setattr__(self, "excited_offsets_mhz", e)
        object.__setattr__(self, "branching", tuple(tuple(row) for row in b))

    def branching_matrix(self) -> np.ndarray:
        return np.asarray(self.branching, dtype=float)

    def transition_shift_mhz(self, ground: int, excited: int) -> float:
        """Transition frequency relative to the shared optical origin."""
        return self.excited_offsets_mhz[excited] - self.ground_offsets_mhz[ground]

    def oscillator_strength(self, label: str) -> float:
        i, j = self.transition_pair(label)
        return self.branching_matrix()[i, j]

    @staticmethod
    def transition_pair(label: str) -> tuple[int, int]:
        try:
            return TRANSITION_INDEX[label]
        except KeyError:
            raise ValidationError(
                f"unknown transition label {label!r}; expected one of "
                f"{sorted(TRANSITION_INDEX)}"
            ) from None


@dataclass(frozen=True)
class AbsorptionProfile:
    """Sampled optical depth d(detuning) on a FrequencyGrid.

    `depth` is the total optical depth seen by a propagating field,
    including any uniform residual; `background_depth` records the uniform
    component for bookkeeping (efficiency oracles, comb statistics).
    """

    grid: FrequencyGrid
    depth: np.ndarray = field(repr=False)
    background_depth: float = 0.0

    def __post_init__(self):
        d = np.array(self.depth, dtype=float, copy=True)
        if d.ndim != 1 or len(d) != self.grid.n_points:
            raise ValidationError(
                f"depth length {d.size} does not match grid n_points "
                f"{self.grid.n_points}"
            )
        if not np.all(np.isfinite(d)):
            raise ValidationError("depth values must be finite")
        if np.any(d < -1e-12):
            raise ValidationError("depth values must be non-negative")
        np.clip(d, 0.0, None, out=d)
        d.flags.writeable = False
        object.__setattr__(self, "depth", d)
        if self.background_depth < 0:
            raise ValidationError("background_depth must be >= 0")

    def detunings(self) -> np.ndarray:
        return self.grid.detunings()


@dataclass(frozen=True)
class LineMeasurement:
    peak_offset_mhz: float
    fwhm_mhz: float
    peak_depth: float


def build_line_profile(line: InhomogeneousLine, grid: FrequencyGrid) -> AbsorptionProfile:
    """Sample an inhomogeneous line onto a grid.

    Refuses grids narrower than twice the FWHM: a truncated line corrupts
    the causal phase reconstructed from the absorption spectrum.
    """
    if grid.span_mhz < 2.0 * line.fwhm_mhz:
        raise ValidationError(
            f"grid span {grid.span_mhz} MHz too small for line fwhm "
            f"{line.fwhm_mhz} MHz; need span >= 2*fwhm"
        )
    depth = line_depth(line, grid.detunings())
    return AbsorptionProfile(grid=grid, depth=depth, background_depth=0.0)


def _parabolic_vertex(y0: float, y1: float, y2: float) -> tuple[float, float]:
    """Vertex (offset in samples from center, value) of the parabola through
    three equally spaced points."""
    denom = y0 - 2.0 * y1 + y2
    if denom == 0.0:
        return 0.0, y1
    delta = 0.5 * (y0 - y2) / denom
    value = y1 - 0.25 * (y0 - y2) * delta
    return delta, value


def _half_crossing(x: np.ndarray, y: np.ndarray, i_peak: int, level: float,
                   direction: int) -> float:
    """Linearly interpolated position where y first crosses `level` moving
    away from i_peak in `direction` (+1 right, -1 left)."""
    i = i_peak
    while 0 <= i + direction < len(y):
        j = i + direction
        if y[j] < level:
            # crossing between i and j
            frac = (y[i] - level) / (y[i] - y[j])
            return x[i] + frac * (x[j] - x[i])
        i = j
    raise ValidationError("half-maximum crossing falls outside the grid")


def measure_line(profile: AbsorptionProfile) -> LineMeasurement:
    """Locate the absorption peak and measure its width.

    The peak position is refined by quadratic interpolation around the
    maximum sample; the FWHM comes from linearly interpolated half-maximum
    crossings on either side, measured above the profile background.
    """
    x = profile.detunings()
    y = profile.depth
    base = profile.background_depth
    i = int(np.argmax(y))
    height = y[i] - base
    if height <= 1e-15 * max(1.0, abs(base)) or height <= 0.0:
        raise NoLineError("profile is flat; no absorption line to measure")
    if i == 0 or i == len(y) - 1:
        raise ValidationError("absorption peak sits on the grid edge")
    delta, peak_val = _parabolic_vertex(y[i - 1], y[i], y[i + 1])
    peak_offset = x[i] + delta * profile.grid.spacing_mhz
    level = base + 0.5 * (peak_val - base)
    left = _half_crossing(x, y, i, level, -1)
    right = _half_crossing(x, y, i, level, +1)
    return LineMeasurement(
        peak_offset_mhz=float(peak_offset),
        fwhm_mhz=float(right - left),
        peak_depth=float(peak_val),
    )


def write_profile(profile: AbsorptionProfile, path: str | Path) -> None:
    """Write a profile as two-column text (detuning_MHz, optical_depth)."""
    path = Path(path)
    header = (
        f"# afcsim absorption profile\n"
        f"# center_abs_thz = {profile.grid.center_abs_thz!r}\n"
        f"# span_mhz = {profile.grid.span_mhz!r}\n"
        f"# n_points = {profile.grid.n_points}\n"
        f"# background_depth = {profile.background_depth!r}\n"
        f"# columns: detuning_mhz\toptical_depth"
    )
    data = np.column_stack([profile.detunings(), profile.depth])
    np.savetxt(path, data, fmt="%.17g", delimiter="\t", header=header, comments="")


def read_profile(path: str | Path) -> AbsorptionProfile:
    """Read a profile written by write_profile."""
    meta: dict[str, str] = {}
    with open(path) as fh:
        for raw in fh:
            if not raw.startswith("#"):
                break
            if "=" in raw:
                key, _, val = raw.lstrip("# ").partition("=")
                meta[key.strip()] = val.strip()
    try:
        grid = FrequencyGrid(
            span_mhz=float(meta["span_mhz"]),
            n_points=int(meta["n_points"]),
            center_abs_thz=float(meta.get("center_abs_thz", 0.0)),
        )
        background = float(meta.get("background_depth", 0.0))
    except KeyError as exc:
        raise ValidationError(f"profile file missing header key {exc}") from None
    data = np.loadtxt(path, comments="#")
    if data.ndim != 2 or data.shape[1] != 2:
        raise ValidationError("profile file must have two columns")
    return AbsorptionProfile(grid=grid, depth=data[:, 1], background_depth=background)
