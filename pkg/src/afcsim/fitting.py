"""Least-squares fitting of decay curves and interference fringes.

Both fits are linear in their parameters and therefore exact on noiseless
model data: exponential decays are fitted as ordinary least squares on the
log amplitude, fringes on the basis {1, sin(phi), cos(phi)}.  Standard
errors come from the residual variance and the design covariance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

NOISE_KINDS = ("additive_gaussian", "multiplicative_gaussian")

#: decay experiment kinds and how the fitted rate maps to the physical
#: constant: a two-pulse echo decays as exp(-2 t / T2) so T2 = 2/rate; a
#: spin-wave echo decays as exp(-pi gamma_s tau) so gamma_s = rate/pi; an
#: intensity-convention spin decay carries twice the field exponent.
DECAY_KINDS = ("two_pulse_echo", "spin_wave", "spin_wave_intensity")


@dataclass(frozen=True)
class NoiseModel:
    """Seeded noise generator; identical seeds give identical realizations.

    `sigma` is a relative scale: multiplicative noise draws x*(1+sigma*g),
    additive noise draws x + sigma*max|x|*g, with g standard normal.
    """

    kind: str
    sigma: float
    seed: int = 0

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ValidationError(f"noise.kind must be one of {NOISE_KINDS}")
        if self.sigma < 0:
            raise ValidationError("noise.sigma must be >= 0")

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)

    def apply(self, values: np.ndarray, rng: np.random.Generator | None = None) -> np.ndarray:
        x = np.asarray(values, dtype=float)
        if self.sigma == 0:
            return x.copy()
        if rng is None:
            rng = self.rng()
        g = rng.standard_normal(x.shape)
        if self.kind == "multiplicative_gaussian":
            return x * (1.0 + self.sigma * g)
        scale = float(np.max(np.abs(x))) if x.size else 0.0
        return x + self.sigma * scale * g

    def replica(self, index: int) -> "NoiseModel":
        """Independent, deterministically derived noise stream."""
        child = int(np.random.SeedSequence((self.seed, index)).generate_state(1)[0])
        return NoiseModel(kind=self.kind, sigma=self.sigma, seed=child)


@dataclass(frozen=True)
class DecayFit:
    """Log-linear decay fit y = exp(intercept - rate * x).

    `derived_constant` is T2 (us) for kind 'two_pulse_echo', gamma_s (MHz)
    for kinds 'spin_wave' and 'spin_wave_intensity'.  A non-decaying series
    yields rate <= 0 and an unbounded derived constant.
    """

    kind: str
    rate_per_us: float
    intercept_log: float
    stderr_rate: float
    stderr_intercept: float
    derived_constant: float
    stderr_derived: float
    unbounded: bool = False

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "rate_per_us": self.rate_per_us,
            "intercept_log": self.intercept_log,
            "stderr_rate": self.stderr_rate,
            "stderr_intercept": self.stderr_intercept,
            "derived_constant": self.derived_constant,
            "stderr_derived": self.stderr_derived,
            "unbounded": self.unbounded,
        }


def _derived(kind: str, rate: float, stderr_rate: float) -> tuple[float, float, bool]:
    if rate <= 0:
        return math.inf, math.inf, True
    if kind == "two_pulse_echo":
        return 2.0 / rate, 2.0 * stderr_rate / rate**2, False
    if kind == "spin_wave":
        return rate / math.pi, stderr_rate / math.pi, False
    return rate / (2.0 * math.pi), stderr_rate / (2.0 * math.pi), False


def fit_log_linear(points: np.ndarray, kind: str = "two_pulse_echo") -> DecayFit:
    """Ordinary least squares on (x, ln amplitude).

    Requires at least three points with strictly positive amplitudes.
    """
    if kind not in DECAY_KINDS:
        raise ValidationError(f"decay kind must be one of {DECAY_KINDS}")
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValidationError("points must be an (n, 2) array of (x, amplitude)")
    if len(pts) < 3:
        raise ValidationError("need at least 3 points for a decay fit")
    x = pts[:, 0]
    a = pts[:, 1]
    if np.any(a <= 0):
        raise ValidationError("amplitudes must be positive (log fit)")
    y = np.log(a)
    n = len(x)
    xbar = x.mean()
    sxx = float(np.sum((x - xbar) ** 2))
    if sxx <= 0:
        raise ValidationError("x values must not be all equal")
    slope = float(np.sum((x - xbar) * (y - y.mean())) / sxx)
    intercept = float(y.mean() - slope * xbar)
    resid = y - (intercept + slope * x)
    s2 = float(np.sum(resid**2) / (n - 2))
    stderr_slope = math.sqrt(s2 / sxx)
    stderr_intercept = math.sqrt(s2 * (1.0 / n + xbar**2 / sxx))
    rate = -slope
    derived, stderr_derived, unbounded = _derived(kind, rate, stderr_slope)
    return DecayFit(
        kind=kind,
        rate_per_us=rate,
        intercept_log=intercept,
        stderr_rate=stderr_slope,
        stderr_intercept=stderr_intercept,
        derived_constant=derived,
        stderr_derived=stderr_derived,
        unbounded=unbounded,
    )


@dataclass(frozen=True)
class FringeFit:
    """Sinusoidal fringe fit I(phi) = (i_max/2) * (1 + V sin(phi + phi0))."""

    i_max: float
    visibility: float
    phi0_rad: float
    stderr_v: float

    def to_dict(self) -> dict:
        return {
            "i_max": self.i_max,
            "visibility": self.visibility,
            "phi0_rad": self.phi0_rad,
            "stderr_v": self.stderr_v,
        }


def fit_fringe(points: np.ndarray) -> FringeFit:
    """Linear least squares of fringe data on {1, sin(phi), cos(phi)}.

    With the model a + b sin(phi) + c cos(phi), the visibility is
    sqrt(b^2 + c^2)/a, the fringe phase atan2(c, b), and i_max = 2a.
    Standard errors follow from the parameter covariance (delta method for
    the visibility).  Refuses fewer than four points or phase sets that are
    degenerate modulo pi.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValidationError("points must be an (n, 2) array of (phi, intensity)")
    if len(pts) < 4:
        raise ValidationError("need at least 4 points for a fringe fit")
    phi = pts[:, 0]
    inten = pts[:, 1]
    design = np.column_stack([np.ones_like(phi), np.sin(phi), np.cos(phi)])
    gram = design.T @ design
    if np.linalg.matrix_rank(design) < 3 or np.linalg.cond(gram) > 1e12:
        raise ValidationError(
            "phase set is degenerate (phases equal modulo pi); the fringe "
            "parameters are not identifiable"
        )
    coef, *_ = np.linalg.lstsq(design, inten, rcond=None)
    a, b, c = (float(v) for v in coef)
    if a <= 0:
        raise ValidationError("fitted mean intensity is not positive")
    resid = inten - design @ coef
    dof = len(pts) - 3
    s2 = float(resid @ resid) / dof
    cov = s2 * np.linalg.inv(gram)
    r = math.hypot(b, c)
    visibility = r / a
    if r > 0:
        grad = np.array([-r / a**2, b / (a * r), c / (a * r)])
    else:
        grad = np.array([0.0, 1.0 / a, 1.0 / a])
    stderr_v = float(math.sqrt(max(grad @ cov @ grad, 0.0)))
    return FringeFit(
        i_max=2.0 * a,
        visibility=visibility,
        phi0_rad=math.atan2(c, b),
        stderr_v=stderr_v,
    )
