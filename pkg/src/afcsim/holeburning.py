"""Spectral-hole-burning preparation of comb structures by rate equations.

The ensemble is bookkept as spectral classes, one per detuning bin, each
holding populations of the three ground sublevels.  A class is labeled by
the detuning of its input transition (f0); every other transition of that
class lands at the f0 detuning plus a fixed hyperfine shift.  Burning a
step depletes the targeted ground level of every class whose targeted
transition falls inside the swept window and redistributes the removed
population to the other two ground levels in proportion to the branching
ratios of the excited level it was pumped through.  Excited-state dynamics
are adiabatically eliminated: burning is pure ground-level redistribution.

The synthesized absorption weights each transition's contribution by the
population of its ground level relative to the unburned 1/3 equilibrium,
under the unburned line envelope.  Hyperfine shifts are assumed small
against the inhomogeneous width, so an empty burn sequence reproduces the
plain line profile identically.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .spectral import (
    AbsorptionProfile,
    FrequencyGrid,
    HyperfineScheme,
    InhomogeneousLine,
    line_depth,
)

BURN_PATTERNS = ("flat", "comb")


@dataclass(frozen=True)
class BurnStep:
    """One burning pass over a frequency window.

    pattern 'flat' burns the whole window; pattern 'comb' burns only the
    gaps between the intended teeth (teeth of width delta/finesse centered
    at half-integer multiples of delta survive), carving an absorbing comb.
    `strength` is a dimensionless saturation parameter: the targeted level
    keeps a fraction exp(-strength * oscillator_strength) per repetition.
    """

    transition: str
    center_mhz: float
    width_mhz: float
    strength: float
    pattern: str = "flat"
    repetitions: int = 1
    comb_delta_mhz: float | None = None
    comb_finesse: float | None = None

    def __post_init__(self):
        HyperfineScheme.transition_pair(self.transition)
        if not (self.width_mhz > 0):
            raise ValidationError("burn step width_mhz must be > 0")
        if self.strength < 0:
            raise ValidationError("burn step strength must be >= 0")
        if not isinstance(self.repetitions, int) or self.repetitions < 1:
            raise ValidationError("burn step repetitions must be an integer >= 1")
        if self.pattern not in BURN_PATTERNS:
            raise ValidationError(
                f"burn step pattern must be one of {BURN_PATTERNS}"
            )
        if self.pattern == "comb":
            if self.comb_delta_mhz is None or self.comb_finesse is None:
                raise ValidationError(
                    "comb pattern requires comb_delta_mhz and comb_finesse"
                )
            if not (self.comb_delta_mhz > 0 and self.comb_finesse > 1):
                raise ValidationError(
                    "comb pattern needs comb_delta_mhz > 0 and comb_finesse > 1"
                )


@dataclass(frozen=True)
class BurnSequence:
    steps: tuple[BurnStep, ...]

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))

    @classmethod
    def from_mapping(cls, mapping: dict) -> "BurnSequence":
        """Build a sequence from configuration data (keyed fields)."""
        if not isinstance(mapping, dict) or "steps" not in mapping:
            raise ValidationError("burn_sequence must be a mapping with 'steps'")
        unknown = set(mapping) - {"steps"}
        if unknown:
            raise ValidationError(f"burn_sequence has unknown keys {sorted(unknown)}")
        steps = []
        allowed = {
            "transition", "center_mhz", "width_mhz", "strength", "pattern",
            "repetitions", "comb_delta_mhz", "comb_finesse",
        }
        for k, raw in enumerate(mapping["steps"]):
            if not isinstance(raw, dict):
                raise ValidationError(f"burn step {k} must be a mapping")
            bad = set(raw) - allowed
            if bad:
                raise ValidationError(f"burn step {k} has unknown keys {sorted(bad)}")
            steps.append(BurnStep(**raw))
        if not steps:
            raise ValidationError("burn_sequence.steps must not be empty")
        return cls(steps=tuple(steps))


@dataclass(frozen=True)
class PopulationState:
    """Ground-level populations per spectral class.

    `populations` has shape (n_classes, 3); each row sums to one.
    """

    class_detunings_mhz: np.ndarray = field(repr=False)
    populations: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.array(self.class_detunings_mhz, dtype=float, copy=True)
        p = np.array(self.populations, dtype=float, copy=True)
        if p.shape != (c.size, 3):
            raise ValidationError("populations must have shape (n_classes, 3)")
        if np.any(p < -1e-12) or np.any(p > 1 + 1e-12):
            raise ValidationError("populations must lie in [0, 1]")
        if np.any(np.abs(p.sum(axis=1) - 1.0) > 1e-9):
            raise ValidationError("per-class populations must sum to 1")
        c.flags.writeable = False
        p.flags.writeable = False
        object.__setattr__(self, "class_detunings_mhz", c)
        object.__setattr__(self, "populations", p)

    def level_population(self, level: int) -> np.ndarray:
        return self.populations[:, level]


def comb_gap_mask(freqs_mhz: np.ndarray, delta_mhz: float, finesse: float) -> np.ndarray:
    """True where a comb-patterned burn acts: outside the teeth that are
    meant to survive (teeth at half-integer multiples of delta)."""
    rel = np.asarray(freqs_mhz, dtype=float) / delta_mhz - 0.5
    dist = np.abs(rel - np.round(rel)) * delta_mhz
    return dist > delta_mhz / (2.0 * finesse)


def simulate_hole_burning(
    seq: BurnSequence,
    scheme: HyperfineScheme,
    line: InhomogeneousLine,
    grid: FrequencyGrid,
) -> tuple[PopulationState, AbsorptionProfile]:
    """Run a burn sequence and synthesize the resulting absorption profile."""
    shifts = np.array(
        [[scheme.transition_shift_mhz(i, j) for j in range(3)] for i in range(3)]
    )
    f0 = shifts[0, 2]
    rel = shifts - f0  # transition offsets relative to the input transition
    if np.max(np.abs(rel)) > grid.span_mhz / 4.0:
        raise ValidationError(
            "hyperfine shifts are not small compared to the grid span; "
            "enlarge grid.span_mhz"
        )
    branching = scheme.branching_matrix()
    classes = grid.detunings()
    pop = np.full((grid.n_points, 3), 1.0 / 3.0)

    for step in seq.steps:
        i_t, j_t = HyperfineScheme.transition_pair(step.transition)
        nu = classes + rel[i_t, j_t]
        mask = np.abs(nu - step.center_mhz) <= step.width_mhz / 2.0
        if step.pattern == "comb":
            mask &= comb_gap_mask(nu, step.comb_delta_mhz, step.comb_finesse)
        if not np.any(mask):
            continue
        keep = np.exp(-step.strength * branching[i_t, j_t]) ** step.repetitions
        removed = pop[mask, i_t] * (1.0 - keep)
        pop[mask, i_t] *= keep
        # decay branching out of the pumped excited level, excluding the
        # target level (population falling back is re-burned within the step)
        weights = branching[:, j_t].copy()
        weights[i_t] = 0.0
        total = weights.sum()
        if total <= 0:
            others = [k for k in range(3) if k != i_t]
            weights[others] = 0.5
            total = 1.0
        for k in range(3):
            if k != i_t and weights[k] > 0:
                pop[mask, k] += removed * (weights[k] / total)

    envelope = line_depth(line, classes)
    depth = np.zeros(grid.n_points)
    for i in range(3):
        for j in range(3):
            shifted = np.interp(
                classes - rel[i, j], classes, pop[:, i], left=1.0 / 3.0,
                right=1.0 / 3.0,
            )
            depth += branching[i, j] * shifted
    depth *= envelope

    state = PopulationState(class_detunings_mhz=classes, populations=pop)
    profile = AbsorptionProfile(grid=grid, depth=depth, background_depth=0.0)
    return state, profile
