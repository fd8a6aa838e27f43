import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from afcsim import (
    BurnSequence,
    BurnStep,
    FrequencyGrid,
    InhomogeneousLine,
    ValidationError,
    build_line_profile,
    measure_comb,
    simulate_hole_burning,
)
from afcsim.spectral import TRANSITION_INDEX, line_depth


@pytest.fixture
def burn_grid():
    # wide enough that hyperfine shifts (<= 258 MHz) stay small against the
    # span, fine enough to resolve 0.5 MHz comb teeth
    return FrequencyGrid(span_mhz=1200.0, n_points=32768)


@pytest.fixture
def burn_line():
    return InhomogeneousLine(shape="gaussian", fwhm_mhz=400.0, peak_depth=0.9)


def _rel_shifts(scheme):
    shifts = np.array(
        [[scheme.transition_shift_mhz(i, j) for j in range(3)] for i in range(3)]
    )
    return shifts - shifts[0, 2]


class TestIdentityAndConservation:
    def test_empty_sequence_reproduces_line(self, scheme, burn_line, burn_grid):
        seq = BurnSequence(steps=())
        state, profile = simulate_hole_burning(seq, scheme, burn_line, burn_grid)
        reference = build_line_profile(burn_line, burn_grid)
        assert np.allclose(profile.depth, reference.depth, atol=1e-12)
        assert np.allclose(state.populations, 1.0 / 3.0)

    def test_population_polarization_empties_level(self, scheme, burn_line, burn_grid):
        # saturating burn on f1 empties the |3/2>g level in the window
        seq = BurnSequence(steps=(
            BurnStep(transition="f1", center_mhz=0.0, width_mhz=100.0,
                     strength=1e3, repetitions=2),
        ))
        state, _ = simulate_hole_burning(seq, scheme, burn_line, burn_grid)
        rel = _rel_shifts(scheme)[1, 2]
        addressed = np.abs(state.class_detunings_mhz + rel) <= 50.0
        assert np.all(state.populations[addressed, 1] <= 1e-12)
        assert np.allclose(state.populations.sum(axis=1), 1.0, atol=1e-9)

    def test_strength_monotonicity(self, scheme, burn_line, burn_grid):
        pops = []
        for strength in (0.5, 1.0, 2.0, 8.0):
            seq = BurnSequence(steps=(
                BurnStep(transition="f0", center_mhz=0.0, width_mhz=50.0,
                         strength=strength),
            ))
            state, _ = simulate_hole_burning(seq, scheme, burn_line, burn_grid)
            addressed = np.abs(state.class_detunings_mhz) <= 25.0
            pops.append(state.populations[addressed, 0].mean())
        assert all(a > b for a, b in zip(pops, pops[1:]))


@settings(max_examples=20, deadline=None)
@given(
    steps=st.lists(
        st.tuples(
            st.sampled_from(sorted(TRANSITION_INDEX)),
            st.floats(min_value=-200.0, max_value=200.0),
            st.floats(min_value=1.0, max_value=150.0),
            st.floats(min_value=0.0, max_value=20.0),
            st.integers(min_value=1, max_value=3),
        ),
        min_size=1,
        max_size=4,
    )
)
def test_population_conservation_under_random_sequences(steps):
    from afcsim import HyperfineScheme
    scheme = HyperfineScheme(
        ground_offsets_mhz=(0.0, 34.5, 80.7),
        excited_offsets_mhz=(0.0, 102.0, 177.0),
        branching=((0.02, 0.25, 0.73), (0.07, 0.68, 0.25), (0.91, 0.07, 0.02)),
    )
    line = InhomogeneousLine(shape="gaussian", fwhm_mhz=400.0, peak_depth=0.9)
    grid = FrequencyGrid(span_mhz=1200.0, n_points=2048)
    seq = BurnSequence(steps=tuple(
        BurnStep(transition=t, center_mhz=c, width_mhz=w, strength=s, repetitions=r)
        for t, c, w, s, r in steps
    ))
    state, profile = simulate_hole_burning(seq, scheme, line, grid)
    assert np.allclose(state.populations.sum(axis=1), 1.0, atol=1e-9)
    assert np.all(state.populations >= -1e-12)
    assert np.all(state.populations <= 1.0 + 1e-12)
    assert np.all(profile.depth >= 0.0)


class TestCombBurning:
    def test_comb_pattern_carves_matching_period(self, scheme, burn_line, burn_grid):
        delta, finesse = 2.0, 4.0
        seq = BurnSequence(steps=(
            BurnStep(transition="f1", center_mhz=0.0, width_mhz=400.0,
                     strength=1e3, repetitions=2),
            BurnStep(transition="f0", center_mhz=0.0, width_mhz=64.0,
                     pattern="comb", comb_delta_mhz=delta, comb_finesse=finesse,
                     strength=30.0, repetitions=4),
            BurnStep(transition="f1", center_mhz=0.0, width_mhz=400.0,
                     strength=1e3, repetitions=2),
        ))
        state, profile = simulate_hole_burning(seq, scheme, burn_line, burn_grid)
        x = burn_grid.detunings()
        sel = np.abs(x) <= 30.0
        sub_grid = FrequencyGrid(span_mhz=30.0, n_points=2**14)
        sub_depth = np.interp(sub_grid.detunings(), x[sel], profile.depth[sel])
        from afcsim import AbsorptionProfile
        m = measure_comb(AbsorptionProfile(grid=sub_grid, depth=sub_depth))
        assert m.period_mhz == pytest.approx(delta, abs=burn_grid.spacing_mhz)
        # level |3/2>g stays empty within the comb window
        rel = _rel_shifts(scheme)[1, 2]
        addressed = np.abs(state.class_detunings_mhz + rel) <= 180.0
        assert state.populations[addressed, 1].max() <= 0.01 / 3.0

    def test_flat_hole_and_anti_holes_match_bruteforce(self, scheme, burn_line):
        grid = FrequencyGrid(span_mhz=1200.0, n_points=1024)
        seq = BurnSequence(steps=(
            BurnStep(transition="f0", center_mhz=0.0, width_mhz=30.0,
                     strength=5.0, repetitions=2),
        ))
        _, profile = simulate_hole_burning(seq, scheme, burn_line, grid)
        oracle = _bruteforce_burn(seq, scheme, burn_line, grid)
        assert np.allclose(profile.depth, oracle, atol=1e-12)

        # anti-holes rise where moved population absorbs, holes dip on f0
        before = build_line_profile(burn_line, grid).depth
        x = grid.detunings()
        rel = _rel_shifts(scheme)
        hole_positions = rel[0, :]  # transitions out of the burned level
        checked = 0
        for i in (1, 2):
            for j in range(3):
                pos = rel[i, j]  # classes near zero re-absorb shifted
                if np.min(np.abs(pos - hole_positions)) < 31.0:
                    continue  # anti-hole collides with a hole region
                level_before = np.interp(pos, x, before)
                level_after = np.interp(pos, x, profile.depth)
                assert level_after > level_before
                checked += 1
        assert checked >= 3
        hole_level = np.interp(0.0, x, profile.depth)
        assert hole_level < np.interp(0.0, x, before)


def _bruteforce_burn(seq, scheme, line, grid):
    """Dict-and-loop reference implementation of the burning bookkeeping."""
    classes = list(grid.detunings())
    branching = scheme.branching_matrix()
    shifts = {}
    for i in range(3):
        for j in range(3):
            shifts[(i, j)] = (
                scheme.transition_shift_mhz(i, j) - scheme.transition_shift_mhz(0, 2)
            )
    pops = {c: [1 / 3, 1 / 3, 1 / 3] for c in classes}
    for step in seq.steps:
        i_t, j_t = TRANSITION_INDEX[step.transition]
        for c in classes:
            nu = c + shifts[(i_t, j_t)]
            if abs(nu - step.center_mhz) > step.width_mhz / 2:
                continue
            keep = np.exp(-step.strength * branching[i_t, j_t]) ** step.repetitions
            removed = pops[c][i_t] * (1 - keep)
            pops[c][i_t] *= keep
            weights = [branching[k, j_t] if k != i_t else 0.0 for k in range(3)]
            total = sum(weights)
            for k in range(3):
                if k != i_t:
                    pops[c][k] += removed * weights[k] / total
    envelope = line_depth(line, np.asarray(classes))
    depth = np.zeros(len(classes))
    arr = np.asarray(classes)
    for i in range(3):
        for j in range(3):
            level = np.asarray([pops[c][i] for c in classes])
            shifted = np.interp(arr - shifts[(i, j)], arr, level,
                                left=1 / 3, right=1 / 3)
            depth += branching[i, j] * shifted
    return depth * envelope


class TestBurnSequenceParsing:
    def test_from_mapping_round_trip(self):
        mapping = {
            "steps": [
                {"transition": "f2", "center_mhz": 0.0, "width_mhz": 200.0,
                 "strength": 8.0, "repetitions": 3},
                {"transition": "f0", "center_mhz": 1.0, "width_mhz": 10.0,
                 "pattern": "comb", "comb_delta_mhz": 0.5, "comb_finesse": 4.0,
                 "strength": 2.0},
            ]
        }
        seq = BurnSequence.from_mapping(mapping)
        assert len(seq.steps) == 2
        assert seq.steps[1].pattern == "comb"

    def test_unknown_keys_rejected(self):
        with pytest.raises(ValidationError):
            BurnSequence.from_mapping({"steps": [
                {"transition": "f0", "center_mhz": 0, "width_mhz": 1,
                 "strength": 1, "sweep_rate": 2}
            ]})

    def test_unknown_transition_rejected(self):
        with pytest.raises(ValidationError):
            BurnStep(transition="f3", center_mhz=0, width_mhz=1, strength=1)

    def test_comb_pattern_requires_geometry(self):
        with pytest.raises(ValidationError):
            BurnStep(transition="f0", center_mhz=0, width_mhz=1, strength=1,
                     pattern="comb")

    def test_scheme_shifts_must_be_small_vs_span(self, scheme, burn_line):
        small = FrequencyGrid(span_mhz=900.0, n_points=1024)
        seq = BurnSequence(steps=())
        with pytest.raises(ValidationError):
            simulate_hole_burning(seq, scheme, burn_line, small)
