import pytest

from afcsim import CombParams, HyperfineScheme, SpinParams, gaussian_pulse


@pytest.fixture
def scheme():
    # representative hyperfine fixture; offsets and branching are
    # configuration inputs, not package defaults
    return HyperfineScheme(
        ground_offsets_mhz=(0.0, 34.5, 80.7),
        excited_offsets_mhz=(0.0, 102.0, 177.0),
        branching=(
            (0.02, 0.25, 0.73),
            (0.07, 0.68, 0.25),
            (0.91, 0.07, 0.02),
        ),
    )


@pytest.fixture
def paper_comb():
    return CombParams(
        delta_mhz=0.125,
        finesse=4.0,
        bandwidth_mhz=2.0,
        peak_depth=0.9,
        tooth_shape="square",
        background_depth=0.0,
    )


@pytest.fixture
def input_pulse():
    return gaussian_pulse(fwhm_us=0.75, peak_time_us=5.0, dt_us=0.02, n_samples=2048)


@pytest.fixture
def spin_params():
    return SpinParams(
        gamma_s_mhz=0.033, eta_transfer=0.583, tau_c_us=2.5, tau_s_us=2.5
    )
