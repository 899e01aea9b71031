import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy import integrate, stats

from hom_superres.wavepacket import (
    GaussianWavepacket,
    TabulatedWavepacket,
    WavepacketError,
    build_envelope,
    sigma_k_of,
)


def test_gaussian_envelope_peak(gauss):
    assert build_envelope(gauss)(0.0) == pytest.approx(1 / math.sqrt(4 * math.pi), rel=1e-12)
    assert build_envelope(gauss)(0.0) == pytest.approx(0.2820948, abs=1e-7)


def test_gaussian_second_moment(gauss):
    env = build_envelope(gauss)
    assert env.second_moment == 2.0
    val, _ = integrate.quad(lambda x: x**2 * env(x), -np.inf, np.inf)
    assert val == pytest.approx(2.0, rel=1e-10)


@pytest.mark.parametrize("sigma_k", [0.3, 1.0, 2.5])
def test_gaussian_envelope_normalised_and_supported(sigma_k):
    env = GaussianWavepacket(sigma_k).envelope
    total, _ = integrate.quad(env, -np.inf, np.inf)
    assert total == pytest.approx(1.0, abs=1e-8)
    b = env.support_halfwidth
    inside, _ = integrate.quad(env, -b, b, epsabs=1e-14)
    assert 1 - inside <= 1e-10 * 1.01
    # smallest such bound: shrinking it loses mass
    smaller, _ = integrate.quad(env, -0.99 * b, 0.99 * b, epsabs=1e-14)
    assert 1 - smaller > 1e-10


def test_tabulated_envelope_matches_closed_form(tab_gauss, gauss):
    x = np.linspace(-12, 12, 4001)
    assert np.max(np.abs(tab_gauss.envelope(x) - gauss.envelope(x))) < 1e-6


def test_sigma_k_of():
    assert sigma_k_of(GaussianWavepacket(1.5)) == 1.5


def test_sigma_k_of_tabulated_gaussian(tab_gauss):
    assert sigma_k_of(tab_gauss) == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("a", [0.5, 1.0, 3.0])
def test_sigma_k_of_uniform(a):
    k = np.linspace(-a, a, 2048)
    spec = TabulatedWavepacket(k, np.ones_like(k))
    assert sigma_k_of(spec) == pytest.approx(a / math.sqrt(3), abs=1e-6)


def test_tabulated_normalised_by_trapezoid():
    k = np.linspace(-2, 2, 100)
    spec = TabulatedWavepacket(k, 7.0 * np.exp(-(k**2)))
    assert integrate.trapezoid(spec.amplitude_sq, spec.grid) == pytest.approx(1.0, abs=1e-12)


def test_non_centred_intensity_gives_same_envelope():
    k = np.linspace(-10, 10, 2048)
    centred = TabulatedWavepacket(k, stats.norm.pdf(k, loc=0.0))
    shifted = TabulatedWavepacket(k, stats.norm.pdf(k, loc=1.7))
    x = np.linspace(-8, 8, 801)
    assert np.max(np.abs(centred.envelope(x) - shifted.envelope(x))) < 1e-9
    assert shifted.sigma_k == pytest.approx(centred.sigma_k, abs=1e-9)


@pytest.mark.parametrize(
    "grid, amp, match",
    [
        (np.linspace(0, 1, 20), np.zeros(20), "normalisable"),
        (np.linspace(0, 1, 8), np.ones(8), ">= 16"),
        (np.r_[np.linspace(0, 1, 19), 0.5], np.ones(20), "increasing"),
        (np.linspace(0, 1, 20), -np.ones(20), "nonnegative"),
        (np.linspace(0, 1, 20), np.r_[np.ones(19), np.nan], "finite"),
    ],
)
def test_tabulated_rejects_bad_input(grid, amp, match):
    with pytest.raises(WavepacketError, match=match):
        TabulatedWavepacket(grid, amp)


def test_gaussian_rejects_bad_sigma():
    with pytest.raises(WavepacketError):
        GaussianWavepacket(0.0)


def test_csv_loader(tmp_path, tab_gauss):
    path = tmp_path / "wp.csv"
    lines = ["k,amplitude_sq"] + [f"{float(k)!r},{float(a)!r}" for k, a in zip(tab_gauss.grid, tab_gauss.amplitude_sq)]
    path.write_text("\n".join(lines) + "\n")
    spec = TabulatedWavepacket.from_csv(path)
    assert np.array_equal(spec.grid, tab_gauss.grid)
    assert spec.sigma_k == pytest.approx(tab_gauss.sigma_k, rel=1e-12)
    assert spec.source == str(path)


def test_csv_loader_requires_header(tmp_path):
    path = tmp_path / "wp.csv"
    path.write_text("\n".join(f"{k},{1.0}" for k in range(20)) + "\n")
    with pytest.raises(WavepacketError, match="header"):
        TabulatedWavepacket.from_csv(path)


def test_lattice_sampler_matches_envelope(tab_gauss):
    rng = np.random.default_rng(3)
    draws = tab_gauss.envelope.sample(rng, 200_000)
    # normal with variance 2 sigma_k^2
    assert stats.kstest(draws, "norm", args=(0, math.sqrt(2))).pvalue > 0.01


intensities = arrays(
    np.float64,
    st.integers(16, 80),
    elements=st.floats(0.0, 10.0, allow_nan=False, allow_infinity=False),
).filter(lambda a: a.sum() > 1e-3)


# PCHIP slope weights overflow harmlessly on near-zero neighbouring values
@pytest.mark.filterwarnings("ignore:overflow encountered:RuntimeWarning")
@settings(max_examples=40, deadline=None)
@given(amp=intensities, width=st.floats(0.5, 20.0), offset=st.floats(-5.0, 5.0))
def test_random_tabulated_envelope_properties(amp, width, offset):
    grid = np.linspace(offset - width / 2, offset + width / 2, amp.size)
    spec = TabulatedWavepacket(grid, amp)
    env = spec.envelope
    # normalisation of the piecewise-linear density
    assert integrate.trapezoid(env.values, env.lags) == pytest.approx(1.0, abs=1e-8)
    x = np.linspace(-width, width, 257)
    assert np.max(np.abs(env(x) - env(-x))) <= 1e-10
    assert env.second_moment == pytest.approx(2 * spec.sigma_k**2, abs=1e-6)
