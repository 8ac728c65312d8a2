import cmath
import math

import mpmath
import numpy as np
import pytest

from jacbeam.channel import (
    NoiseSpec,
    FresnelViolation,
    add_noise,
    exact_channel,
    far_field_channel,
    phase_error_quadratic,
    quadratic_channel,
    spatial_spectrum,
)
from jacbeam.geometry import (
    ArrayConfig,
    NearFieldParams,
    UserPosition,
    fresnel_lower_bound,
    params_from_position,
    rayleigh_distance,
    sine_grid,
)


def test_exact_channel_broadside_infinity(cfg800):
    h = exact_channel(cfg800, UserPosition(0.0, 1e10))
    np.testing.assert_allclose(h.samples, 1.0, atol=1e-6)


def test_exact_channel_two_element_symmetry():
    cfg = ArrayConfig.half_wavelength(2, 60e9)
    h = exact_channel(cfg, UserPosition(0.0, 3.0))
    assert h.samples[0] == h.samples[1]


def test_exact_channel_against_extended_precision(cfg800):
    pos = UserPosition.from_polar(100.0, math.pi / 6)
    h = exact_channel(cfg800, pos)
    mpmath.mp.dps = 40
    px, pz = mpmath.mpf(100) * mpmath.sin(mpmath.pi / 6), mpmath.mpf(100) * mpmath.cos(mpmath.pi / 6)
    lam = mpmath.mpf(299792458) / mpmath.mpf(60e9)
    k = 2 * mpmath.pi / lam
    d = lam / 2
    for n in range(1, 801, 17):
        xn = (n - mpmath.mpf(801) / 2) * d
        phase = k * (mpmath.sqrt((px - xn) ** 2 + pz**2) - mpmath.mpf(100))
        ref = complex(mpmath.cos(phase), mpmath.sin(phase))
        assert abs(h.samples[n - 1] - ref) < 1e-10


def test_exact_channel_rejects_inside_fresnel(cfg800):
    with pytest.raises(FresnelViolation):
        exact_channel(cfg800, UserPosition(0.0, 10.0))


def test_unit_modulus(cfg800):
    rng = np.random.default_rng(3)
    bound = fresnel_lower_bound(cfg800)
    for r, th in zip(rng.uniform(bound, 2000, 20), rng.uniform(-1.2, 1.2, 20)):
        pos = UserPosition.from_polar(r, th)
        for h in (exact_channel(cfg800, pos), quadratic_channel(cfg800, params_from_position(cfg800, pos))):
            np.testing.assert_allclose(np.abs(h.samples), 1.0, rtol=0, atol=1e-12)


def test_quadratic_channel_examples(cfg8):
    np.testing.assert_array_equal(quadratic_channel(cfg8, NearFieldParams(0.0, 0.0)).samples, np.ones(8))
    h = quadratic_channel(cfg8, NearFieldParams(0.01, 0.0))
    k = 2 * math.pi / cfg8.wavelength
    for n in range(1, 9):
        xn = (n - 4.5) * cfg8.spacing
        assert h.samples[n - 1] == pytest.approx(cmath.exp(1j * k * 0.005 * xn * xn), abs=1e-15)


@pytest.mark.parametrize("theta", [0.0, 0.3, -1.0, 1.4])
def test_quadratic_degenerates_to_far_field(cfg800, theta):
    q = quadratic_channel(cfg800, NearFieldParams(0.0, -math.sin(theta)))
    f = far_field_channel(cfg800, theta)
    assert np.max(np.abs(q.samples - f.samples)) == 0.0


def test_far_field_channel(cfg800):
    np.testing.assert_array_equal(far_field_channel(cfg800, 0.0).samples, np.ones(800))
    a, b = far_field_channel(cfg800, 0.4), far_field_channel(cfg800, -0.4)
    np.testing.assert_allclose(b.samples, np.conj(a.samples), rtol=0, atol=1e-15)
    cfg = ArrayConfig.half_wavelength(4, 60e9)
    h = far_field_channel(cfg, math.pi / 6)
    k = 2 * math.pi / cfg.wavelength
    for n in range(4):
        assert h.samples[n] == pytest.approx(cmath.exp(-1j * k * cfg.positions[n] / 2), abs=1e-15)
    with pytest.raises(ValueError):
        far_field_channel(cfg, math.pi / 2)


def test_quadratic_term_at_rayleigh_distance(cfg800):
    r = rayleigh_distance(cfg800)
    x = cfg800.positions
    term = cfg800.wavenumber * x**2 / (2 * r)
    assert term.max() <= math.pi / 8
    # the bound is tight: the aperture edge sits half a spacing inside D/2
    assert term.max() == pytest.approx(math.pi / 8, rel=3e-3)


def test_phase_error_vanishes_far_away(cfg800):
    assert phase_error_quadratic(cfg800, UserPosition.from_polar(1e7, 0.7)) < 1e-9


def _sweep_max_error(cfg, r):
    return max(phase_error_quadratic(cfg, UserPosition.from_polar(r, th)) for th in np.linspace(-1.5, 1.5, 301))


def test_phase_error_near_fresnel_bound(cfg800):
    bound = fresnel_lower_bound(cfg800)
    # 0.62 is a rounded constant: at the bound itself the worst angle overshoots pi/8 by ~1%
    assert _sweep_max_error(cfg800, bound) < 1.01 * math.pi / 8
    assert _sweep_max_error(cfg800, 1.005 * bound) < math.pi / 8


def test_phase_error_random_annulus(cfg800):
    rng = np.random.default_rng(11)
    lo, hi = fresnel_lower_bound(cfg800), rayleigh_distance(cfg800)
    for r, th in zip(rng.uniform(lo, hi, 100), rng.uniform(-math.pi / 2, math.pi / 2, 100)):
        assert phase_error_quadratic(cfg800, UserPosition.from_polar(r, th)) < math.pi / 8 + 1e-6


def test_noise_infinite_snr_scales_only(cfg64):
    h = quadratic_channel(cfg64, NearFieldParams(0.02, 0.1))
    r = add_noise(h, NoiseSpec(math.inf, tx_power=4.0, seed=1))
    np.testing.assert_array_equal(r.samples, 2.0 * h.samples)


def test_noise_deterministic(cfg64):
    h = quadratic_channel(cfg64, NearFieldParams(0.02, 0.1))
    spec = NoiseSpec(10.0, seed=123)
    assert add_noise(h, spec).samples.tobytes() == add_noise(h, spec).samples.tobytes()
    assert add_noise(h, spec, 1).samples.tobytes() != add_noise(h, spec).samples.tobytes()


def test_noise_variance(cfg800):
    spec = NoiseSpec(20.0, seed=0)
    sigma2 = 1.0 * 800 / 100.0
    assert spec.noise_var(800) == pytest.approx(sigma2)
    zero = quadratic_channel(cfg800, NearFieldParams(0.0, 0.0)).with_samples(np.zeros(800))
    acc = 0.0
    trials = 10_000
    for t in range(trials):
        acc += np.mean(np.abs(add_noise(zero, NoiseSpec(20.0, seed=t)).samples) ** 2)
    assert acc / trials == pytest.approx(sigma2, rel=0.02)


def test_spatial_spectrum_indicator(cfg64):
    u = sine_grid(64)
    for m in (0, 17, 40, 63):
        spec = spatial_spectrum(cfg64, far_field_channel(cfg64, math.asin(u[m])))
        expected = np.zeros(64)
        expected[m] = 1.0
        np.testing.assert_allclose(spec, expected, rtol=0, atol=1e-12)


def test_spatial_spectrum_all_ones_odd_array():
    # only an odd-length grid contains sin(theta) = 0
    cfg = ArrayConfig.half_wavelength(9, 60e9)
    ones = far_field_channel(cfg, 0.0)
    expected = np.zeros(9)
    expected[4] = 1.0
    np.testing.assert_allclose(spatial_spectrum(cfg, ones), expected, rtol=0, atol=1e-12)


def test_spatial_spectrum_two_paths(cfg64):
    u = sine_grid(64)
    a, b = far_field_channel(cfg64, math.asin(u[5])), far_field_channel(cfg64, math.asin(u[50]))
    spec = spatial_spectrum(cfg64, a.with_samples(a.samples + b.samples))
    expected = np.zeros(64)
    expected[[5, 50]] = 1.0
    np.testing.assert_allclose(spec, expected, rtol=0, atol=1e-12)
