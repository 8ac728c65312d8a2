import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jacbeam.channel import far_field_channel, quadratic_channel
from jacbeam.codebooks import (
    de_shape,
    dft_codebook,
    jac_codebook,
    polar_codebook,
    re_shape,
    shaping_vector,
)
from jacbeam.geometry import ArrayConfig, NearFieldParams, fresnel_lower_bound, sine_grid


def test_dft_grid_small():
    book = dft_codebook(ArrayConfig.half_wavelength(4, 60e9))
    assert len(book) == 4 and book.overhead == 4
    np.testing.assert_allclose(book.u, [-0.75, -0.25, 0.25, 0.75], atol=1e-15)


@pytest.mark.parametrize("n", [4, 7, 64, 800])
def test_dft_orthonormal(n):
    w = math.sqrt(n) * dft_codebook(ArrayConfig.half_wavelength(n, 28e9)).weights
    np.testing.assert_allclose(w @ w.conj().T, np.eye(n), atol=1e-10)


def test_dft_broadside_codeword(cfg800):
    # 1-based codeword 400 is index 399
    assert dft_codebook(cfg800)[399].u == pytest.approx(-0.00125, abs=1e-15)


@pytest.mark.parametrize("make", [
    lambda c: dft_codebook(c),
    lambda c: jac_codebook(c, 0.013),
    lambda c: polar_codebook(c, 3),
])
def test_codeword_modulus(cfg64, make):
    np.testing.assert_allclose(np.abs(make(cfg64).weights), 1 / 64, rtol=1e-13)


def test_shaping_vector(cfg8):
    np.testing.assert_array_equal(shaping_vector(cfg8, 0.0).samples, np.ones(8))
    s1, s2 = shaping_vector(cfg8, 0.03).samples, shaping_vector(cfg8, 0.06).samples
    np.testing.assert_allclose(s2, s1**2, atol=1e-14)
    k = 2 * math.pi / cfg8.wavelength
    for n in range(1, 9):
        xn = (n - 4.5) * cfg8.spacing
        assert shaping_vector(cfg8, 0.01).samples[n - 1] == pytest.approx(np.exp(1j * k * 0.01 * xn * xn / 2), abs=1e-15)
    with pytest.raises(ValueError):
        shaping_vector(cfg8, -1e-3)


def test_jac_degenerates_to_dft(cfg800):
    dft, jac = dft_codebook(cfg800), jac_codebook(cfg800, 0.0)
    assert jac.weights.tobytes() == dft.weights.tobytes()
    assert jac.overhead == 801 and dft.overhead == 800


def test_jac_matched_channel_reaches_unity(cfg800):
    u = sine_grid(800)
    book = jac_codebook(cfg800, 0.02)
    # codeword m steers to sin(theta) = u_m, i.e. p2 = -u_m
    h = quadratic_channel(cfg800, NearFieldParams(0.02, -u[123]))
    assert abs(book.weights[123] @ h.samples) == pytest.approx(1.0, abs=1e-12)


def test_jac_argmax_lands_on_matched_codeword(cfg64):
    rng = np.random.default_rng(5)
    u = sine_grid(64)
    for p1, m in zip(rng.uniform(0.0, 0.1, 100), rng.integers(0, 64, 100)):
        h = quadratic_channel(cfg64, NearFieldParams(p1, -u[m]))
        powers = np.abs(jac_codebook(cfg64, p1).weights @ h.samples) ** 2
        # brute force over every codeword
        assert int(np.argmax(powers)) == m


def test_polar_single_ring_is_dft(cfg64):
    assert polar_codebook(cfg64, 1).weights.tobytes() == dft_codebook(cfg64).weights.tobytes()


def test_polar_shape(cfg8):
    book = polar_codebook(cfg8, 4)
    assert len(book) == 32 and book.overhead == 32
    np.testing.assert_allclose(np.abs(book.weights), 1 / 8, rtol=1e-13)
    assert sorted(set(book.ring.tolist())) == [0, 1, 2, 3]


def test_polar_adjacent_rings_decorrelated(cfg800):
    book = polar_codebook(cfg800)
    assert book.p1.max() == pytest.approx(1 / fresnel_lower_bound(cfg800))
    n = 800
    for s in range(7):
        for m in (0, 399, 799):
            a, b = book.weights[s * n + m], book.weights[(s + 1) * n + m]
            corr = abs(np.vdot(n * a, n * b)) / n
            assert corr < 0.7


def test_polar_guards(cfg8):
    with pytest.raises(ValueError):
        polar_codebook(cfg8, 0)
    with pytest.raises(OverflowError):
        polar_codebook(ArrayConfig.half_wavelength(4096, 60e9), 20)


def test_de_shape_matched(cfg800):
    h = quadratic_channel(cfg800, NearFieldParams(0.03, 0.4))
    flat = de_shape(cfg800, h, 0.03)
    ref = quadratic_channel(cfg800, NearFieldParams(0.0, 0.4))
    assert np.max(np.abs(flat.samples - ref.samples)) < 1e-12


def test_de_shape_identity_and_inverse(cfg800):
    h = quadratic_channel(cfg800, NearFieldParams(0.01, -0.2))
    np.testing.assert_array_equal(de_shape(cfg800, h, 0.0).samples, h.samples)
    back = re_shape(cfg800, de_shape(cfg800, h, 0.023), 0.023)
    assert np.max(np.abs(back.samples - h.samples)) < 1e-15


@settings(max_examples=60, deadline=None)
@given(st.floats(0.0, 0.05), st.floats(-0.95, 0.95), st.integers(0, 63))
def test_focused_cross_correlation_matches_far_field(p1, p2, i):
    cfg = ArrayConfig.half_wavelength(64, 60e9)
    near = abs(jac_codebook(cfg, p1).weights[i] @ quadratic_channel(cfg, NearFieldParams(p1, p2)).samples)
    far = abs(dft_codebook(cfg).weights[i] @ far_field_channel(cfg, math.asin(-p2)).samples)
    assert near == pytest.approx(far, abs=1e-12)
