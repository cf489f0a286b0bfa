import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from activeirs import metrics
from activeirs.channel import ChannelRealization, SystemParams
from activeirs.metrics import BeamVector

from conftest import default_channel, random_channel

SCALAR = SystemParams(p_s=1.0, p_i=2.0, sigma_i_sq=1.0, sigma_u_sq=1.0, n=1)


def test_reflect_power_trivial(unit_channel):
    assert metrics.reflect_power(np.zeros(1), unit_channel, SCALAR) == 0.0
    assert metrics.reflect_power(np.ones(1), unit_channel, SCALAR) == 2.0


def test_reflect_power_dimension_error(unit_channel):
    with pytest.raises(ValueError):
        metrics.reflect_power(np.ones(2), unit_channel, SCALAR)


def test_compute_lambda_scalar(unit_channel):
    assert metrics.compute_lambda(np.ones(1), unit_channel, SCALAR) == pytest.approx(1.0)


def test_compute_lambda_no_reflection():
    ch = ChannelRealization(np.zeros(3), np.ones(3), 1.0)
    params = SystemParams(p_s=1.0, p_i=5.0, sigma_i_sq=0.5, sigma_u_sq=1.0, n=3)
    p_bar = np.ones(3) / math.sqrt(3)
    assert metrics.compute_lambda(p_bar, ch, params) == pytest.approx(math.sqrt(10.0))


def test_compute_lambda_requires_unit(unit_channel):
    with pytest.raises(ValueError):
        metrics.compute_lambda(np.array([2.0]), unit_channel, SCALAR)


def _bisect_lambda(p_bar, ch, params):
    lo, hi = 0.0, 1.0
    while metrics.reflect_power(hi * p_bar, ch, params) < params.p_i:
        hi *= 2
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if metrics.reflect_power(mid * p_bar, ch, params) < params.p_i:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_compute_lambda_matches_bisection():
    ch, params = default_channel(4, seed=11)
    rng = np.random.default_rng(3)
    p_bar = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    p_bar /= np.linalg.norm(p_bar)
    lam = metrics.compute_lambda(p_bar, ch, params)
    assert lam == pytest.approx(_bisect_lambda(p_bar, ch, params), rel=1e-12)
    assert metrics.reflect_power(lam * p_bar, ch, params) == pytest.approx(params.p_i, rel=1e-10)


def test_snr_trivial_cases():
    params = SystemParams(p_s=2.0, p_i=1.0, sigma_i_sq=1.0, sigma_u_sq=0.5, n=2)
    ch = ChannelRealization([1, 1j], [1, 1], 1 + 1j)
    assert metrics.snr(np.zeros(2), ch, params) == pytest.approx(2.0 * 2.0 / 0.5)
    dead = ChannelRealization([1, 1j], [0, 0], 0)
    assert metrics.snr(np.ones(2), dead, params) == 0.0
    assert metrics.rate(np.zeros(2), dead, params) == 0.0


def test_snr_and_rate_scalar(unit_channel, unit_params):
    p = np.array([math.sqrt(1.5)])
    # (1 + sqrt(1.5))^2 / 2.5 and log2(1 + that), 30-digit mpmath
    assert metrics.snr(p, unit_channel, unit_params) == pytest.approx(1.97979589711327124, rel=1e-13)
    assert metrics.rate(p, unit_channel, unit_params) == pytest.approx(1.57521351581937321, rel=1e-13)


def test_rate_one_bit():
    params = SystemParams(p_s=1.0, p_i=1.0, sigma_i_sq=1.0, sigma_u_sq=1.0, n=1)
    ch = ChannelRealization([0], [0], 1.0)
    assert metrics.rate(np.zeros(1), ch, params) == pytest.approx(1.0)


def test_rsnr_trivial(unit_channel):
    params = SystemParams(p_s=1.0, p_i=1.0, sigma_i_sq=1.0, sigma_u_sq=1.0, n=1)
    assert metrics.rsnr(np.ones(1), unit_channel, params, 1.0) == pytest.approx(0.5)
    ch = ChannelRealization([1, 2], [0, 0], 1.0)
    assert metrics.rsnr(np.ones(2), ch, params.with_n(2), 1.0) == 0.0
    with pytest.raises(ValueError):
        metrics.rsnr(np.zeros(1), unit_channel, params, 1.0)


def test_ssnr_no_reflected_link():
    params = SystemParams(p_s=3.0, p_i=1.0, sigma_i_sq=1.0, sigma_u_sq=0.5, n=2)
    ch = ChannelRealization([1, 2], [0, 0], 0.5j)
    p_bar = np.array([1, 1j]) / math.sqrt(2)
    assert metrics.ssnr(p_bar, 7.0, ch, params) == pytest.approx(3.0 * 0.25 / 0.5)


def test_ssnr_equals_rsnr_without_direct_link():
    rng = np.random.default_rng(5)
    ch = random_channel(rng, 5, h_scale=0.0)
    params = SystemParams(p_s=2.0, p_i=1.0, sigma_i_sq=0.3, sigma_u_sq=0.7, n=5)
    p = rng.standard_normal(5) + 1j * rng.standard_normal(5)
    p /= np.linalg.norm(p)
    assert metrics.ssnr(p, 1.0, ch, params) == pytest.approx(metrics.rsnr(p, ch, params, 1.0), rel=1e-13)


@pytest.mark.parametrize("seed", range(20))
def test_snr_is_ssnr_plus_cross_term(seed):
    rng = np.random.default_rng(seed)
    ch = random_channel(rng, 3)
    params = SystemParams(p_s=1.7, p_i=2.2, sigma_i_sq=0.4, sigma_u_sq=0.9, n=3)
    p_bar = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    p_bar /= np.linalg.norm(p_bar)
    lam = metrics.compute_lambda(p_bar, ch, params)
    p = lam * p_bar
    # element-by-element expansion of |h* + sum conj(f_n) g_n p_n|^2
    refl = sum(np.conj(ch.f[i]) * ch.g[i] * p[i] for i in range(3))
    cross = 2 * (refl * ch.h).real
    fp = sum(np.conj(ch.f[i]) * p[i] for i in range(3))
    den = params.sigma_i_sq * abs(fp) ** 2 + params.sigma_u_sq
    ssnr_num = metrics.ssnr(p_bar, lam, ch, params) * den
    assert metrics.snr(p, ch, params) == pytest.approx((ssnr_num + params.p_s * cross) / den, rel=1e-10)


def test_beam_vector_roundtrip():
    b = BeamVector.from_vector(np.array([3, 4j]))
    assert b.lam == 5.0
    assert np.linalg.norm(b.p_bar) == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(b.lam * b.p_bar, b.p, atol=1e-12)


complex_vec = st.lists(st.tuples(st.floats(-3, 3), st.floats(-3, 3)), min_size=4, max_size=4)


@settings(max_examples=60, deadline=None)
@given(complex_vec, st.integers(0, 2**32 - 1))
def test_power_consistency(entries, seed):
    p_bar = np.array([a + 1j * b for a, b in entries])
    if np.linalg.norm(p_bar) < 1e-3:
        return
    p_bar /= np.linalg.norm(p_bar)
    ch, params = default_channel(4, seed)
    lam = metrics.compute_lambda(p_bar, ch, params)
    assert metrics.reflect_power(lam * p_bar, ch, params) == pytest.approx(params.p_i, rel=1e-10)


@settings(max_examples=60, deadline=None)
@given(st.floats(-math.pi, math.pi), st.integers(0, 2**32 - 1))
def test_phase_invariance(theta, seed):
    rng = np.random.default_rng(seed)
    ch = random_channel(rng, 4)
    params = SystemParams(p_s=1.0, p_i=1.0, sigma_i_sq=0.5, sigma_u_sq=0.5, n=4)
    p = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    p_bar = p / np.linalg.norm(p)
    rot = np.exp(1j * theta)
    assert metrics.rsnr(p * rot, ch, params, 1.3) == pytest.approx(metrics.rsnr(p, ch, params, 1.3), rel=1e-12)
    assert metrics.ssnr(p_bar * rot, 1.3, ch, params) == pytest.approx(
        metrics.ssnr(p_bar, 1.3, ch, params), rel=1e-12)
    no_direct = ChannelRealization(ch.g, ch.f, 0.0)
    assert metrics.snr(p * rot, no_direct, params) == pytest.approx(
        metrics.snr(p, no_direct, params), rel=1e-12)


@given(st.floats(0, 1e6), st.floats(0, 1e6))
def test_rate_monotone_in_snr(a, b):
    params = SystemParams(p_s=1.0, p_i=1.0, sigma_i_sq=1.0, sigma_u_sq=1.0, n=1)

    def at(s):
        # direct link only: snr == |h|^2
        ch = ChannelRealization([0], [0], math.sqrt(s))
        return metrics.snr(np.zeros(1), ch, params), metrics.rate(np.zeros(1), ch, params)

    (sa, ra), (sb, rb) = at(a), at(b)
    if sa < sb:
        assert ra <= rb


def test_rate_strictly_increasing_on_grid():
    params = SystemParams(p_s=1.0, p_i=1.0, sigma_i_sq=1.0, sigma_u_sq=1.0, n=1)
    rates = [metrics.rate(np.zeros(1), ChannelRealization([0], [0], math.sqrt(s)), params)
             for s in np.logspace(-8, 8, 200)]
    assert np.all(np.diff(rates) > 0)


def test_align_phase_targets_direct_channel():
    rng = np.random.default_rng(1)
    ch = random_channel(rng, 6)
    p = metrics.align_phase(rng.standard_normal(6) + 0j, ch)
    assert np.angle(np.vdot(ch.f, ch.g * p)) == pytest.approx(np.angle(np.conj(ch.h)), abs=1e-12)
