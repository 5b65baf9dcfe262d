import math

import mpmath
import numpy as np
import pytest
import scipy.special as sc
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from weyllab import pnu
from weyllab.pnu import PnuContext


def _pnu_mpmath(nu, d, t):
    """Independent oracle: tanh-sinh quadrature in mpmath."""
    f = lambda xi: (1 - xi**2) ** mpmath.mpf((d + 1) / 2) * (1 / mpmath.pi - xi * t * mpmath.besselj(nu, xi * t) ** 2)
    return float(mpmath.quad(f, mpmath.linspace(0, 1, int(t) + 3)))


@pytest.mark.parametrize("nu", [0.0, 0.5, 2.0, 7.0])
def test_value_at_zero(nu):
    assert pnu.pnu_eval(PnuContext(nu, 1), 0.0) == pytest.approx(2 / (3 * math.pi), abs=1e-14)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_value_at_zero_any_dim(d):
    a = (d + 1) / 2
    ref = math.sqrt(math.pi) * math.gamma(a + 1) / (2 * math.gamma(a + 1.5)) / math.pi
    assert pnu.pnu_eval(PnuContext(0.3, d), 0.0) == pytest.approx(ref, abs=1e-12)


def test_half_order_cosine_form():
    ref = quad(lambda xi: (1 - xi * xi) * math.cos(10 * xi), 0, 1, epsabs=1e-14)[0] / math.pi
    assert pnu.pnu_eval(PnuContext(0.5, 1), 5.0) == pytest.approx(ref, abs=1e-9)


def test_half_order_two_paths():
    t = np.linspace(0.6, 60.0, 50)
    a = 2 * t
    closed = (2 / math.pi) * (np.sin(a) / a**3 - np.cos(a) / a**2)
    assert np.max(np.abs(pnu.pnu_eval(PnuContext(0.5, 1), t) - closed)) < 1e-9


@pytest.mark.parametrize("nu,d,t", [(0.0, 1, 3.0), (1.0, 2, 7.5), (2.0, 3, 0.7), (0.25, 2, 40.0), (1.7, 1, 120.0), (0.05, 3, 9.0)])
def test_eval_against_mpmath(nu, d, t):
    assert pnu.pnu_eval(PnuContext(nu, d), t) == pytest.approx(_pnu_mpmath(nu, d, t), abs=1e-9)


def test_context_validation():
    with pytest.raises(ValueError):
        PnuContext(1.0, 0)
    with pytest.raises(ValueError):
        PnuContext(1.0, 1, xi_rule=8)
    with pytest.raises(ValueError):
        pnu.pnu_eval(PnuContext(1.0, 1), -1.0)


@pytest.mark.parametrize("nu,d", [(0.0, 1), (1.0, 3), (2.0, 2)])
def test_partial_integral_against_quadrature(nu, d):
    ctx = PnuContext(nu, d)
    T = 20.0
    edges = np.linspace(0, T, 41)
    ref = sum(quad(lambda t: pnu.pnu_eval(ctx, t), a, b, epsabs=1e-13)[0] for a, b in zip(edges[:-1], edges[1:]))
    assert pnu.pnu_partial_integral(ctx, T) == pytest.approx(ref, abs=1e-9)


@pytest.mark.parametrize("nu", [0.0, 0.25, 0.5, 1.0, 2.0])
@pytest.mark.parametrize("d", [1, 2, 3])
def test_integral_identity(nu, d):
    assert abs(pnu.pnu_integral(PnuContext(nu, d)) - nu / 2) < 1e-3


def test_integral_details_metadata():
    res = pnu.pnu_integral_details(PnuContext(1.0, 1), 1e-3)
    assert res.T == pnu.truncation_point(1e-3) == 1e4
    assert res.tail_bound == pytest.approx(res.envelope / res.T)
    assert float(res) == res.value
    with pytest.raises(ValueError):
        pnu.pnu_integral(PnuContext(1.0, 1), 1e-7)


def test_truncation_point_rule():
    assert pnu.truncation_point(1.0) == 100.0
    assert pnu.truncation_point(1e-3) == 1e4
    assert pnu.truncation_point(0.05) == 400.0


def test_convergence_error_carries_bound():
    # a 1e-6 budget cannot be met at T <= 1e4 because the tail is ~ envelope / T
    with pytest.raises(pnu.PnuConvergenceError) as info:
        pnu.pnu_integral(PnuContext(2.0, 1), 1e-6)
    assert info.value.bound > 1e-6


@pytest.mark.parametrize("nu,d", [(nu, d) for nu in (0.0, 0.5, 1.0, 2.0) for d in (1, 2)])
def test_tail_envelope_stable_under_resampling(nu, d):
    ctx = PnuContext(nu, d)
    a = pnu.pnu_tail_envelope(ctx, 50, 500, samples=256)
    b = pnu.pnu_tail_envelope(ctx, 50, 500, samples=512)
    assert math.isfinite(a) and a > 0
    assert abs(b - a) / a < 0.2


def test_tail_envelope_monotone_in_set():
    ctx = PnuContext(0.5, 1)
    wide = pnu.pnu_tail_envelope(ctx, 50, 1000, samples=2000)
    # the narrower grid is a subset of the wider one only up to sampling, so compare on a common grid
    t = np.geomspace(50, 1000, 2000)
    vals = t * t * np.abs(pnu.pnu_eval(ctx, t))
    assert np.max(vals[t >= 100]) <= wide
    with pytest.raises(ValueError):
        pnu.pnu_tail_envelope(ctx, 5, 100)


@pytest.mark.parametrize("d", [1, 3])
def test_tail_bounded_uniformly_in_order(d):
    # t^2 |P| must not grow when the window moves out by 5x, for every nu in [0, 3]
    for nu in np.linspace(0, 3, 7):
        ctx = PnuContext(nu, d)
        near = pnu.pnu_tail_envelope(ctx, 50, 500, samples=128)
        far = pnu.pnu_tail_envelope(ctx, 250, 2500, samples=128)
        assert math.isfinite(near) and near < 10
        assert far <= 1.05 * near


@pytest.mark.parametrize("T", [20.0, 50.0, 100.0])
@pytest.mark.parametrize("nu,d", [(0.5, 1), (1.0, 2), (2.0, 3)])
def test_fubini_decomposition(T, nu, d):
    ctx, ctx1 = PnuContext(nu, d), PnuContext(nu + 1, d)
    lhs = pnu.pnu_partial_integral(ctx, T)
    bulk = 0.5 * T * (pnu.pnu_eval(ctx, T) + pnu.pnu_eval(ctx1, T))
    avg = pnu.abel_average(lambda s: sc.jv(nu, s) * sc.jv(nu + 1, s), (d + 1) / 2, T)
    assert lhs == pytest.approx(bulk + nu * avg, abs=1e-6)


def test_abel_trivial_cases():
    assert pnu.abel_average(np.ones_like, 1.0, 3.0) == pytest.approx(2.0, abs=1e-13)
    assert pnu.abel_average(np.zeros_like, 2.0, 10.0) == 0.0
    with pytest.raises(ValueError):
        pnu.abel_average(np.ones_like, 0.0, 1.0)


def test_abel_bessel_product():
    val = pnu.abel_average(lambda s: sc.jv(0.5, s) * sc.jv(1.5, s), 1.0, 400.0)
    assert abs(val - 0.5) < 5e-3


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([0.5, 1.0, 2.0]), st.sampled_from([5.0, 10.0, 20.0]))
def test_abel_dominated_convergence(alpha, T):
    # primitive of e^{-t} cos t tends to 1/2
    f = lambda t: np.exp(-t) * np.cos(t)
    e1 = abs(pnu.abel_average(f, alpha, T) - 0.5)
    e4 = abs(pnu.abel_average(f, alpha, 4 * T) - 0.5)
    assert e4 <= 0.5 * e1
