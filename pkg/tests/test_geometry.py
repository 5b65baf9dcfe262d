import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.optimize import minimize_scalar

from weyllab import geometry
from weyllab.geometry import BoundaryField, ChartError, Disk, Interval, StarDomain


def _dense_boundary_dist(dom, x, n=20_000):
    """Oracle: nearest point over a dense boundary sample, polished by bounded 1-D minimization."""
    th = np.linspace(0, 2 * math.pi, n, endpoint=False)
    d = np.linalg.norm(dom.boundary_point(th) - x, axis=-1)
    k = int(np.argmin(d))
    step = 2 * math.pi / n
    res = minimize_scalar(
        lambda t: float(np.linalg.norm(dom.boundary_point(t) - x)),
        bounds=(th[k] - 2 * step, th[k] + 2 * step),
        method="bounded",
        options={"xatol": 1e-13},
    )
    return float(res.fun)


def _chart_points(chart, n, seed):
    rng = np.random.default_rng(seed)
    r = chart.ell * np.sqrt(rng.uniform(0, 1, 6 * n))
    a = rng.uniform(0, 2 * math.pi, 6 * n)
    pts = chart.x0 + np.stack([r * np.cos(a), r * np.sin(a)], axis=-1)
    return pts[np.asarray(chart.dom.contains(pts))][:n]


# distances


def test_distance_examples():
    assert geometry.dist_to_boundary(Interval(0, 1), 0.3) == pytest.approx(0.3)
    assert geometry.dist_to_boundary(Disk(1.0), np.array([0.6, 0.0])) == pytest.approx(0.4)
    circle = StarDomain((1.0,))
    assert geometry.dist_to_boundary(circle, np.array([0.2, 0.1])) == pytest.approx(1 - math.sqrt(0.05), abs=1e-12)


def test_signed_distance_examples():
    assert geometry.signed_distance(Interval(0, 1), 0.3) == pytest.approx(0.3)
    assert geometry.signed_distance(Interval(0, 1), -0.2) == pytest.approx(-0.2)
    assert geometry.signed_distance(Disk(1.0), np.array([2.0, 0.0])) == pytest.approx(-1.0)


def test_distance_zero_on_boundary():
    assert geometry.dist_to_boundary(Interval(0, 1), 1.0) == 0.0
    disk = Disk(1.3, (0.2, -0.1))
    assert np.max(geometry.dist_to_boundary(disk, disk.boundary_point(np.linspace(0, 6, 50)))) < 1e-12
    star = StarDomain((1.0, 0.1, 0.05))
    assert np.max(geometry.dist_to_boundary(star, star.boundary_point(np.linspace(0, 6, 50)))) < 1e-12


@pytest.mark.parametrize("coeffs", [(1.0, 0.1), (1.0, 0.0, 0.15), (1.2, 0.1, -0.05, 0.03)])
def test_star_distance_against_dense_sampling(coeffs):
    star = StarDomain(coeffs)
    rng = np.random.default_rng(3)
    pts = rng.uniform(-1.4, 1.4, (40, 2))
    got = geometry.dist_to_boundary(star, pts)
    ref = np.array([_dense_boundary_dist(star, p) for p in pts])
    assert np.max(np.abs(got - ref)) < 1e-9


@settings(max_examples=60, deadline=None)
@given(st.floats(-2.0, 2.0), st.floats(-2.0, 2.0))
def test_signed_distance_split(x, y):
    for dom in (Disk(1.0, (0.1, 0.0)), StarDomain((1.0, 0.1))):
        p = np.array([x, y])
        sd = float(dom.signed_distance(p))
        d = float(geometry.dist_to_boundary(dom, p))
        assert abs(abs(sd) - d) < 1e-12
        assert (sd > 0) == bool(dom.contains(p))


@settings(max_examples=100, deadline=None)
@given(st.floats(-1.0, 2.0))
def test_interval_signed_distance_split(u):
    dom = Interval(0, 1)
    sd = geometry.signed_distance(dom, u)
    assert abs(sd) == pytest.approx(geometry.dist_to_boundary(dom, u))
    assert (sd > 0) == (0 < u < 1)


def test_distance_gradient_unit_and_fd():
    star = StarDomain((1.0, 0.12))
    rng = np.random.default_rng(5)
    pts = rng.uniform(-0.6, 0.6, (30, 2))
    pts = pts[star.contains(pts)]
    g = star.distance_gradient(pts)
    assert np.allclose(np.linalg.norm(g, axis=-1), 1.0)
    h = 1e-6
    fd = np.stack(
        [(star.signed_distance(pts + e) - star.signed_distance(pts - e)) / (2 * h) for e in (np.array([h, 0]), np.array([0, h]))],
        axis=-1,
    )
    assert np.max(np.abs(fd - g)) < 1e-5
    assert Interval(0, 1).distance_gradient(0.5) == 1.0


# boundary integrals and measures


def test_boundary_integral_examples():
    assert geometry.boundary_integral(Interval(0, 1), lambda x: 0.5) == pytest.approx(1.0)
    assert geometry.boundary_integral(Disk(1.0), lambda p: np.ones(len(p))) == pytest.approx(2 * math.pi, abs=1e-12)


def test_star_arclength_against_quad():
    star = StarDomain((1.0, 0.1))
    ref = quad(lambda t: math.hypot(star.rho(t), star.rho_prime(t)), 0, 2 * math.pi, epsabs=1e-14, limit=200)[0]
    assert geometry.boundary_integral(star, lambda p: np.ones(len(p))) == pytest.approx(ref, abs=1e-10)
    area = quad(lambda t: 0.5 * star.rho(t) ** 2, 0, 2 * math.pi, epsabs=1e-14)[0]
    assert star.measure == pytest.approx(area, abs=1e-12)


def test_disk_boundary_integral_nonconstant():
    disk = Disk(2.0, (1.0, -1.0))
    # int x^2 ds over a circle of radius R centered at c = (2 pi R)(c_x^2 + R^2 / 2)
    val = geometry.boundary_integral(disk, lambda p: p[:, 0] ** 2)
    assert val == pytest.approx(2 * math.pi * 2.0 * (1.0 + 2.0), abs=1e-10)


def test_domain_validation():
    with pytest.raises(ValueError):
        Interval(1, 0)
    with pytest.raises(ValueError):
        Disk(0.0)
    with pytest.raises(ValueError):
        StarDomain((0.5, 0.6))


# boundary field


def test_boundary_field_constant_and_function():
    b = BoundaryField.constant(0.75)
    assert b.is_constant
    assert b.boundary_integral(Interval(0, 1)) == 1.5
    assert np.all(b(np.zeros((4, 2))) == 0.75)
    g = BoundaryField(func=lambda p: 1 + 0.5 * p[..., 0])
    assert g.boundary_integral(Disk(1.0)) == pytest.approx(2 * math.pi, abs=1e-12)
    assert g.inf_over(np.array([1.0, 0.0]), 0.1) == pytest.approx(1.45)
    assert g.sup_over(np.array([1.0, 0.0]), 0.1) == pytest.approx(1.55)
    with pytest.raises(ValueError):
        BoundaryField.constant(0.0)
    with pytest.raises(ValueError):
        BoundaryField()


def test_boundary_field_oscillation_vanishes():
    g = BoundaryField(func=lambda p: 1 + 0.3 * np.sin(3 * p[..., 0]) * np.cos(p[..., 1]))
    c = np.array([0.6, 0.8])
    osc = [g.oscillation(c, r) for r in (0.2, 0.1, 0.05, 0.025)]
    assert all(b < a for a, b in zip(osc, osc[1:]))
    assert osc[-1] < 0.05


# straightening charts


def test_disk_chart_graph():
    chart = geometry.straightening_chart(Disk(1.0), np.array([0.0, -1.0]), 0.1)
    y = np.linspace(-0.2, 0.2, 41)
    assert chart.f(0.0) == 0.0 and chart.fprime(0.0) == 0.0
    assert np.allclose(chart.f(y), 1 - np.sqrt(1 - y * y), atol=1e-15)
    assert np.all(np.abs(chart.fprime(y)) <= chart.omega(np.abs(y)) + 1e-15)
    # the inward normal is the second local axis
    assert np.allclose(chart.to_local(np.array([0.0, -0.9])), [0.0, 0.1])


@pytest.mark.parametrize(
    "dom,x0,ell",
    [
        (Disk(1.0), np.array([0.0, -1.0]), 0.1),
        (Disk(2.0, (0.5, 0.5)), np.array([0.5 + 2 * math.cos(1.0), 0.5 + 2 * math.sin(1.0)]), 0.3),
        (StarDomain((1.0, 0.1)), StarDomain((1.0, 0.1)).boundary_point(0.7), 0.05),
    ],
)
def test_chart_invariants(dom, x0, ell):
    chart = geometry.straightening_chart(dom, x0, ell)
    pts = _chart_points(chart, 100, seed=11)
    assert np.max(np.abs(chart.jacobian_fd(pts) - 1)) < 1e-8
    assert np.max(np.abs(chart.phi_inv(chart.phi(pts)) - pts)) < 1e-12
    y = chart.phi(pts)
    assert np.max(np.abs(chart.phi(chart.phi_inv(y)) - y)) < 1e-12
    y1 = np.linspace(-2 * ell, 2 * ell, 101)
    assert np.all(np.abs(chart.fprime(y1)) <= chart.omega(np.abs(y1)) + 1e-12)
    assert float(chart.f(0.0)) == pytest.approx(0.0, abs=1e-14)
    assert float(chart.fprime(0.0)) == pytest.approx(0.0, abs=1e-12)


def test_star_chart_fprime_matches_fd():
    star = StarDomain((1.0, 0.1, 0.05))
    chart = geometry.straightening_chart(star, star.boundary_point(2.0), 0.05)
    y = np.linspace(-0.09, 0.09, 19)
    h = 1e-6
    fd = (chart.f(y + h) - chart.f(y - h)) / (2 * h)
    assert np.max(np.abs(fd - chart.fprime(y))) < 1e-8


def test_chart_errors():
    with pytest.raises(ChartError):
        geometry.straightening_chart(Disk(1.0), np.array([0.0, -1.0]), 0.6)
    with pytest.raises(ChartError):
        geometry.straightening_chart(Disk(1.0), np.array([0.0, -0.5]), 0.1)
    with pytest.raises(ChartError):
        geometry.straightening_chart(Interval(0, 1), 0.5, 0.1)
    with pytest.raises(ChartError):
        geometry.straightening_chart(StarDomain((1.0, 0.1)), StarDomain((1.0, 0.1)).boundary_point(0.0), 2.0)


def test_flat_chart_is_isometry():
    chart = geometry.straightening_chart(Interval(0, 1), 1.0, 0.2)
    x = np.linspace(0.81, 0.99, 7)
    assert np.allclose(chart.flat_distance(x), 1 - x, atol=1e-15)
    for xi in x:
        assert geometry.distance_comparison_check(chart, xi).lhs_gap == 0.0


@pytest.mark.parametrize(
    "dom,x0,ell",
    [
        (Disk(1.0), np.array([0.0, -1.0]), 0.1),
        (Disk(0.5), np.array([0.5, 0.0]), 0.05),
        (Disk(3.0), np.array([0.0, 3.0]), 0.5),
        (StarDomain((1.0, 0.1)), StarDomain((1.0, 0.1)).boundary_point(1.3), 0.05),
    ],
)
def test_volume_preservation(dom, x0, ell):
    chart = geometry.straightening_chart(dom, x0, ell)
    # star distances go through a Newton projection, so use a lighter rule there
    n = 16 if isinstance(dom, StarDomain) else 48
    direct, straight = geometry.chart_volume_check(chart, n=n)
    assert direct == pytest.approx(straight, rel=1e-8)
    if isinstance(dom, StarDomain):
        return
    u = lambda p: np.exp(p[..., 0]) * (1 + p[..., 1] ** 2)
    direct, straight = geometry.chart_volume_check(chart, u)
    assert direct == pytest.approx(straight, rel=1e-8)


def test_volume_of_flat_half_disk():
    # with f = 0 the straightened region is a half disk
    chart = geometry.straightening_chart(Disk(1e6), np.array([0.0, -1e6]), 0.1)
    _, straight = geometry.chart_volume_check(chart)
    assert straight == pytest.approx(math.pi * 0.01 / 2, rel=1e-6)


def test_distance_comparison_examples():
    # both sample points must lie in the open chart ball, which needs ell > 0.112
    chart = geometry.straightening_chart(Disk(1.0), np.array([0.0, -1.0]), 0.15)
    assert geometry.distance_comparison_check(chart, np.array([0.0, -0.9])).lhs_gap == pytest.approx(0.0, abs=1e-9)
    rec = geometry.distance_comparison_check(chart, np.array([0.05, -0.9]))
    omega2 = float(chart.omega(0.2)) ** 2
    assert rec.lhs_gap >= 0 and rec.ratio <= 10 * omega2
    with pytest.raises(ValueError):
        geometry.distance_comparison_check(geometry.straightening_chart(Disk(1.0), np.array([0.0, -1.0]), 0.1), np.array([0.05, -0.9]))
    with pytest.raises(ValueError):
        geometry.distance_comparison_check(chart, np.array([0.5, 0.0]))


@pytest.mark.parametrize("R,ell", [(1.0, 0.1), (1.0, 0.02), (0.5, 0.1), (2.0, 0.4), (1.0, 0.3)])
def test_distance_comparison_envelope(R, ell):
    chart = geometry.straightening_chart(Disk(R), np.array([R, 0.0]), ell)
    pts = _chart_points(chart, 2000, seed=int(100 * R + 1000 * ell))
    omega2 = float(chart.omega(2 * ell)) ** 2
    worst_gap, worst_ratio = 0.0, 0.0
    for p in pts:
        rec = geometry.distance_comparison_check(chart, p)
        worst_gap = min(worst_gap, rec.lhs_gap * float(chart.flat_distance(p)) ** 2)
        worst_ratio = max(worst_ratio, rec.ratio)
    assert worst_gap >= -1e-12
    assert worst_ratio <= geometry.COMPARISON_CONSTANT * omega2


@pytest.mark.parametrize("R,ell", [(1.0, 0.1), (1.0, 0.05), (0.5, 0.1), (3.0, 0.5)])
def test_boundary_integral_comparison(R, ell):
    # sqrt(1 + s^2) - 1 <= s^2 / 2 and |f'| <= omega give the constant 1
    chart = geometry.straightening_chart(Disk(R), np.array([0.0, R]), ell)
    u = lambda p: 2 + np.cos(3 * p[..., 0])
    curved, flat, bound = geometry.chart_boundary_check(chart, u)
    assert abs(curved - flat) <= bound


def test_boundary_arc_against_quad():
    R, ell = 1.0, 0.1
    chart = geometry.straightening_chart(Disk(R), np.array([0.0, R]), ell)
    u = lambda p: 2 + np.cos(3 * p[..., 0])
    curved, _, _ = geometry.chart_boundary_check(chart, u)
    # boundary points within ell of (0, R): polar angle within 2 asin(ell / (2R)) of pi/2
    half = 2 * math.asin(ell / (2 * R))
    ref = quad(lambda t: (2 + math.cos(3 * R * math.cos(t))) * R, math.pi / 2 - half, math.pi / 2 + half, epsabs=1e-14)[0]
    assert curved == pytest.approx(ref, rel=1e-10)


def test_gradient_comparison_pushforward():
    # |grad (u o Phi^-1)|^2 and |grad u|^2 differ by at most 3 omega(2 ell) |grad u|^2 pointwise
    chart = geometry.straightening_chart(Disk(1.0), np.array([1.0, 0.0]), 0.1)
    pts = _chart_points(chart, 300, seed=2)
    u = lambda x: np.sin(5 * x[..., 0]) + x[..., 1] ** 2 * np.cos(x[..., 0])
    ut = lambda y: u(chart.phi_inv(y))
    h = 1e-6
    e = [np.array([h, 0.0]), np.array([0.0, h])]
    gu = np.stack([(u(pts + v) - u(pts - v)) / (2 * h) for v in e], axis=-1)
    y = chart.phi(pts)
    gt = np.stack([(ut(y + v) - ut(y - v)) / (2 * h) for v in e], axis=-1)
    lhs = np.abs(np.sum(gt**2, axis=-1) - np.sum(gu**2, axis=-1))
    w = float(chart.omega(2 * chart.ell))
    assert np.all(lhs <= 3 * w * np.sum(gu**2, axis=-1) + 1e-8)


# descriptors


@pytest.mark.parametrize(
    "dom", [Interval(-0.5, 2.0), Disk(1.5, (0.25, -1.0)), StarDomain((1.0, 0.1, 0.02), (0.0, 0.03), (0.1, 0.2))]
)
def test_descriptor_roundtrip(dom):
    assert geometry.parse_domain(geometry.domain_descriptor(dom)) == dom


def test_descriptor_parsing():
    text = "# unit disk\nkind = disk\nR = 2   # radius\n"
    assert geometry.parse_domain(text) == Disk(2.0)
    with pytest.raises(ValueError):
        geometry.parse_domain("kind=hexagon")
    with pytest.raises(ValueError):
        geometry.parse_domain("kind=star")
    with pytest.raises(ValueError):
        geometry.parse_key_values("just words")


def test_load_domain(tmp_path):
    p = tmp_path / "d.dom"
    p.write_text("kind=interval\na=0\nb=2\n")
    assert geometry.load_domain(p) == Interval(0.0, 2.0)
