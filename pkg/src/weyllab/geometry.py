"""
Domains (interval, disk, planar star-shaped domain), boundary distance,
boundary integrals, and the boundary-straightening chart.

Points are plain floats / 1-D arrays for intervals and arrays of shape
(2,) or (n, 2) in the plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.optimize import brentq

__all__ = [
    "Interval",
    "Disk",
    "StarDomain",
    "BoundaryField",
    "StraighteningChart",
    "ChartError",
    "ComparisonRecord",
    "dist_to_boundary",
    "signed_distance",
    "boundary_integral",
    "straightening_chart",
    "distance_comparison_check",
    "chart_volume_check",
    "chart_boundary_check",
    "parse_domain",
    "load_domain",
    "COMPARISON_CONSTANT",
]

# |f(x')-f(z')| <= omega^2 |x-z| turns the bracket of the distance comparison
# into at most omega^4 + 2 omega^2 <= 3 omega^2 for omega <= 1.
COMPARISON_CONSTANT = 3.0


class ChartError(ValueError):
    """Boundary is not a graph over the requested chart."""


def _gl(n: int, a: float, b: float, panels: int = 1):
    g, w = leggauss(n)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)[:, None]
    mid = 0.5 * (edges[:-1] + edges[1:])[:, None]
    return (mid + half * g).ravel(), (half * w).ravel()


# --------------------------------------------------------------------------
# Domains
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Interval:
    a: float = 0.0
    b: float = 1.0

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError("interval needs a < b")

    dim = 1

    @property
    def measure(self) -> float:
        return self.b - self.a

    @property
    def inradius(self) -> float:
        return 0.5 * (self.b - self.a)

    @property
    def perimeter(self) -> float:
        return 2.0

    def signed_distance(self, x):
        x = np.asarray(x, dtype=float)
        return np.minimum(x - self.a, self.b - x)

    def dist(self, x):
        return np.abs(self.signed_distance(x))

    def contains(self, x):
        return self.signed_distance(x) > 0

    def distance_gradient(self, x):
        """Gradient of dist(x, complement); the left branch wins at the midpoint."""
        x = np.asarray(x, dtype=float)
        return np.where(x - self.a <= self.b - x, 1.0, -1.0)

    def boundary_integral(self, g) -> float:
        return float(g(self.a) + g(self.b))


@dataclass(frozen=True)
class Disk:
    radius: float = 1.0
    center: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("radius must be positive")

    dim = 2

    @property
    def measure(self) -> float:
        return math.pi * self.radius**2

    @property
    def inradius(self) -> float:
        return self.radius

    @property
    def perimeter(self) -> float:
        return 2.0 * math.pi * self.radius

    def _rel(self, x):
        return np.asarray(x, dtype=float) - np.asarray(self.center)

    def signed_distance(self, x):
        return self.radius - np.linalg.norm(self._rel(x), axis=-1)

    def dist(self, x):
        return np.abs(self.signed_distance(x))

    def contains(self, x):
        return self.signed_distance(x) > 0

    def distance_gradient(self, x):
        """Gradient of dist(x, complement) inside; (-1, 0) is used at the center."""
        r = self._rel(x)
        n = np.linalg.norm(r, axis=-1, keepdims=True)
        safe = np.where(n > 0, n, 1.0)
        g = -r / safe
        return np.where(n > 0, g, np.array([-1.0, 0.0]))

    def boundary_point(self, theta):
        theta = np.asarray(theta, dtype=float)
        return np.stack(
            [self.center[0] + self.radius * np.cos(theta), self.center[1] + self.radius * np.sin(theta)],
            axis=-1,
        )

    def boundary_integral(self, g, n: int = 4096) -> float:
        theta = 2.0 * math.pi * np.arange(n) / n
        vals = np.asarray(g(self.boundary_point(theta)), dtype=float)
        return float(vals.mean() * self.perimeter)


@dataclass(frozen=True)
class StarDomain:
    """Planar domain {r < rho(theta)} with rho a finite cosine/sine series.

    rho(theta) = sum_k cos_coeffs[k] cos(k theta) + sum_k sin_coeffs[k] sin(k theta),
    where sin_coeffs[0] is ignored.
    """

    cos_coeffs: tuple[float, ...] = (1.0,)
    sin_coeffs: tuple[float, ...] = ()
    center: tuple[float, float] = (0.0, 0.0)
    _check: int = field(default=2048, repr=False)

    dim = 2

    def __post_init__(self):
        th = np.linspace(0, 2 * math.pi, self._check, endpoint=False)
        if np.min(self.rho(th)) <= 0:
            raise ValueError("rho must be positive")

    def _series(self, theta, deriv: int):
        theta = np.asarray(theta, dtype=float)
        out = np.zeros_like(theta)
        for k, c in enumerate(self.cos_coeffs):
            # d^m/dθ^m cos(kθ) = k^m cos(kθ + m π/2)
            out = out + c * k**deriv * np.cos(k * theta + deriv * math.pi / 2)
        for k, s in enumerate(self.sin_coeffs):
            if k == 0:
                continue
            out = out + s * k**deriv * np.sin(k * theta + deriv * math.pi / 2)
        return out

    def rho(self, theta):
        return self._series(theta, 0)

    def rho_prime(self, theta):
        return self._series(theta, 1)

    def rho_second(self, theta):
        return self._series(theta, 2)

    def boundary_point(self, theta):
        theta = np.asarray(theta, dtype=float)
        r = self.rho(theta)
        return np.stack([self.center[0] + r * np.cos(theta), self.center[1] + r * np.sin(theta)], axis=-1)

    def boundary_tangent(self, theta):
        theta = np.asarray(theta, dtype=float)
        r, rp = self.rho(theta), self.rho_prime(theta)
        c, s = np.cos(theta), np.sin(theta)
        return np.stack([rp * c - r * s, rp * s + r * c], axis=-1)

    def boundary_second(self, theta):
        theta = np.asarray(theta, dtype=float)
        r, rp, rpp = self.rho(theta), self.rho_prime(theta), self.rho_second(theta)
        c, s = np.cos(theta), np.sin(theta)
        return np.stack([(rpp - r) * c - 2 * rp * s, (rpp - r) * s + 2 * rp * c], axis=-1)

    def curvature(self, theta):
        r, rp, rpp = self.rho(theta), self.rho_prime(theta), self.rho_second(theta)
        return np.abs(r * r + 2 * rp * rp - r * rpp) / (r * r + rp * rp) ** 1.5

    @property
    def measure(self) -> float:
        th = 2 * math.pi * np.arange(self._check) / self._check
        return float(0.5 * np.mean(self.rho(th) ** 2) * 2 * math.pi)

    @property
    def perimeter(self) -> float:
        return self.boundary_integral(lambda p: np.ones(len(p)))

    @property
    def inradius(self) -> float:
        # lower bound: distance from the center to the boundary
        return float(np.min(self.dist(np.array([self.center]))))

    def _rel(self, x):
        return np.asarray(x, dtype=float) - np.asarray(self.center)

    def contains(self, x):
        r = self._rel(x)
        return np.linalg.norm(r, axis=-1) < self.rho(np.arctan2(r[..., 1], r[..., 0]))

    def project(self, x, seeds: int = 8, iters: int = 40):
        """Closest boundary parameter and distance by damped Newton with multi-start."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        r = x - np.asarray(self.center)
        base = np.arctan2(r[:, 1], r[:, 0])
        theta = base[:, None] + 2 * math.pi * np.arange(seeds)[None, :] / seeds
        xx = x[:, None, :]
        for _ in range(iters):
            b = self.boundary_point(theta) - xx
            t1 = self.boundary_tangent(theta)
            t2 = self.boundary_second(theta)
            g = np.sum(b * t1, axis=-1)
            h = np.sum(t1 * t1, axis=-1) + np.sum(b * t2, axis=-1)
            tt = np.sum(t1 * t1, axis=-1)
            step = np.where(h > 0.1 * tt, -g / np.where(h > 0.1 * tt, h, 1.0), -g / tt)
            step = np.clip(step, -0.3, 0.3)
            theta = theta + step
            if np.max(np.abs(step)) < 1e-14:
                break
        d = np.linalg.norm(self.boundary_point(theta) - xx, axis=-1)
        k = np.argmin(d, axis=1)
        rows = np.arange(len(x))
        return theta[rows, k], d[rows, k]

    def dist(self, x):
        x = np.asarray(x, dtype=float)
        _, d = self.project(x)
        return d if x.ndim > 1 else d[0]

    def signed_distance(self, x):
        d = self.dist(x)
        return np.where(self.contains(x), d, -d)

    def distance_gradient(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        theta, d = self.project(x)
        v = x - self.boundary_point(theta)
        n = np.linalg.norm(v, axis=-1, keepdims=True)
        sign = np.where(self.contains(x), 1.0, -1.0)[:, None]
        return sign * v / np.where(n > 0, n, 1.0)

    def boundary_integral(self, g, n: int = 4096) -> float:
        theta = 2.0 * math.pi * np.arange(n) / n
        speed = np.sqrt(self.rho(theta) ** 2 + self.rho_prime(theta) ** 2)
        vals = np.asarray(g(self.boundary_point(theta)), dtype=float)
        return float(np.mean(vals * speed) * 2 * math.pi)


Domain = Interval | Disk | StarDomain


def dist_to_boundary(dom, x):
    """Euclidean distance from x to the boundary of ``dom``."""
    out = dom.dist(x)
    return float(out) if np.ndim(out) == 0 else out


def signed_distance(dom, u):
    """dist(u, complement) - dist(u, dom): positive inside, negative outside."""
    out = dom.signed_distance(u)
    return float(out) if np.ndim(out) == 0 else out


def boundary_integral(dom, g) -> float:
    """Integral of g against (d-1)-dimensional Hausdorff measure on the boundary."""
    return dom.boundary_integral(g)


# --------------------------------------------------------------------------
# Boundary field b
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundaryField:
    """The coefficient b of the singular term (b^2 - 1/4)/dist^2.

    ``func`` is vectorized over points; ``value`` short-circuits constants.
    """

    func: Callable | None = None
    value: float | None = None

    def __post_init__(self):
        if (self.func is None) == (self.value is None):
            raise ValueError("give exactly one of func or value")
        if self.value is not None and not self.value > 0:
            raise ValueError("b must be positive")

    @classmethod
    def constant(cls, b: float) -> "BoundaryField":
        return cls(value=float(b))

    @property
    def is_constant(self) -> bool:
        return self.value is not None

    def __call__(self, x):
        # points: scalar or 1-D array on an interval, (n, 2) in the plane
        if self.value is not None:
            shape = np.shape(x)
            return np.full(shape[:-1] if len(shape) > 1 else shape, self.value)
        return self.func(x)

    def _ball_samples(self, center, r, n: int = 41):
        c = np.asarray(center, dtype=float)
        if c.ndim == 0:
            return c + np.linspace(-r, r, n)
        g = np.linspace(-r, r, n)
        X, Y = np.meshgrid(g, g)
        mask = X**2 + Y**2 <= r * r
        return np.stack([c[0] + X[mask], c[1] + Y[mask]], axis=-1)

    def inf_over(self, center, r, dom=None) -> float:
        if self.value is not None:
            return self.value
        pts = self._ball_samples(center, r)
        if dom is not None:
            pts = pts[np.asarray(dom.contains(pts))]
        return float(np.min(self.func(pts)))

    def sup_over(self, center, r, dom=None) -> float:
        if self.value is not None:
            return self.value
        pts = self._ball_samples(center, r)
        if dom is not None:
            pts = pts[np.asarray(dom.contains(pts))]
        return float(np.max(self.func(pts)))

    def oscillation(self, center, r, dom=None) -> float:
        return self.sup_over(center, r, dom) - self.inf_over(center, r, dom)

    def boundary_integral(self, dom) -> float:
        if self.value is not None:
            return self.value * dom.perimeter
        return dom.boundary_integral(self.func)


# --------------------------------------------------------------------------
# Straightening chart
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class StraighteningChart:
    """Local coordinates y = R (x - x0) with the inward normal on the y2 axis,
    and the volume-preserving map Phi(y1, y2) = (y1, y2 - f(y1))."""

    dom: object
    x0: np.ndarray
    rotation: np.ndarray
    f: Callable = field(repr=False)
    fprime: Callable = field(repr=False)
    omega: Callable = field(repr=False)
    ell: float = 0.0

    @property
    def dim(self) -> int:
        return self.dom.dim

    def to_local(self, x):
        if self.dim == 1:
            return (np.asarray(x, dtype=float) - self.x0) * self.rotation
        return (np.asarray(x, dtype=float) - self.x0) @ self.rotation.T

    def to_global(self, y):
        if self.dim == 1:
            return np.asarray(y, dtype=float) * self.rotation + self.x0
        return np.asarray(y, dtype=float) @ self.rotation + self.x0

    def phi(self, x):
        """Phi in global input coordinates, straightened output coordinates."""
        y = self.to_local(x)
        if self.dim == 1:
            return y
        out = np.array(y, dtype=float, copy=True)
        out[..., 1] = y[..., 1] - self.f(y[..., 0])
        return out

    def phi_inv(self, y):
        y = np.asarray(y, dtype=float)
        if self.dim == 1:
            return self.to_global(y)
        loc = np.array(y, copy=True)
        loc[..., 1] = y[..., 1] + self.f(y[..., 0])
        return self.to_global(loc)

    def flat_distance(self, x):
        """dist(Phi(x), boundary of the half-space)."""
        y = self.phi(x)
        return np.abs(y) if self.dim == 1 else np.abs(y[..., 1])

    def in_ball(self, x):
        x = np.asarray(x, dtype=float)
        if self.dim == 1:
            return np.abs(x - self.x0) < self.ell
        return np.linalg.norm(x - self.x0, axis=-1) < self.ell

    def jacobian_fd(self, x, step: float = 1e-6) -> np.ndarray:
        """Finite-difference Jacobian determinants of Phi at points x (n, 2)."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        e1, e2 = np.array([step, 0.0]), np.array([0.0, step])
        c1 = (self.phi(x + e1) - self.phi(x - e1)) / (2 * step)
        c2 = (self.phi(x + e2) - self.phi(x - e2)) / (2 * step)
        return c1[:, 0] * c2[:, 1] - c1[:, 1] * c2[:, 0]


def _disk_chart(dom: Disk, x0, ell):
    R = dom.radius
    x0 = np.asarray(x0, dtype=float)
    n = (np.asarray(dom.center) - x0) / np.linalg.norm(np.asarray(dom.center) - x0)
    t = np.array([n[1], -n[0]])
    rot = np.stack([t, n])

    def f(y1):
        y1 = np.asarray(y1, dtype=float)
        return y1 * y1 / (R + np.sqrt(R * R - y1 * y1))

    def fprime(y1):
        y1 = np.asarray(y1, dtype=float)
        return y1 / np.sqrt(R * R - y1 * y1)

    def omega(r):
        r = np.asarray(r, dtype=float)
        return r / np.sqrt(R * R - r * r)

    if 2 * ell >= R or omega(2 * ell) > 1.0:
        raise ChartError(f"ell={ell} too large for a radius-{R} disk chart (need omega(2 ell) <= 1)")
    return StraighteningChart(dom, x0, rot, f, fprime, omega, ell)


def _star_chart(dom: StarDomain, x0, ell):
    x0 = np.asarray(x0, dtype=float)
    rel = x0 - np.asarray(dom.center)
    th0 = float(np.arctan2(rel[1], rel[0]))
    tan0 = dom.boundary_tangent(th0)
    tan0 = tan0 / np.linalg.norm(tan0)
    n = np.array([-tan0[1], tan0[0]])  # counter-clockwise curve: left normal points inward
    rot = np.stack([tan0, n])
    speed = float(np.linalg.norm(dom.boundary_tangent(th0)))

    # the arc on which the boundary must be a graph over |y1| < 2 ell
    arc = np.linspace(th0 - 6 * ell / speed - 0.05, th0 + 6 * ell / speed + 0.05, 4001)
    loc = (dom.boundary_point(arc) - x0) @ rot.T
    dy1 = np.sum(dom.boundary_tangent(arc) * tan0, axis=-1)
    inside = np.abs(loc[:, 0]) <= 2 * ell
    if not np.all(dy1[inside] > 0):
        raise ChartError("boundary is not a graph over the chart")
    near = np.linalg.norm(dom.boundary_point(np.linspace(0, 2 * math.pi, 8192)) - x0, axis=-1) < 2 * ell
    pts = np.linspace(0, 2 * math.pi, 8192)[near]
    dtheta = np.angle(np.exp(1j * (pts - th0)))
    if np.any(np.abs(dtheta) > arc[-1] - th0):
        raise ChartError("boundary re-enters the chart ball")

    def solve(y1):
        y1 = np.asarray(y1, dtype=float)
        th = th0 + y1 / speed
        for _ in range(60):
            p = (dom.boundary_point(th) - x0) @ rot.T
            dp = np.sum(dom.boundary_tangent(th) * tan0, axis=-1)
            step = (p[..., 0] - y1) / dp
            th = th - step
            if np.max(np.abs(step)) < 1e-16:
                break
        return th

    def f(y1):
        th = solve(y1)
        return ((dom.boundary_point(th) - x0) @ rot.T)[..., 1]

    def fprime(y1):
        th = solve(y1)
        tv = dom.boundary_tangent(th)
        return np.sum(tv * n, axis=-1) / np.sum(tv * tan0, axis=-1)

    slope_max = float(np.max(np.abs(fprime(np.linspace(-2 * ell, 2 * ell, 401)))))
    kappa = float(np.max(dom.curvature(arc[inside])))
    fpp_bound = kappa * (1 + slope_max**2) ** 1.5

    def omega(r):
        return fpp_bound * np.asarray(r, dtype=float)

    if omega(2 * ell) > 1.0:
        raise ChartError(f"ell={ell} too large: omega(2 ell) = {omega(2 * ell):.3g} > 1")
    return StraighteningChart(dom, x0, rot, f, fprime, omega, ell)


def straightening_chart(dom, x0, ell: float) -> StraighteningChart:
    """Chart at boundary point x0 on the ball of radius ell."""
    if not ell > 0:
        raise ChartError("ell must be positive")
    if isinstance(dom, Interval):
        x0 = float(x0)
        if x0 == dom.a:
            rot = 1.0
        elif x0 == dom.b:
            rot = -1.0
        else:
            raise ChartError("x0 must be an endpoint")
        if 2 * ell > dom.measure:
            raise ChartError("ell too large")
        zero = lambda y: np.zeros_like(np.asarray(y, dtype=float))  # noqa: E731
        return StraighteningChart(dom, np.asarray(x0), np.asarray(rot), zero, zero, zero, ell)
    if abs(float(dom.signed_distance(np.asarray(x0, dtype=float)))) > 1e-10:
        raise ChartError("x0 is not on the boundary")
    if isinstance(dom, Disk):
        return _disk_chart(dom, x0, ell)
    if isinstance(dom, StarDomain):
        return _star_chart(dom, x0, ell)
    raise TypeError(f"unsupported domain {type(dom).__name__}")


@dataclass(frozen=True)
class ComparisonRecord:
    lhs_gap: float
    ratio: float


def distance_comparison_check(chart: StraighteningChart, x) -> ComparisonRecord:
    """dist(x)^-2 - dist(Phi x)^-2 and that gap times dist(Phi x)^2."""
    x = np.asarray(x, dtype=float)
    if not bool(chart.in_ball(x)) or not bool(chart.dom.contains(x)):
        raise ValueError("x must lie in the chart ball and inside the domain")
    d = float(chart.dom.dist(x))
    dphi = float(chart.flat_distance(x))
    gap = 1.0 / d**2 - 1.0 / dphi**2
    return ComparisonRecord(gap, gap * dphi**2)


def _disk_crossings(dom, x0, r, samples: int = 720):
    """Angular intervals {psi : x0 + r e_psi in dom}, as a list of (lo, hi)."""
    psi = np.linspace(-math.pi, math.pi, samples + 1)
    pts = x0 + r * np.stack([np.cos(psi), np.sin(psi)], axis=-1)
    sd = np.asarray(dom.signed_distance(pts), dtype=float)

    def g(p):
        return float(dom.signed_distance(x0 + r * np.array([math.cos(p), math.sin(p)])))

    cuts = []
    for i in np.nonzero(np.sign(sd[:-1]) != np.sign(sd[1:]))[0]:
        cuts.append(brentq(g, psi[i], psi[i + 1], xtol=1e-15))
    bounds = [-math.pi, *cuts, math.pi]
    out = []
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        if g(0.5 * (lo + hi)) > 0:
            out.append((lo, hi))
    return out


def chart_volume_check(chart: StraighteningChart, u: Callable | None = None, n: int = 48) -> tuple[float, float]:
    """Integral of u over (dom ∩ B) in global polar coordinates about x0, and of
    u ∘ Phi^{-1} over the straightened region, computed slice by slice in y1."""
    if chart.dim != 2:
        raise ValueError("volume check is for planar charts")
    if u is None:
        u = lambda p: np.ones(p.shape[:-1])  # noqa: E731
    ell = chart.ell
    x0 = chart.x0
    rr, wr = _gl(n, 0.0, ell, panels=4)
    direct = 0.0
    for r, w in zip(rr, wr):
        for lo, hi in _disk_crossings(chart.dom, x0, r):
            ps, wp = _gl(n, lo, hi)
            pts = x0 + r * np.stack([np.cos(ps), np.sin(ps)], axis=-1)
            direct += w * r * float(np.sum(wp * u(pts)))

    # straightened side: slices y1 with 0 < y2 < sqrt(ell^2 - y1^2) - f(y1)
    def top(y1):
        return math.sqrt(max(ell * ell - y1 * y1, 0.0)) - float(chart.f(np.array(y1)))

    lo = -brentq(lambda s: top(-s), 0.0, ell * (1 - 1e-15), xtol=1e-15)
    hi = brentq(top, 0.0, ell * (1 - 1e-15), xtol=1e-15)
    # y1 = ell sin(a) keeps the slice height smooth near the circle's branch points
    al, wa = _gl(n, math.asin(lo / ell), math.asin(hi / ell), panels=4)
    ys, wy = ell * np.sin(al), wa * ell * np.cos(al)
    straight = 0.0
    for y1, w in zip(ys, wy):
        t = top(y1)
        z, wz = _gl(n, 0.0, t)
        yy = np.stack([np.full_like(z, y1), z], axis=-1)
        straight += w * float(np.sum(wz * u(chart.phi_inv(yy))))
    return direct, straight


def chart_boundary_check(chart: StraighteningChart, u: Callable, n: int = 64) -> tuple[float, float, float]:
    """Boundary integral of u over ∂Ω ∩ B versus the flat integral of u ∘ Phi^{-1}
    over Phi(∂Ω ∩ B); returns (curved, flat, ell * omega(ell)^2 * sup|u|)."""
    if chart.dim != 2:
        raise ValueError("boundary check is for planar charts")
    ell = chart.ell

    def inside(y1):
        return ell * ell - y1 * y1 - float(chart.f(np.array(y1))) ** 2

    lo = -brentq(lambda s: inside(-s), 0.0, ell, xtol=1e-15)
    hi = brentq(inside, 0.0, ell, xtol=1e-15)
    ys, wy = _gl(n, lo, hi, panels=4)
    loc = np.stack([ys, chart.f(ys)], axis=-1)
    pts = chart.to_global(loc)
    vals = u(pts)
    # arclength element of the graph, i.e. the curved measure
    curved = float(np.sum(wy * vals * np.sqrt(1 + chart.fprime(ys) ** 2)))
    flat = float(np.sum(wy * u(chart.phi_inv(np.stack([ys, np.zeros_like(ys)], axis=-1)))))
    bound = ell * float(chart.omega(ell)) ** 2 * float(np.max(np.abs(vals)))
    return curved, flat, bound


# --------------------------------------------------------------------------
# Descriptor files
# --------------------------------------------------------------------------


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.replace(",", " ").split())


def parse_key_values(text: str) -> dict[str, str]:
    """Flat ``key=value`` lines; ``#`` starts a comment."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def parse_domain(text: str):
    kv = parse_key_values(text)
    kind = kv.get("kind")
    if kind == "interval":
        return Interval(float(kv.get("a", 0.0)), float(kv.get("b", 1.0)))
    if kind == "disk":
        center = _floats(kv["center"]) if "center" in kv else (0.0, 0.0)
        return Disk(float(kv.get("R", 1.0)), tuple(center))
    if kind == "star":
        if "rho_coeffs" not in kv:
            raise ValueError("star domain needs rho_coeffs")
        sin = _floats(kv["rho_sin_coeffs"]) if "rho_sin_coeffs" in kv else ()
        center = _floats(kv["center"]) if "center" in kv else (0.0, 0.0)
        return StarDomain(_floats(kv["rho_coeffs"]), sin, tuple(center))
    raise ValueError(f"unknown domain kind {kind!r}")


def load_domain(path) -> object:
    return parse_domain(Path(path).read_text())


def domain_descriptor(dom) -> str:
    if isinstance(dom, Interval):
        return f"kind=interval\na={dom.a!r}\nb={dom.b!r}\n"
    if isinstance(dom, Disk):
        return f"kind=disk\nR={dom.radius!r}\ncenter={dom.center[0]!r},{dom.center[1]!r}\n"
    text = "kind=star\nrho_coeffs=" + ",".join(repr(c) for c in dom.cos_coeffs) + "\n"
    if dom.sin_coeffs:
        text += "rho_sin_coeffs=" + ",".join(repr(c) for c in dom.sin_coeffs) + "\n"
    return text + f"center={dom.center[0]!r},{dom.center[1]!r}\n"
