"""
Continuum partition of unity adapted to the distance to the boundary.

With l(u) = max(dist(u, complement), 2 l0) / 2 and a unit-norm bump phi,

    phi_u(x) = phi((x - u) / l(u)) * sqrt(1 + grad l(u) . (x - u) / l(u))

satisfies int phi_u(x)^2 l(u)^{-d} du = 1 for every x. The map
u -> (x - u)/l(u) has Jacobian determinant (1 + grad l . s) / l^d by the
matrix determinant lemma, which is exactly the factor inside the square root.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import quad

from .geometry import Disk, Interval, StarDomain

__all__ = [
    "PartitionConfig",
    "PartitionQuadratureError",
    "RegionSplit",
    "bump_norm_constant",
    "ell",
    "ell_gradient",
    "ball_meets_domain",
    "phi_u",
    "phi_u_gradient",
    "partition_normalization",
    "region_split",
    "gradient_constant",
]


class PartitionQuadratureError(ArithmeticError):
    def __init__(self, message: str, estimate: float):
        super().__init__(message)
        self.estimate = estimate


def _bump_profile(r2):
    r2 = np.asarray(r2, dtype=float)
    inside = r2 < 1.0
    safe = np.where(inside, 1.0 - r2, 1.0)
    return np.where(inside, np.exp(-1.0 / safe), 0.0)


def bump_norm_constant(dim: int) -> float:
    """c with || c exp(-1/(1 - |x|^2)) ||_{L^2(R^dim)} = 1."""
    area = 2.0 * math.pi ** (dim / 2) / math.gamma(dim / 2)  # |S^{dim-1}|
    val, _ = quad(lambda r: r ** (dim - 1) * math.exp(-2.0 / (1.0 - r * r)), 0.0, 1.0, epsabs=0, epsrel=1e-13, limit=200)
    return 1.0 / math.sqrt(area * val)


@dataclass(frozen=True)
class PartitionConfig:
    dom: object
    ell0: float
    bump_constant: float = field(default=0.0, repr=False)

    def __post_init__(self):
        if not self.ell0 > 0:
            raise ValueError("ell0 must be positive")
        if self.bump_constant == 0.0:
            object.__setattr__(self, "bump_constant", bump_norm_constant(self.dom.dim))

    @property
    def dim(self) -> int:
        return self.dom.dim

    def bump(self, s):
        """phi(s); s has trailing axis of length dim in 2-D, plain values in 1-D."""
        s = np.asarray(s, dtype=float)
        r2 = s * s if self.dim == 1 else np.sum(s * s, axis=-1)
        return self.bump_constant * _bump_profile(r2)

    def bump_gradient(self, s):
        s = np.asarray(s, dtype=float)
        r2 = s * s if self.dim == 1 else np.sum(s * s, axis=-1)
        inside = r2 < 1.0
        safe = np.where(inside, 1.0 - r2, 1.0)
        radial = np.where(inside, -2.0 / safe**2, 0.0) * self.bump(s)
        return radial * s if self.dim == 1 else radial[..., None] * s

    @cached_property
    def bump_sup(self) -> float:
        return self.bump_constant * math.exp(-1.0)

    @cached_property
    def bump_gradient_sup(self) -> float:
        r = np.linspace(0.0, 1.0, 200001)[:-1]
        return float(self.bump_constant * np.max(2 * r / (1 - r * r) ** 2 * np.exp(-1.0 / (1 - r * r))))


def _sdist(cfg: PartitionConfig, u):
    return np.asarray(cfg.dom.signed_distance(u), dtype=float)


def ell(cfg: PartitionConfig, u):
    """l(u) = max(dist(u, complement), 2 l0) / 2."""
    out = 0.5 * np.maximum(_sdist(cfg, u), 2.0 * cfg.ell0)
    return float(out) if out.ndim == 0 else out


def ell_gradient(cfg: PartitionConfig, u):
    """grad l(u): half the distance gradient where dist > 2 l0, zero elsewhere."""
    delta = _sdist(cfg, u)
    g = 0.5 * np.asarray(cfg.dom.distance_gradient(u), dtype=float)
    if cfg.dim == 1:
        out = np.where(delta > 2 * cfg.ell0, g, 0.0)
        return float(out) if out.ndim == 0 else out
    g = g.reshape(np.shape(u))
    return np.where((delta > 2 * cfg.ell0)[..., None], g, 0.0)


def ball_meets_domain(cfg: PartitionConfig, u) -> bool:
    """False when B_{l(u)}(u) is disjoint from the domain."""
    return bool(_sdist(cfg, u) > -ell(cfg, u))


def _phi_parts(cfg, u, x):
    lu = np.asarray(ell(cfg, u))
    gl = np.asarray(ell_gradient(cfg, u))
    diff = np.asarray(x, dtype=float) - np.asarray(u, dtype=float)
    if cfg.dim == 1:
        s = diff / lu
        g = 1.0 + gl * s
    else:
        s = diff / lu[..., None]
        g = 1.0 + np.sum(gl * s, axis=-1)
    return lu, gl, s, g


def phi_u(cfg: PartitionConfig, u, x):
    """phi_u(x), vectorized over matching leading shapes of u and x."""
    _, _, s, g = _phi_parts(cfg, u, x)
    out = cfg.bump(s) * np.sqrt(np.maximum(g, 0.0))
    return float(out) if np.ndim(out) == 0 else out


def phi_u_gradient(cfg: PartitionConfig, u, x):
    """grad_x phi_u(x)."""
    lu, gl, s, g = _phi_parts(cfg, u, x)
    root = np.sqrt(np.maximum(g, 0.0))
    val = cfg.bump(s)
    if cfg.dim == 1:
        return cfg.bump_gradient(s) * root / lu + val * gl / (2 * lu * root)
    return cfg.bump_gradient(s) * (root / lu)[..., None] + (val / (2 * lu * root))[..., None] * gl


# --------------------------------------------------------------------------
# Normalization
# --------------------------------------------------------------------------


def _normalization_interval(cfg: PartitionConfig, x: float, tol: float) -> tuple[float, float]:
    dom: Interval = cfg.dom
    reach = 2.0 * ell(cfg, x) + 1e-12
    lo, hi = x - reach, x + reach
    pts = [p for p in (dom.a + 2 * cfg.ell0, dom.b - 2 * cfg.ell0, 0.5 * (dom.a + dom.b)) if lo < p < hi]

    def f(u):
        return phi_u(cfg, u, x) ** 2 / ell(cfg, u)

    val, err = quad(f, lo, hi, points=pts or None, epsabs=tol * 1e-2, epsrel=0.0, limit=400)
    return val, err


def _normalization_disk(cfg: PartitionConfig, x, tol: float, n_angle: int = 96) -> tuple[float, float]:
    """Polar coordinates about the disk center: l depends on the radius only,
    so its kink at radius R - 2 l0 and the cone point at the center are
    aligned with the grid."""
    dom: Disk = cfg.dom
    R, l0 = dom.radius, cfg.ell0
    xr = np.asarray(x, dtype=float) - np.asarray(dom.center)
    rx = float(np.hypot(*xr))
    ax = math.atan2(xr[1], xr[0])
    g, w = leggauss(n_angle)
    full_t = 2 * math.pi * np.arange(2 * n_angle) / (2 * n_angle)

    def lrad(rho):
        return 0.5 * max(R - rho, 2 * l0)

    def inner(rho):
        lu = lrad(rho)
        if rho <= 0.0:
            return 0.0
        # |u - x| < l  <=>  cos(a - ax) > (rho^2 + rx^2 - l^2) / (2 rho rx)
        if rx == 0.0:
            c = -2.0 if rho < lu else 2.0
        else:
            c = (rho * rho + rx * rx - lu * lu) / (2 * rho * rx)
        if c >= 1.0:
            return 0.0
        if c <= -1.0:
            a, wa = ax + full_t, np.full(full_t.size, 2 * math.pi / full_t.size)
        else:
            half = math.acos(c)
            a, wa = ax + half * g, half * w
        u = np.stack([rho * np.cos(a), rho * np.sin(a)], axis=-1) + np.asarray(dom.center)
        vals = phi_u(cfg, u, np.broadcast_to(np.asarray(x, dtype=float), u.shape)) ** 2
        return float(np.sum(wa * vals)) * rho / lu**2

    # support in rho: |rho - rx| < l(rho) <= l(x) + |u - x| / 2
    reach = 2.0 * lrad(rx) + 1e-12
    lo, hi = max(0.0, rx - reach), rx + reach
    pts = [p for p in (R - 2 * l0,) if lo < p < hi]
    val, err = quad(inner, lo, hi, points=pts or None, epsabs=tol * 1e-2, epsrel=0.0, limit=400)
    return val, err


def _normalization_generic(cfg: PartitionConfig, x, n_r: int = 16, panels: int = 8, n_angle: int = 128) -> tuple[float, float]:
    """Polar grid about x itself; used for star domains."""
    x = np.asarray(x, dtype=float)
    reach = 2.0 * ell(cfg, x)
    g, w = leggauss(n_r)
    edges = np.linspace(0.0, reach, panels + 1)
    half = 0.5 * np.diff(edges)[:, None]
    r = ((0.5 * (edges[:-1] + edges[1:]))[:, None] + half * g).ravel()
    wr = (half * w).ravel()
    a = 2 * math.pi * np.arange(n_angle) / n_angle
    R, A = np.meshgrid(r, a, indexing="ij")
    u = x + np.stack([R * np.cos(A), R * np.sin(A)], axis=-1)
    flat = u.reshape(-1, 2)
    vals = phi_u(cfg, flat, np.broadcast_to(x, flat.shape)) ** 2 / ell(cfg, flat) ** 2
    vals = vals.reshape(R.shape)
    total = float(np.sum(wr[:, None] * R * vals) * 2 * math.pi / n_angle)
    return total, float("nan")


def partition_normalization(cfg: PartitionConfig, x, tol: float = 1e-8) -> float:
    """int phi_u(x)^2 l(u)^{-d} du."""
    if isinstance(cfg.dom, Interval):
        val, err = _normalization_interval(cfg, float(x), tol)
    elif isinstance(cfg.dom, Disk):
        val, err = _normalization_disk(cfg, x, tol)
    else:
        return _normalization_generic(cfg, x)[0]
    if not err <= tol:
        raise PartitionQuadratureError(f"quadrature error estimate {err:.3g} above {tol:.3g}", val)
    return val


# --------------------------------------------------------------------------
# Bulk / boundary split
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RegionSplit:
    cfg: PartitionConfig
    bulk_measure: float
    boundary_measure: float

    def in_bulk(self, u):
        return _sdist(self.cfg, u) > 2 * self.cfg.ell0

    def in_boundary(self, u):
        d = _sdist(self.cfg, u)
        return (d > -self.cfg.ell0) & (d <= 2 * self.cfg.ell0)

    @property
    def boundary_ratio(self) -> float:
        """|boundary region| / l0, which stays bounded as l0 -> 0."""
        return self.boundary_measure / self.cfg.ell0


def _star_band_measures(dom: StarDomain, l0: float, n: int = 240) -> tuple[float, float]:
    th = np.linspace(0, 2 * math.pi, 2048, endpoint=False)
    rmax = float(np.max(dom.rho(th))) + 2 * l0
    g = np.linspace(-rmax, rmax, n)
    cell = (g[1] - g[0]) ** 2
    X, Y = np.meshgrid(g, g)
    pts = np.stack([X.ravel(), Y.ravel()], axis=-1) + np.asarray(dom.center)
    d = np.asarray(dom.signed_distance(pts))
    return float(np.sum(d > 2 * l0) * cell), float(np.sum((d > -l0) & (d <= 2 * l0)) * cell)


def region_split(cfg: PartitionConfig) -> RegionSplit:
    """Bulk {delta > 2 l0} and boundary layer {-l0 < delta <= 2 l0}."""
    dom, l0 = cfg.dom, cfg.ell0
    if not l0 < 0.5 * dom.inradius:
        raise ValueError(f"ell0={l0} must be below half the inradius ({0.5 * dom.inradius})")
    if isinstance(dom, Interval):
        bulk, layer = dom.measure - 4 * l0, 6 * l0
    elif isinstance(dom, Disk):
        R = dom.radius
        bulk = math.pi * (R - 2 * l0) ** 2
        layer = math.pi * ((R + l0) ** 2 - (R - 2 * l0) ** 2)
    else:
        bulk, layer = _star_band_measures(dom, l0)
    return RegionSplit(cfg, bulk, layer)


def gradient_constant(cfg: PartitionConfig, samples: int = 2000, seed: int = 0) -> float:
    """Empirical sup of l(u) |grad phi_u(x)| / ||grad phi||_inf over random (u, x)."""
    rng = np.random.default_rng(seed)
    dom = cfg.dom
    if cfg.dim == 1:
        u = rng.uniform(dom.a - cfg.ell0, dom.b + cfg.ell0, samples)
        lu = np.asarray(ell(cfg, u))
        x = u + lu * rng.uniform(-1, 1, samples)
        grad = np.abs(phi_u_gradient(cfg, u, x))
    else:
        box = dom.inradius if isinstance(dom, Disk) else float(np.max(dom.rho(np.linspace(0, 2 * math.pi, 512))))
        u = np.asarray(getattr(dom, "center", (0.0, 0.0))) + rng.uniform(-box - cfg.ell0, box + cfg.ell0, (samples, 2))
        lu = np.asarray(ell(cfg, u))
        ang = rng.uniform(0, 2 * math.pi, samples)
        rad = np.sqrt(rng.uniform(0, 1, samples))
        x = u + (lu * rad)[:, None] * np.stack([np.cos(ang), np.sin(ang)], axis=-1)
        grad = np.linalg.norm(phi_u_gradient(cfg, u, x), axis=-1)
    return float(np.max(lu * grad) / cfg.bump_gradient_sup)
