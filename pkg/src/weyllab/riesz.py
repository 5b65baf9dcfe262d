"""
Riesz means Tr(h^2 A - 1)_- of computed spectra, the two-term Weyl
prediction, coefficient fits, the boundary density functional, local traces,
and the half-space phase-space integral.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
import scipy.linalg
from numpy.polynomial.legendre import leggauss
from scipy.special import sici

from .geometry import BoundaryField, Interval
from .pnu import PnuContext, pnu_eval
from .specfun import bessel_j
from .spectra import DiscreteOperator, Spectrum

__all__ = [
    "InsufficientSpectrumError",
    "ConditioningError",
    "ResolutionError",
    "RieszCurve",
    "AsymptoticFit",
    "riesz_mean",
    "riesz_curve",
    "parse_h_grid",
    "weyl_constant",
    "weyl_two_term",
    "fit_asymptotics",
    "density_functional",
    "local_trace",
    "HalfspaceProfile",
    "halfspace_phase_integral",
    "halfspace_decomposition",
]


class InsufficientSpectrumError(ValueError):
    """The spectrum's cutoff is below h^-2."""


class ConditioningError(ValueError):
    """The h-window is too narrow to separate the two coefficients."""


class ResolutionError(ValueError):
    """The mesh does not resolve the localization or the semiclassical scale."""


def weyl_constant(d: int) -> float:
    """L_d = (4π)^{-d/2} / Γ(2 + d/2)."""
    return (4.0 * math.pi) ** (-0.5 * d) / math.gamma(2.0 + 0.5 * d)


def riesz_mean(spec: Spectrum, h: float) -> float:
    """Σ_k mult_k (1 - h^2 λ_k)_+ with compensated summation."""
    if not h > 0:
        raise ValueError("h must be positive")
    if spec.cutoff * h * h < 1.0 - 1e-12:
        raise InsufficientSpectrumError(f"cutoff {spec.cutoff:g} < h^-2 = {h ** -2:g}")
    terms = spec.multiplicities * np.clip(1.0 - h * h * spec.eigenvalues, 0.0, None)
    return math.fsum(terms.tolist())


def weyl_two_term(dom, b, h: float, d: int | None = None, constants=weyl_constant) -> float:
    """L_d h^-d |Ω| - (L_{d-1}/2) h^{1-d} ∫_∂Ω b."""
    d = dom.dim if d is None else d
    field_ = b if isinstance(b, BoundaryField) else BoundaryField.constant(float(b))
    return constants(d) * h**-d * dom.measure - 0.5 * constants(d - 1) * h ** (1 - d) * field_.boundary_integral(dom)


def parse_h_grid(text: str) -> np.ndarray:
    """``hmin:hmax:n`` → n log-spaced values, decreasing."""
    try:
        lo, hi, n = text.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError as exc:
        raise ValueError(f"h-grid must look like hmin:hmax:n, got {text!r}") from exc
    if not (0 < lo < hi) or n < 2:
        raise ValueError("need 0 < hmin < hmax and n >= 2")
    return np.geomspace(hi, lo, n)


@dataclass
class RieszCurve:
    h: np.ndarray
    trace: np.ndarray
    valid: np.ndarray
    source: dict = field(default_factory=dict)

    def __post_init__(self):
        self.h = np.asarray(self.h, dtype=float)
        self.trace = np.asarray(self.trace, dtype=float)
        self.valid = np.asarray(self.valid, dtype=bool)
        if self.h.size > 1 and np.any(np.diff(self.h) >= 0):
            raise ValueError("h must be strictly decreasing")

    def write(self, path) -> Path:
        path = Path(path)
        with path.open("w") as fh:
            fh.write("h,trace,valid\n")
            for h, t, v in zip(self.h, self.trace, self.valid):
                fh.write(f"{h:.17g},{t:.17g},{int(v)}\n")
        return path

    @classmethod
    def read(cls, path) -> "RieszCurve":
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        valid = data[:, 2].astype(bool) if data.shape[1] > 2 else np.ones(len(data), dtype=bool)
        return cls(data[:, 0], data[:, 1], valid)


def riesz_curve(spec: Spectrum, hs) -> RieszCurve:
    """Riesz means on a grid of h; samples with h^-2 above the cutoff are flagged invalid."""
    hs = np.sort(np.asarray(hs, dtype=float))[::-1]
    valid = spec.cutoff * hs * hs >= 1.0 - 1e-12
    trace = np.array([riesz_mean(spec, h) if ok else np.nan for h, ok in zip(hs, valid)])
    return RieszCurve(hs, trace, valid, {"cutoff": spec.cutoff, "count": spec.count})


@dataclass(frozen=True)
class AsymptoticFit:
    c0: float
    c1: float
    residual: float
    h_window: tuple[float, float]
    n_samples: int

    def as_dict(self) -> dict:
        return {"c0": self.c0, "c1": self.c1, "residual": self.residual,
                "h_window": list(self.h_window), "n_samples": self.n_samples}


def fit_asymptotics(curve: RieszCurve, d: int, window: tuple[float, float] | None = None) -> AsymptoticFit:
    """Least squares of trace·h^d against {1, h}.

    Fitting the transformed quantity trace·h^d is the same as weighting the
    trace residual of sample i by h_i^d. The default window is the smallest
    decade of valid h.
    """
    h = curve.h[curve.valid]
    y = curve.trace[curve.valid]
    if h.size == 0:
        raise ValueError("no valid samples")
    if window is None:
        window = (float(h.min()), float(min(h.max(), 10.0 * h.min())))
    sel = (h >= window[0] * (1 - 1e-12)) & (h <= window[1] * (1 + 1e-12))
    h, y = h[sel], y[sel]
    if h.size < 6:
        raise ValueError(f"need at least 6 samples in the window, got {h.size}")
    if h.max() < 2.0 * h.min():
        raise ConditioningError(f"h-span {h.max() / h.min():.3g} < 2")
    A = np.stack([np.ones_like(h), h], axis=1)
    z = y * h**d
    coef, *_ = np.linalg.lstsq(A, z, rcond=None)
    res = float(np.linalg.norm(A @ coef - z))
    return AsymptoticFit(float(coef[0]), float(coef[1]), res, (float(h.min()), float(h.max())), int(h.size))


# --------------------------------------------------------------------------
# Boundary density functional on an interval
# --------------------------------------------------------------------------


def _partial_sum_sin2(K: int, x):
    """S_K(x) = Σ_{k≤K} 2 sin^2(kπx) by direct summation (stable for small x)."""
    k = np.arange(1, K + 1)
    return 2.0 * np.sum(np.sin(np.pi * np.outer(x, k)) ** 2, axis=1)


def _partial_sum_closed(K: int, x):
    """S_K(x) = K + 1/2 - sin((2K+1)πx) / (2 sin πx)."""
    return K + 0.5 - np.sin((2 * K + 1) * np.pi * x) / (2.0 * np.sin(np.pi * x))


def density_functional(dom: Interval, h: float, f: Callable, order: int = 16) -> float:
    """h^2 ∫ f(x) [Σ_{h^2 π^2 k^2 ≤ 1} 2 sin^2(kπx)] dist(x)^-2 dx on (0, 1)-type intervals.

    The eigenfunctions of the Dirichlet Laplacian on (a, b) are used in the
    rescaled variable x ↦ (x - a)/(b - a). The problem folds onto [0, 1/2]
    via S_K(1 - x) = S_K(x). On (0, h) the f(0)-part is integrated exactly
    with ∫_0^a sin^2(cx)/x^2 dx = c Si(2ca) - sin^2(ca)/a; the rest is
    Gauss-Legendre on half-period panels.
    """
    if not h > 0:
        raise ValueError("h must be positive")
    a0, L = dom.a, dom.measure
    # on (a, b): λ_k = (kπ/L)^2, ψ_k^2 = (2/L) sin^2(kπ(x-a)/L), dist = L·min(s, 1-s)
    K = int(math.floor(L / (math.pi * h) + 1e-12))
    if K == 0:
        return 0.0
    scale = h * h / L**2  # h^2 ∫ (1/L) S_K(s) / (L^2 s^2) L ds

    def g(s):
        s = np.asarray(s, dtype=float)
        return np.asarray(f(a0 + L * s), dtype=float) + np.asarray(f(a0 + L * (1.0 - s)), dtype=float)

    gz, wz = leggauss(order)
    eps = min(h / L, 0.25)
    g0 = float(g(0.0))
    k = np.arange(1, K + 1)
    c = k * math.pi
    si, _ = sici(2 * c * eps)
    near_exact = 2.0 * float(np.sum(c * si - np.sin(c * eps) ** 2 / eps))
    s = 0.5 * eps * (gz + 1.0)
    near_rest = float(np.sum(0.5 * eps * wz * (g(s) - g0) * _partial_sum_sin2(K, s) / s**2))
    # oscillation period of S_K is 1/(K + 1/2); use half-period panels
    panels = max(1, int(math.ceil((0.5 - eps) * (2 * K + 1) * 2)))
    edges = np.linspace(eps, 0.5, panels + 1)
    half = 0.5 * np.diff(edges)[:, None]
    mid = 0.5 * (edges[:-1] + edges[1:])[:, None]
    x = (mid + half * gz).ravel()
    w = (half * wz).ravel()
    far = float(np.sum(w * g(x) * _partial_sum_closed(K, x) / x**2))
    return scale * (g0 * near_exact + near_rest + far)


# --------------------------------------------------------------------------
# Local traces
# --------------------------------------------------------------------------


def local_trace(opr: DiscreteOperator, phi, h: float, min_nodes_per_h: float = 4.0) -> float:
    """Tr(φ (h^2 A - 1) φ)_- for the discretized A.

    φ acts by nodal multiplication; the compressed pencil
    (Φ(h^2 K - M)Φ, M) is solved densely on the nodes where φ ≠ 0.
    """
    x = opr.x
    vals = np.asarray(phi(x) if callable(phi) else phi, dtype=float)
    if vals.shape != x.shape:
        raise ValueError("phi samples must match the interior nodes")
    idx = np.nonzero(vals != 0.0)[0]
    if idx.size < 20:
        raise ResolutionError(f"φ covers only {idx.size} nodes")
    lo, hi = idx[0], idx[-1] + 1
    spacing = float(np.max(np.diff(opr.nodes[lo : hi + 2])))
    if spacing * min_nodes_per_h > h:
        raise ResolutionError(f"mesh spacing {spacing:.3g} too coarse for h={h:.3g}")
    n = hi - lo
    K = np.diag(opr.k_diag[lo:hi]) + np.diag(opr.k_off[lo : hi - 1], 1) + np.diag(opr.k_off[lo : hi - 1], -1)
    M = np.diag(opr.m_diag[lo:hi]) + np.diag(opr.m_off[lo : hi - 1], 1) + np.diag(opr.m_off[lo : hi - 1], -1)
    p = vals[lo:hi]
    Hmat = p[:, None] * (h * h * K - M) * p[None, :]
    # full solve: the bisection driver behind subset_by_value loses ~1e-5 absolute
    mu = scipy.linalg.eigh(Hmat, M, eigvals_only=True) if n else np.empty(0)
    return math.fsum((-mu[mu < 0]).tolist())


# --------------------------------------------------------------------------
# Half-space phase-space integral
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class HalfspaceProfile:
    """φ^2 on the half-space {y_d > 0}, vectorized over points (..., d),
    supported in |y'|_∞ ≤ ``width`` and y_d ≤ ``depth``."""

    phi_sq: Callable
    dim: int
    width: float
    depth: float

    def marginal(self, yd, n: int = 48, panels: int = 8) -> np.ndarray:
        """∫ φ^2(y', y_d) dy' at the given y_d."""
        yd = np.asarray(yd, dtype=float)
        if self.dim == 1:
            return np.asarray(self.phi_sq(yd[..., None]), dtype=float)
        if self.dim != 2:
            raise ValueError("profiles are implemented for d = 1, 2")
        g, w = leggauss(n)
        edges = np.linspace(-self.width, self.width, panels + 1)
        half = 0.5 * np.diff(edges)[:, None]
        y1 = ((0.5 * (edges[:-1] + edges[1:]))[:, None] + half * g).ravel()
        w1 = (half * w).ravel()
        pts = np.stack(np.broadcast_arrays(y1[None, :], yd.reshape(-1)[:, None]), axis=-1)
        vals = np.asarray(self.phi_sq(pts), dtype=float)
        return (vals @ w1).reshape(yd.shape)

    def mass(self, n: int = 48, panels: int = 8) -> float:
        """∫ φ^2."""
        g, w = leggauss(n)
        edges = np.linspace(0.0, self.depth, panels + 1)
        half = 0.5 * np.diff(edges)[:, None]
        y = ((0.5 * (edges[:-1] + edges[1:]))[:, None] + half * g).ravel()
        return float(np.sum((half * w).ravel() * self.marginal(y)))


def _composite(a: float, b: float, panels: int, order: int):
    g, w = leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)[:, None]
    mid = 0.5 * (edges[:-1] + edges[1:])[:, None]
    return (mid + half * g).ravel(), (half * w).ravel()


def halfspace_phase_integral(profile: HalfspaceProfile, b: float, h: float, order: int = 24) -> float:
    """(2π)^{1-d} ∬ φ^2(y) (1 - h^2|ξ|^2)_+ ξ_d y_d J_b(ξ_d y_d)^2 dξ dy.

    The ξ'-integral is done in closed form,
    ∫ (A - h^2|ξ'|^2)_+ dξ' = c_{d-1} h^{1-d} A^{(d+1)/2} (c_0 = 1, c_1 = 4/3),
    and ξ_d = sin(θ)/h removes the endpoint singularity of A^{(d+1)/2}.
    The remaining (θ, y)-integral is a tensor Gauss-Legendre rule.
    """
    d = profile.dim
    if d not in (1, 2):
        raise ValueError("d must be 1 or 2")
    c = 1.0 if d == 1 else 4.0 / 3.0
    freq = profile.depth / h  # phase of J_b(ξ_d y_d)^2 is about 2 ξ_d y_d
    tpan = max(4, int(math.ceil(2 * freq / math.pi)))
    theta, wt = _composite(0.0, 0.5 * math.pi, tpan, order)
    y, wy = _composite(0.0, profile.depth, tpan, order)
    marg = profile.marginal(y)
    keep = marg != 0.0
    y, wy, marg = y[keep], wy[keep], marg[keep]
    eta = np.sin(theta)
    z = np.outer(eta, y) / h
    jb = bessel_j(b, z)
    inner = (z * jb * jb) @ (wy * marg)
    xi_integral = float(np.sum(wt * np.cos(theta) ** (d + 2) * inner)) / h
    return (2 * math.pi) ** (1 - d) * c * h ** (1 - d) * xi_integral


def halfspace_decomposition(profile: HalfspaceProfile, b: float, h: float, order: int = 24) -> float:
    """L_d h^-d ∫φ^2 - L_{d-1} h^{1-d} ∫_0^∞ ∫ φ^2(y', ht) dy' P_b(t) dt."""
    d = profile.dim
    T = profile.depth / h
    t, wt = _composite(0.0, T, max(4, int(math.ceil(T / 2))), order)
    marg = profile.marginal(h * t)
    keep = marg != 0.0
    ctx = PnuContext(b, d)
    p = pnu_eval(ctx, t[keep])
    second = float(np.sum(wt[keep] * marg[keep] * p))
    return weyl_constant(d) * h**-d * profile.mass() - weyl_constant(d - 1) * h ** (1 - d) * second
