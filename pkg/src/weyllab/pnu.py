"""
The boundary-layer profile

    P_nu(t) = int_0^1 (1 - xi^2)^{(d+1)/2} (1/pi - xi t J_nu(xi t)^2) dxi,

its O(t^-2) tail, its total integral (which equals nu/2), and the Abelian
average used to pass to the limit in that integral.

All xi-integrals are taken in the variable xi = sin(theta), which turns the
weight (1 - xi^2)^{(d+1)/2} dxi into cos^{d+2}(theta) dtheta and removes the
endpoint singularity at xi = 1 for even d.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from .specfun import bessel_j_pair, bracket_antiderivative

__all__ = [
    "PnuContext",
    "PnuIntegral",
    "PnuConvergenceError",
    "pnu_eval",
    "pnu_integral",
    "pnu_integral_details",
    "pnu_tail_envelope",
    "abel_average",
]


class PnuConvergenceError(ArithmeticError):
    """Tail budget not met; ``bound`` carries the achieved tail bound."""

    def __init__(self, message: str, bound: float):
        super().__init__(message)
        self.bound = bound


@dataclass(frozen=True)
class PnuContext:
    nu: float
    dim: int = 1
    xi_rule: int = 64

    def __post_init__(self):
        if not (math.isfinite(self.nu) and self.nu >= 0):
            raise ValueError("nu must be finite and non-negative")
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError("dim must be an integer >= 1")
        if self.xi_rule < 16:
            raise ValueError("xi_rule must be >= 16")

    @property
    def weight_power(self) -> float:
        return 0.5 * (self.dim + 1)


def _theta_rule(freq: float, min_nodes: int, per_panel: int = 16) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre rule on [0, pi/2] for integrands oscillating at ``freq``.

    The first panel is split geometrically toward 0, where the integrand
    behaves like xi^{1 + 2 nu} and is not analytic for non-integer 2 nu.
    """
    panels = max(1, int(math.ceil((2.0 * freq + 1.0) / math.pi)))
    order = max(per_panel, int(math.ceil(min_nodes / panels)))
    g, w = leggauss(order)
    edges = np.linspace(0.0, 0.5 * math.pi, panels + 1)
    edges = np.concatenate([[0.0], edges[1] * 0.25 ** np.arange(12, 0, -1), edges[1:]])
    half = 0.5 * np.diff(edges)[:, None]
    mid = 0.5 * (edges[:-1] + edges[1:])[:, None]
    return (mid + half * g).ravel(), (half * w).ravel()


def _pnu_scalar(ctx: PnuContext, t: float) -> float:
    theta, w = _theta_rule(t, ctx.xi_rule)
    xi = np.sin(theta)
    weight = np.cos(theta) ** (ctx.dim + 2)
    z = xi * t
    j = bessel_j_pair(ctx.nu, z)[0]
    return float(np.sum(w * weight * (1.0 / math.pi - z * j * j)))


def pnu_eval(ctx: PnuContext, t):
    """P_nu(t) for t >= 0 (scalar or array)."""
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise ValueError("t must be finite and non-negative")
    out = np.array([_pnu_scalar(ctx, float(v)) for v in arr.ravel()]).reshape(arr.shape)
    return float(out) if arr.ndim == 0 else out


def pnu_partial_integral(ctx: PnuContext, T: float) -> float:
    """int_0^T P_nu(t) dt, with the t-integral done exactly under the xi-integral.

    Since d/ds F_nu(s) = s J_nu(s)^2, int_0^T xi t J_nu(xi t)^2 dt = F_nu(xi T) / xi.
    """
    theta, w = _theta_rule(T, ctx.xi_rule)
    xi = np.sin(theta)
    weight = np.cos(theta) ** (ctx.dim + 2)
    inner = T / math.pi - bracket_antiderivative(ctx.nu, xi * T) / xi
    return float(np.sum(w * weight * inner))


def pnu_tail_envelope(ctx: PnuContext, t_min: float, t_max: float, samples: int = 256) -> float:
    """sup of t^2 |P_nu(t)| over ``samples`` log-spaced points of [t_min, t_max]."""
    if t_min < 10 or t_max <= t_min:
        raise ValueError("need 10 <= t_min < t_max")
    t = np.geomspace(t_min, t_max, samples)
    return float(np.max(t * t * np.abs(pnu_eval(ctx, t))))


@dataclass(frozen=True)
class PnuIntegral:
    value: float
    T: float
    partial: float
    tail_estimate: float
    tail_bound: float
    envelope: float

    def __float__(self) -> float:
        return self.value


def truncation_point(tol: float) -> float:
    return min(1e4, max(100.0, 20.0 / tol))


def pnu_integral_details(ctx: PnuContext, tol: float = 1e-3) -> PnuIntegral:
    """int_0^inf P_nu(t) dt with its truncation metadata.

    The integral is truncated at T = min(1e4, max(100, 20/tol)). Because
    P_nu(t) = c/t^2 + (oscillating, faster decay), the missing tail is close
    to c/T and is estimated from the partial integrals at T and T/2. The
    envelope sup t^2|P| on [50, 500] bounds the tail by envelope/T.
    """
    if tol < 1e-6:
        raise ValueError("tol must be >= 1e-6")
    T = truncation_point(tol)
    full = pnu_partial_integral(ctx, T)
    half = pnu_partial_integral(ctx, 0.5 * T)
    tail = full - half
    env = pnu_tail_envelope(ctx, 50.0, 500.0)
    bound = env / T
    if bound > tol:
        raise PnuConvergenceError(f"tail bound {bound:.3g} exceeds tol {tol:.3g} at T={T:g}", bound)
    if abs(tail) > 2.0 * bound:
        raise PnuConvergenceError(
            f"tail estimate {tail:.3g} inconsistent with envelope bound {bound:.3g}", abs(tail)
        )
    return PnuIntegral(full + tail, T, full, tail, bound, env)


def pnu_integral(ctx: PnuContext, tol: float = 1e-3) -> float:
    """int_0^inf P_nu(t) dt (expected value nu/2)."""
    return pnu_integral_details(ctx, tol).value


def abel_average(f, alpha: float, T: float, panels: int | None = None, order: int = 16) -> float:
    """int_0^T (1 - t^2/T^2)^alpha f(t) dt for a vectorized callable ``f``.

    Integrated in t = T sin(theta), where the weight becomes
    cos^{2 alpha + 1}(theta) T dtheta.
    """
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    if not T > 0:
        raise ValueError("T must be positive")
    if panels is None:
        panels = max(4, int(math.ceil(T)))
    g, w = leggauss(order)
    edges = np.linspace(0.0, 0.5 * math.pi, panels + 1)
    half = 0.5 * np.diff(edges)[:, None]
    mid = 0.5 * (edges[:-1] + edges[1:])[:, None]
    theta = (mid + half * g).ravel()
    wt = (half * w).ravel()
    t = T * np.sin(theta)
    vals = np.asarray(f(t), dtype=float)
    return float(T * np.sum(wt * np.cos(theta) ** (2 * alpha + 1) * vals))
