"""
Eigenvalues of -Δ + (b^2 - 1/4)/dist(x, ∂Ω)^2 + V with Dirichlet conditions.

One-dimensional problems (and the radial problems of the disk) are
discretized with continuous piecewise-linear elements on meshes graded
towards the singular endpoints. The inverse-square term is integrated
element by element in closed form, so it is never sampled at a node.
Eigenvalues come from bisection on Sturm counts of the tridiagonal pencil
K - λM; the count at the cutoff doubles as a completeness certificate.
Two meshes (N and 2N elements per half) are combined by Richardson
extrapolation of the O(N^-2) error.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss

from .geometry import BoundaryField, Disk, Interval
from .specfun import bessel_j_zeros

__all__ = [
    "OperatorSpec",
    "GradedMesh",
    "DiscreteOperator",
    "Spectrum",
    "UnboundedBelowError",
    "IncompleteSpectrumError",
    "UnsupportedConfigurationError",
    "assemble_1d",
    "assemble_radial",
    "sturm_count",
    "eigenvalues_below",
    "solve_1d",
    "exact_model_spectrum",
    "disk_mode_spectrum",
    "disk_spectrum",
    "hardy_check",
]


class UnboundedBelowError(ValueError):
    """The quadratic form is not bounded below."""


class IncompleteSpectrumError(ArithmeticError):
    """Eigenvalue list does not match its Sturm count, or refinement stalled."""


class UnsupportedConfigurationError(ValueError):
    pass


@dataclass(frozen=True)
class OperatorSpec:
    """-Δ + (b^2 - 1/4) dist^-2 + V on ``dom``.

    ``singular_ends`` selects which interval endpoints carry the
    inverse-square term; ("a",) gives the one-sided model with a regular
    Dirichlet end at b. ``V`` is a vectorized function of position (of the
    radius for the disk), or None.
    """

    dom: Interval | Disk
    b: BoundaryField | float = 0.5
    V: Callable | None = None
    singular_ends: tuple[str, ...] = ("a", "b")

    def __post_init__(self):
        if not isinstance(self.b, BoundaryField):
            b = float(self.b)
            if not b > 0:
                raise UnboundedBelowError(
                    f"b = {b}: b^2 - 1/4 must exceed -1/4, otherwise the form is unbounded below"
                )
            object.__setattr__(self, "b", BoundaryField.constant(b))
        if not set(self.singular_ends) <= {"a", "b"}:
            raise ValueError("singular_ends must be a subset of ('a', 'b')")

    @property
    def b_min(self) -> float:
        if self.b.is_constant:
            return self.b.value
        dom = self.dom
        if isinstance(dom, Interval):
            return float(min(self.b(np.array([dom.a]))[0], self.b(np.array([dom.b]))[0]))
        return float(np.min(self.b.func(dom.boundary_point(np.linspace(0, 2 * math.pi, 256)))))

    def coupling(self, x):
        """b(x)^2 - 1/4 at positions x."""
        bx = np.asarray(self.b(np.asarray(x, dtype=float)), dtype=float)
        if np.any(bx <= 0):
            raise UnboundedBelowError("b must be positive")
        return bx * bx - 0.25


@dataclass(frozen=True)
class GradedMesh:
    """Nodes x_j = a + (L/2)(j/N)^γ on each half, mirrored, with a node at the midpoint."""

    n_half: int = 400
    grading: float | None = None

    def exponent(self, b_min: float) -> float:
        # the eigenfunctions behave like s^{b+1/2}; γ ≥ 1/b keeps the first
        # element's energy error at O(N^-2)
        if self.grading is not None:
            return self.grading
        return max(2.0, 1.25 / b_min)

    def nodes(self, a: float, b: float, gamma: float) -> np.ndarray:
        half = 0.5 * (b - a)
        t = (np.arange(self.n_half + 1) / self.n_half) ** gamma * half
        return np.concatenate([a + t, (b - t[::-1])[1:]])

    def refined(self) -> "GradedMesh":
        return GradedMesh(2 * self.n_half, self.grading)


# --------------------------------------------------------------------------
# Element integrals
# --------------------------------------------------------------------------

_GL10 = leggauss(10)
_GL4 = leggauss(4)


def _gauss(p, q, rule):
    g, w = rule
    half = 0.5 * (q - p)
    mid = 0.5 * (q + p)
    return mid[:, None] + half[:, None] * g, half[:, None] * w


def _inv_power_elements(p, q, power: int):
    """∫ N_p N_p / s^k, ∫ N_p N_q / s^k, ∫ N_q N_q / s^k over [p, q] for k = 1, 2.

    N_p is the hat equal to 1 at s = p, N_q equal to 1 at s = q. Closed form
    when the element is long relative to its distance from s = 0, Gauss
    otherwise (the closed form cancels badly for H << p). For p = 0 only the
    N_q N_q entry is finite.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    H = q - p
    pp = np.where(p > 0, p, 1.0)
    closed = (p == 0) | (H >= 0.1 * pp)
    with np.errstate(divide="ignore", invalid="ignore"):
        A1 = np.log(q / pp)
        if power == 2:
            A2 = H / (pp * q)
            Ipp = (q * q * A2 - 2 * q * A1 + H) / H**2
            Ipq = (-H + (p + q) * A1 - p * q * A2) / H**2
            Iqq = (H - 2 * p * A1 + p * p * A2) / H**2
            zero_qq = 1.0 / H
        else:
            Ipp = (q * q * A1 - 2 * q * H + 0.5 * (q * q - p * p)) / H**2
            Ipq = ((p + q) * H - p * q * A1 - 0.5 * (q * q - p * p)) / H**2
            Iqq = (0.5 * (q * q - p * p) - 2 * p * H + p * p * A1) / H**2
            zero_qq = 0.5 * np.ones_like(H)
    Ipp = np.where(p == 0, np.inf, Ipp)
    Ipq = np.where(p == 0, np.inf, Ipq)
    Iqq = np.where(p == 0, zero_qq, Iqq)
    if not np.all(closed):
        idx = ~closed
        s, w = _gauss(p[idx], q[idx], _GL10)
        Np = (q[idx, None] - s) / H[idx, None]
        Nq = (s - p[idx, None]) / H[idx, None]
        ws = w / s**power
        Ipp = Ipp.copy()
        Ipq = Ipq.copy()
        Iqq = Iqq.copy()
        Ipp[idx] = np.sum(ws * Np * Np, axis=1)
        Ipq[idx] = np.sum(ws * Np * Nq, axis=1)
        Iqq[idx] = np.sum(ws * Nq * Nq, axis=1)
    return Ipp, Ipq, Iqq


def _singular_term(x_l, x_r, s_of, coupling, sing_at_left):
    """Element matrices of coupling(x) N_i N_j / s(x)^2 where s is the distance
    to the singular endpoint; coupling is frozen at the element midpoint and
    the variation is added by Gauss quadrature."""
    s_l, s_r = s_of(x_l), s_of(x_r)
    p = np.where(sing_at_left, s_l, s_r)
    q = np.where(sing_at_left, s_r, s_l)
    Ipp, Ipq, Iqq = _inv_power_elements(p, q, 2)
    mid = 0.5 * (x_l + x_r)
    c_mid = coupling(mid)
    # Ipp belongs to the node nearer the singular end
    Ill = np.where(sing_at_left, Ipp, Iqq) * c_mid
    Irr = np.where(sing_at_left, Iqq, Ipp) * c_mid
    Ilr = Ipq * c_mid
    # variation of the coupling inside each element
    xg, wg = _gauss(x_l, x_r, _GL10)
    dc = coupling(xg) - c_mid[:, None]
    if np.any(dc != 0):
        H = x_r - x_l
        Nl = (x_r[:, None] - xg) / H[:, None]
        Nr = (xg - x_l[:, None]) / H[:, None]
        ws = wg * dc / s_of(xg) ** 2
        Ill = Ill + np.where(np.isfinite(Ill), np.sum(ws * Nl * Nl, axis=1), 0.0)
        Irr = Irr + np.where(np.isfinite(Irr), np.sum(ws * Nr * Nr, axis=1), 0.0)
        Ilr = Ilr + np.where(np.isfinite(Ilr), np.sum(ws * Nl * Nr, axis=1), 0.0)
    return Ill, Ilr, Irr


@dataclass(frozen=True)
class DiscreteOperator:
    """Tridiagonal pencil (K, M) on the interior nodes ``x``."""

    x: np.ndarray
    k_diag: np.ndarray
    k_off: np.ndarray
    m_diag: np.ndarray
    m_off: np.ndarray
    nodes: np.ndarray = field(repr=False)
    free_left: bool = False
    meta: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return self.k_diag.size

    def count_below(self, sigma) -> np.ndarray:
        return sturm_count(self, sigma)

    def dense(self) -> tuple[np.ndarray, np.ndarray]:
        K = np.diag(self.k_diag) + np.diag(self.k_off, 1) + np.diag(self.k_off, -1)
        M = np.diag(self.m_diag) + np.diag(self.m_off, 1) + np.diag(self.m_off, -1)
        return K, M


def _assemble(nodes, stiff_w, mass_w, extra, free_left=False, meta=None) -> DiscreteOperator:
    """Assemble per-element 2x2 blocks into a tridiagonal pencil.

    ``stiff_w``/``mass_w`` give the element stiffness factor and mass
    matrix; ``extra`` lists (Ill, Ilr, Irr) potential blocks.
    """
    n_el = nodes.size - 1
    Kd = np.zeros(nodes.size)
    Ko = np.zeros(n_el)
    Md = np.zeros(nodes.size)
    Mo = np.zeros(n_el)
    Kd[:-1] += stiff_w
    Kd[1:] += stiff_w
    Ko -= stiff_w
    mll, mlr, mrr = mass_w
    Md[:-1] += mll
    Md[1:] += mrr
    Mo += mlr
    for ll, lr, rr in extra:
        Kd[:-1] += np.where(np.isfinite(ll), ll, 0.0)
        Kd[1:] += np.where(np.isfinite(rr), rr, 0.0)
        Ko += np.where(np.isfinite(lr), lr, 0.0)
    lo = 0 if free_left else 1
    sl = slice(lo, nodes.size - 1)
    return DiscreteOperator(
        x=nodes[sl],
        k_diag=Kd[sl].copy(),
        k_off=Ko[lo : nodes.size - 2].copy(),
        m_diag=Md[sl].copy(),
        m_off=Mo[lo : nodes.size - 2].copy(),
        nodes=nodes,
        free_left=free_left,
        meta=meta or {},
    )


def assemble_1d(spec: OperatorSpec, mesh: GradedMesh) -> DiscreteOperator:
    """P1 stiffness, potential and consistent mass on the graded mesh."""
    dom = spec.dom
    if not isinstance(dom, Interval):
        raise UnsupportedConfigurationError("assemble_1d needs an Interval")
    gamma = mesh.exponent(spec.b_min)
    nodes = mesh.nodes(dom.a, dom.b, gamma)
    xl, xr = nodes[:-1], nodes[1:]
    H = xr - xl
    extra = []
    mid = 0.5 * (dom.a + dom.b)
    ends = set(spec.singular_ends)
    if ends == {"a", "b"}:
        left_half = xr <= mid + 1e-15 * abs(mid)

        def s_of(x):
            return np.minimum(x - dom.a, dom.b - x)

        sing_left = left_half
    elif ends == {"a"}:
        s_of = lambda x: x - dom.a  # noqa: E731
        sing_left = np.ones(xl.size, dtype=bool)
    elif ends == {"b"}:
        s_of = lambda x: dom.b - x  # noqa: E731
        sing_left = np.zeros(xl.size, dtype=bool)
    else:
        s_of = None
    if s_of is not None and not (spec.b.is_constant and spec.b.value == 0.5):
        extra.append(_singular_term(xl, xr, s_of, spec.coupling, sing_left))
    if spec.V is not None:
        xg, wg = _gauss(xl, xr, _GL4)
        Nl = (xr[:, None] - xg) / H[:, None]
        Nr = (xg - xl[:, None]) / H[:, None]
        v = wg * spec.V(xg)
        extra.append((np.sum(v * Nl * Nl, 1), np.sum(v * Nl * Nr, 1), np.sum(v * Nr * Nr, 1)))
    meta = {"n_half": mesh.n_half, "grading": gamma, "elements": int(H.size)}
    return _assemble(nodes, 1.0 / H, (H / 3, H / 6, H / 3), extra, meta=meta)


def assemble_radial(spec: OperatorSpec, m: int, mesh: GradedMesh) -> DiscreteOperator:
    """Mode-m radial form ∫ (u'^2 + m^2 u^2/r^2 + c u^2/(R-r)^2 + V u^2) r dr
    against the mass ∫ u^2 r dr on (0, R)."""
    dom = spec.dom
    if not isinstance(dom, Disk):
        raise UnsupportedConfigurationError("assemble_radial needs a Disk")
    if not spec.b.is_constant:
        raise UnsupportedConfigurationError("the disk solver needs constant b")
    R = dom.radius
    gamma = mesh.exponent(spec.b_min)
    nodes = mesh.nodes(0.0, R, gamma)
    rl, rr = nodes[:-1], nodes[1:]
    H = rr - rl
    stiff = 0.5 * (rl + rr) / H  # ∫ r dr / H^2
    mll = H * (3 * rl + rr) / 12
    mlr = H * (rl + rr) / 12
    mrr = H * (rl + 3 * rr) / 12
    extra = []
    if m:
        # m^2 ∫ N_i N_j / r
        Ipp, Ipq, Iqq = _inv_power_elements(rl, rr, 1)
        extra.append((m * m * Ipp, m * m * Ipq, m * m * Iqq))
    c = spec.b.value ** 2 - 0.25
    if c != 0.0:
        # c ∫ N_i N_j (R - s)/s^2 with s = R - r; the node at s = p is the right node
        s_l, s_r = R - rr, R - rl
        A = _inv_power_elements(s_l, s_r, 2)
        B = _inv_power_elements(s_l, s_r, 1)
        with np.errstate(invalid="ignore"):  # inf - inf on the eliminated boundary node
            blk = [c * (R * a - b_) for a, b_ in zip(A, B)]
        # in s, "p" is the right (outer) node
        extra.append((blk[2], blk[1], blk[0]))
    if spec.V is not None:
        xg, wg = _gauss(rl, rr, _GL4)
        Nl = (rr[:, None] - xg) / H[:, None]
        Nr = (xg - rl[:, None]) / H[:, None]
        v = wg * spec.V(xg) * xg
        extra.append((np.sum(v * Nl * Nl, 1), np.sum(v * Nl * Nr, 1), np.sum(v * Nr * Nr, 1)))
    meta = {"n_half": mesh.n_half, "grading": gamma, "mode": m}
    return _assemble(nodes, stiff, (mll, mlr, mrr), extra, free_left=(m == 0), meta=meta)


# --------------------------------------------------------------------------
# Sturm counts and bisection
# --------------------------------------------------------------------------


def sturm_count(opr: DiscreteOperator, sigma) -> np.ndarray:
    """Number of eigenvalues of the pencil strictly below each shift.

    By Sylvester's law of inertia (M is positive definite) this is the
    number of negative pivots in the LDL^T factorization of K - σM.
    """
    sig = np.atleast_1d(np.asarray(sigma, dtype=float))
    kd, md = opr.k_diag.tolist(), opr.m_diag.tolist()
    ko, mo = opr.k_off.tolist(), opr.m_off.tolist()
    tiny = np.finfo(float).tiny ** 0.5
    count = np.zeros(sig.size, dtype=np.int64)
    d = kd[0] - sig * md[0]
    for i in range(opr.size):
        if i:
            e = ko[i - 1] - sig * mo[i - 1]
            d = (kd[i] - sig * md[i]) - e * e / d
        d[d == 0.0] = -tiny
        count += d < 0
    return count if np.ndim(sigma) else count[0]


def _lower_bound(opr: DiscreteOperator) -> float:
    lo = -1.0
    while sturm_count(opr, lo) > 0:
        lo *= 4.0
        if lo < -1e300:
            raise UnboundedBelowError("no lower bound found")
    return lo


def _bisect(opr: DiscreteOperator, n: int, lo: float, hi: float, rtol: float = 2e-15) -> np.ndarray:
    """First n eigenvalues by simultaneous bisection on Sturm counts."""
    if n == 0:
        return np.empty(0)
    k = np.arange(n)
    lo_v = np.full(n, lo)
    hi_v = np.full(n, hi)
    for _ in range(200):
        mid = 0.5 * (lo_v + hi_v)
        width = hi_v - lo_v
        active = width > rtol * np.maximum(np.abs(mid), 1.0)
        if not np.any(active):
            break
        c = sturm_count(opr, mid[active])
        ka = k[active]
        below = c > ka  # at least k+1 eigenvalues below mid -> eigenvalue k < mid
        hi_a, lo_a = hi_v[active], lo_v[active]
        hi_v[active] = np.where(below, mid[active], hi_a)
        lo_v[active] = np.where(below, lo_a, mid[active])
    return 0.5 * (lo_v + hi_v)


def discrete_eigenvalues_below(opr: DiscreteOperator, Lambda: float) -> tuple[np.ndarray, int]:
    """All pencil eigenvalues < Λ and the Sturm count at Λ."""
    n = int(sturm_count(opr, Lambda))
    lo = _lower_bound(opr)
    vals = _bisect(opr, n, lo, Lambda)
    if vals.size != n:
        raise IncompleteSpectrumError("bisection lost eigenvalues")
    return vals, n


def hardy_check(spec: OperatorSpec, mesh: GradedMesh) -> float:
    """Smallest eigenvalue of the V = 0 discrete operator; must be positive."""
    bare = OperatorSpec(spec.dom, spec.b, None, spec.singular_ends)
    opr = assemble_1d(bare, mesh) if isinstance(spec.dom, Interval) else assemble_radial(bare, 0, mesh)
    if sturm_count(opr, 0.0) > 0:
        raise UnboundedBelowError("discrete Hardy check failed: V = 0 operator has a non-positive eigenvalue")
    hi = 1.0
    while sturm_count(opr, hi) == 0:
        hi *= 4.0
    return float(_bisect(opr, 1, 0.0, hi)[0])


# --------------------------------------------------------------------------
# Spectrum records
# --------------------------------------------------------------------------


@dataclass
class Spectrum:
    eigenvalues: np.ndarray
    multiplicities: np.ndarray
    cutoff: float
    certificate: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.eigenvalues = np.asarray(self.eigenvalues, dtype=float)
        self.multiplicities = np.asarray(self.multiplicities, dtype=np.int64)
        if self.eigenvalues.shape != self.multiplicities.shape:
            raise ValueError("eigenvalues and multiplicities differ in length")
        if self.eigenvalues.size and np.any(np.diff(self.eigenvalues) < 0):
            raise ValueError("eigenvalues must be sorted")
        if self.eigenvalues.size and self.eigenvalues[-1] > self.cutoff:
            raise ValueError("eigenvalue above cutoff")

    def __len__(self) -> int:
        return self.eigenvalues.size

    @property
    def count(self) -> int:
        """Number of eigenvalues ≤ cutoff counted with multiplicity."""
        return int(self.multiplicities.sum())

    def expanded(self) -> np.ndarray:
        return np.repeat(self.eigenvalues, self.multiplicities)

    def scaled(self, factor: float) -> "Spectrum":
        return Spectrum(self.eigenvalues * factor, self.multiplicities.copy(), self.cutoff * factor,
                        dict(self.certificate), dict(self.meta))

    def write(self, path) -> tuple[Path, Path]:
        path = Path(path)
        with path.open("w") as fh:
            fh.write("index,eigenvalue,multiplicity\n")
            for i, (v, m) in enumerate(zip(self.eigenvalues, self.multiplicities)):
                fh.write(f"{i},{v:.17g},{m}\n")
        side = path.with_suffix(path.suffix + ".json")
        side.write_text(json.dumps({"cutoff": self.cutoff, "certificate": self.certificate,
                                    "meta": self.meta}, indent=2, sort_keys=True, default=_jsonable) + "\n")
        return path, side

    @classmethod
    def read(cls, path) -> "Spectrum":
        path = Path(path)
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        side = path.with_suffix(path.suffix + ".json")
        info = json.loads(side.read_text()) if side.exists() else {}
        vals = data[:, 1] if data.size else np.empty(0)
        mult = data[:, 2].astype(np.int64) if data.size else np.empty(0, dtype=np.int64)
        cutoff = float(info.get("cutoff", vals[-1] if vals.size else 0.0))
        return cls(vals, mult, cutoff, info.get("certificate", {}), info.get("meta", {}))


def _jsonable(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not serializable: {type(obj).__name__}")


def eigenvalues_below(opr: DiscreteOperator, Lambda: float) -> Spectrum:
    """Certified discrete spectrum of one operator below Λ (no extrapolation)."""
    vals, n = discrete_eigenvalues_below(opr, Lambda)
    if vals.size and Lambda < vals[0]:
        raise ValueError("Λ below the smallest eigenvalue")
    cert = {"sturm_count": n, "listed": int(vals.size)}
    if cert["sturm_count"] != cert["listed"]:
        raise IncompleteSpectrumError(f"Sturm count {n} != {vals.size} listed")
    return Spectrum(vals, np.ones(vals.size, dtype=np.int64), Lambda, cert, dict(opr.meta))


SEARCH_MARGIN = 0.02


def _extrapolated(build, Lambda: float, mesh: GradedMesh, rtol: float, max_refine: int):
    """Richardson-extrapolated eigenvalues ≤ Λ with optional mesh doubling.

    P1 eigenvalues are upper bounds, so an exact eigenvalue just below Λ may
    have its discrete counterpart just above. Both meshes are therefore
    searched up to (1 + SEARCH_MARGIN)Λ and the extrapolated list is cut at Λ.
    The certificate records the fine-mesh Sturm counts at Λ and at the search
    bound; the list length must lie between them.
    """
    bound = Lambda * (1.0 + SEARCH_MARGIN)
    coarse_opr = build(mesh)
    prev = None
    history = []
    for level in range(max_refine + 1):
        fine_mesh = mesh.refined()
        fine_opr = build(fine_mesh)
        fine, n_ext = discrete_eigenvalues_below(fine_opr, bound)
        n_at = int(sturm_count(fine_opr, Lambda))
        if n_ext == 0:
            extrap = fine
        else:
            hi = bound
            while sturm_count(coarse_opr, hi) < n_ext:
                hi *= 1.25
            coarse = _bisect(coarse_opr, n_ext, _lower_bound(coarse_opr), hi)
            extrap = np.minimum((4.0 * fine - coarse) / 3.0, fine)
        extrap = np.sort(extrap)
        change = np.inf
        if prev is not None and prev.size:
            k = min(prev.size, extrap.size)
            change = float(np.max(np.abs(extrap[:k] - prev[:k]) / np.abs(extrap[:k])))
        history.append({"n_half": fine_mesh.n_half, "count": n_at, "change": change})
        if change <= rtol or level == max_refine:
            vals = extrap[extrap <= Lambda]
            cert = {"sturm_count": n_at, "search_bound": bound, "sturm_count_search": n_ext,
                    "listed": int(vals.size), "converged": bool(change <= rtol), "history": history}
            if not n_at <= vals.size <= n_ext:
                raise IncompleteSpectrumError(f"listed {vals.size} outside Sturm bracket [{n_at}, {n_ext}]")
            return vals, cert, fine_mesh
        prev = extrap
        mesh, coarse_opr = fine_mesh, fine_opr
    raise AssertionError("unreachable")


def solve_1d(spec: OperatorSpec, Lambda: float, mesh: GradedMesh | None = None,
             rtol: float = 1e-6, max_refine: int = 0, require_converged: bool = False) -> Spectrum:
    """Eigenvalues ≤ Λ of the interval operator, Richardson-extrapolated.

    With ``max_refine > 0`` the mesh is doubled until successive extrapolated
    spectra agree to ``rtol``.
    """
    if mesh is None:
        mesh = default_mesh(spec, Lambda)
    vals, cert, fine_mesh = _extrapolated(lambda m: assemble_1d(spec, m), Lambda, mesh, rtol, max_refine)
    if require_converged and not cert["converged"]:
        raise IncompleteSpectrumError(f"refinement did not reach rtol={rtol}: {cert['history'][-1]}")
    meta = {"method": "p1-graded-richardson", "n_half": fine_mesh.n_half,
            "grading": fine_mesh.exponent(spec.b_min)}
    return Spectrum(vals, np.ones(vals.size, dtype=np.int64), Lambda, cert, meta)


def default_mesh(spec: OperatorSpec, Lambda: float) -> GradedMesh:
    """Coarse mesh whose doubled version resolves eigenfunctions up to Λ."""
    L = spec.dom.measure if isinstance(spec.dom, Interval) else spec.dom.radius
    waves = L * math.sqrt(max(Lambda, 1.0)) / math.pi
    return GradedMesh(n_half=int(max(200, math.ceil(6 * waves))))


# --------------------------------------------------------------------------
# Exact models and the disk
# --------------------------------------------------------------------------


def exact_model_spectrum(b: float, L: float, Lambda: float) -> Spectrum:
    """(j_{b,k}/L)^2 ≤ Λ: the model -u'' + (b^2 - 1/4)x^-2 u on (0, L) with u(L) = 0."""
    if not b > 0:
        raise ValueError("b must be positive")
    zeros = bessel_j_zeros(b, upto=L * math.sqrt(Lambda))
    vals = (zeros / L) ** 2
    vals = vals[vals <= Lambda]
    cert = {"zero_count": int(vals.size), "listed": int(vals.size)}
    return Spectrum(vals, np.ones(vals.size, dtype=np.int64), Lambda, cert, {"method": "bessel-zeros", "b": b, "L": L})


def disk_mode_spectrum(spec: OperatorSpec, m: int, Lambda: float, method: str = "auto",
                       mesh: GradedMesh | None = None) -> Spectrum:
    """Mode-m eigenvalues ≤ Λ (each of multiplicity 2 in the full disk if m ≥ 1)."""
    dom = spec.dom
    if not isinstance(dom, Disk):
        raise UnsupportedConfigurationError("disk_mode_spectrum needs a Disk")
    if not spec.b.is_constant:
        raise UnsupportedConfigurationError("non-radial b is not supported on the disk")
    if m < 0:
        raise ValueError("mode must be non-negative")
    if method == "auto":
        method = "bessel" if spec.b.value == 0.5 and spec.V is None else "fem"
    R = dom.radius
    if method == "bessel":
        if spec.b.value != 0.5 or spec.V is not None:
            raise UnsupportedConfigurationError("Bessel zeros only describe b = 1/2, V = 0")
        vals = (bessel_j_zeros(float(m), upto=R * math.sqrt(Lambda)) / R) ** 2
        vals = vals[vals <= Lambda]
        cert = {"zero_count": int(vals.size), "listed": int(vals.size)}
        return Spectrum(vals, np.ones(vals.size, dtype=np.int64), Lambda, cert, {"method": "bessel-zeros", "mode": m})
    if mesh is None:
        mesh = default_mesh(spec, Lambda)
    vals, cert, fine_mesh = _extrapolated(lambda ms: assemble_radial(spec, m, ms), Lambda, mesh, 1e-6, 0)
    meta = {"method": "p1-radial-richardson", "mode": m, "n_half": fine_mesh.n_half}
    return Spectrum(vals, np.ones(vals.size, dtype=np.int64), Lambda, cert, meta)


def disk_spectrum(spec: OperatorSpec, Lambda: float, method: str = "auto", mesh: GradedMesh | None = None,
                  workers: int = 1) -> Spectrum:
    """Merge modes m = 0..m_max with multiplicity 2 for m ≥ 1.

    m_max = ceil(R sqrt(Λ)) + 5; the certificate requires mode m_max to
    contribute nothing below Λ. Modes may be solved on ``workers`` threads;
    the merge is a stable sort, so the result does not depend on scheduling.
    """
    R = spec.dom.radius
    m_max = int(math.ceil(R * math.sqrt(Lambda))) + 5

    def one(m):
        return disk_mode_spectrum(spec, m, Lambda, method, mesh)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            modes = list(pool.map(one, range(m_max + 1)))
    else:
        modes = [one(m) for m in range(m_max + 1)]
    vals, mult, per_mode = [], [], []
    for m, sp in enumerate(modes):
        per_mode.append(len(sp))
        vals.append(sp.eigenvalues)
        mult.append(np.full(len(sp), 1 if m == 0 else 2, dtype=np.int64))
    if per_mode[-1] != 0:
        raise IncompleteSpectrumError(f"mode {m_max} still has eigenvalues below Λ")
    v = np.concatenate(vals)
    mu = np.concatenate(mult)
    order = np.argsort(v, kind="stable")
    cert = {"m_max": m_max, "per_mode": per_mode, "listed": int(mu.sum())}
    return Spectrum(v[order], mu[order], Lambda, cert, {"method": "disk-modes", "R": R, "b": spec.b.value})
