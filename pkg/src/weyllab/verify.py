"""Invariant battery behind ``weyllab verify``: one CSV line per check."""

from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.special as sc

from . import geometry, partition, pnu, riesz, specfun, spectra

__all__ = ["CheckResult", "verify_suite", "results_csv", "FAULTS"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    value: float
    threshold: float
    seconds: float
    detail: str = ""


def _corrupt_weyl(d: int) -> float:
    return 1.1 * riesz.weyl_constant(d)


FAULTS: dict[str, Callable[[int], float]] = {"weyl-constant": _corrupt_weyl}


def _specfun_j(level):
    nus = [0.0, 0.5, 1.0, 2.5, 7.3]
    x = np.linspace(0.0, 60.0, 601 if level == "fast" else 6001)
    return max(float(np.max(np.abs(specfun.bessel_j(nu, x) - sc.jv(nu, x)))) for nu in nus), 1e-12


def _specfun_zero(level):
    return abs(specfun.bessel_j_zero(1.0, 1) - float(sc.jn_zeros(1, 1)[0])), 1e-12


def _specfun_hankel(level):
    plan = specfun.make_hankel_plan(0.0)
    g = np.exp(-plan.nodes**2 / 2) * plan.nodes**0.5
    back = specfun.hankel_transform(plan, specfun.hankel_transform(plan, g))
    return float(np.max(np.abs(back - g))), 1e-6


def _pnu_integral(level):
    cases = [(1.0, 1)] if level == "fast" else [(nu, d) for nu in (0.0, 0.5, 1.0, 2.0) for d in (1, 2, 3)]
    return max(abs(pnu.pnu_integral(pnu.PnuContext(nu, d)) - nu / 2) for nu, d in cases), 1e-3


def _pnu_closed_form(level):
    t = np.array([0.3, 3.7, 25.0])
    a = 2 * t
    closed = (2 / math.pi) * (np.sin(a) / a**3 - np.cos(a) / a**2)
    return float(np.max(np.abs(pnu.pnu_eval(pnu.PnuContext(0.5, 1), t) - closed))), 1e-12


def _geometry_chart(level):
    n = 200 if level == "fast" else 10000
    disk = geometry.Disk(1.0)
    chart = geometry.straightening_chart(disk, np.array([0.0, -1.0]), 0.1)
    rng = np.random.default_rng(7)
    r = 0.1 * np.sqrt(rng.uniform(0, 1, 4 * n))
    a = rng.uniform(0, 2 * math.pi, 4 * n)
    pts = chart.x0 + np.stack([r * np.cos(a), r * np.sin(a)], axis=-1)
    pts = pts[disk.contains(pts)][:n]
    jac = float(np.max(np.abs(chart.jacobian_fd(pts) - 1)))
    lower = float(np.max(disk.dist(pts) - chart.flat_distance(pts)))
    return max(jac, lower if lower > 0 else 0.0), 1e-8


def _partition_norm(level):
    n = 5 if level == "fast" else 100
    worst = 0.0
    for dom, pts in (
        (geometry.Interval(0, 1), np.linspace(0.003, 0.997, n)),
        (geometry.Disk(1.0), np.stack([np.linspace(0.0, 0.99, n), np.linspace(0.0, 0.1, n)], axis=-1)),
    ):
        cfg = partition.PartitionConfig(dom, 0.05)
        worst = max(worst, max(abs(partition.partition_normalization(cfg, p) - 1) for p in pts))
    return worst, 1e-5


def _spectra_model(level):
    bs = [1.0] if level == "fast" else [0.3, 0.5, 1.0, 2.0]
    worst = 0.0
    for b in bs:
        exact = spectra.exact_model_spectrum(b, 1.0, 4000.0).eigenvalues[:10]
        op = spectra.OperatorSpec(geometry.Interval(0, 1), b, singular_ends=("a",))
        got = spectra.solve_1d(op, exact[-1] * 1.01, spectra.GradedMesh(200)).eigenvalues[:10]
        worst = max(worst, float(np.max(np.abs(got / exact - 1))))
    return worst, 1e-4


def _riesz_weyl(level, constants):
    val = riesz.weyl_two_term(geometry.Interval(0, 1), 0.5, 0.1, constants=constants)
    return abs(val - (20 / (3 * math.pi) - 0.5)), 1e-9


def _riesz_fit(level, constants):
    sp = spectra.exact_model_spectrum(0.5, 1.0, 1e6)
    fit = riesz.fit_asymptotics(riesz.riesz_curve(sp, np.geomspace(1e-3, 1e-2, 40)), 1)
    # each gap divided by its tolerance: 0.5% relative on c0, 0.05 absolute on c1
    c0_gap = abs(fit.c0 - constants(1)) / constants(1) / 5e-3
    c1_gap = abs(fit.c1 + constants(0) / 2) / 0.05
    return max(c0_gap, c1_gap), 1.0


def _riesz_density(level):
    return abs(riesz.density_functional(geometry.Interval(0, 1), 1e-3, np.ones_like) - 1.0), 0.05


def _riesz_halfspace(level):
    prof = riesz.HalfspaceProfile(
        lambda p: np.exp(-2 / np.clip(1 - ((p[..., -1] - 0.3) / 0.5) ** 2, 1e-300, None)) * (np.abs(p[..., -1] - 0.3) < 0.5),
        1, 0.5, 0.8)
    a = riesz.halfspace_phase_integral(prof, 1.0, 0.1)
    b = riesz.halfspace_decomposition(prof, 1.0, 0.1)
    return abs(a - b) / abs(a), 1e-5


def _disk_sweep(level, constants):
    op = spectra.OperatorSpec(geometry.Disk(1.0), 0.5)
    sp = spectra.disk_spectrum(op, 0.02**-2)
    fit = riesz.fit_asymptotics(riesz.riesz_curve(sp, np.geomspace(0.02, 0.1, 40)), 2, (0.02, 0.1))
    c0 = constants(2) * math.pi
    return abs(fit.c0 - c0) / c0, 1e-2


_FAST = [
    ("specfun.bessel_j_vs_scipy", _specfun_j, False),
    ("specfun.first_zero_j1", _specfun_zero, False),
    ("specfun.hankel_roundtrip", _specfun_hankel, False),
    ("pnu.integral_identity", _pnu_integral, False),
    ("pnu.half_order_closed_form", _pnu_closed_form, False),
    ("geometry.chart_certificates", _geometry_chart, False),
    ("partition.normalization", _partition_norm, False),
    ("spectra.one_sided_model", _spectra_model, False),
    ("riesz.weyl_two_term", _riesz_weyl, True),
    ("riesz.fit_interval", _riesz_fit, True),
    ("riesz.density_functional", _riesz_density, False),
    ("riesz.halfspace_identity", _riesz_halfspace, False),
]
_FULL = [("riesz.disk_fit", _disk_sweep, True)]


def verify_suite(level: str = "fast", fault: str | None = None) -> list[CheckResult]:
    """Run the battery. ``fault`` names an injected defect (see FAULTS)."""
    if level not in {"fast", "full"}:
        raise ValueError("level must be 'fast' or 'full'")
    constants = riesz.weyl_constant if fault is None else FAULTS[fault]
    checks = _FAST + (_FULL if level == "full" else [])
    out = []
    for name, fn, uses_constants in checks:
        t0 = time.perf_counter()
        try:
            value, threshold = fn(level, constants) if uses_constants else fn(level)
            passed = bool(value < threshold)
            detail = ""
        except Exception as exc:  # a crashing check is a failed check
            value, threshold, passed, detail = float("nan"), float("nan"), False, f"{type(exc).__name__}: {exc}"
        out.append(CheckResult(name, passed, float(value), float(threshold), time.perf_counter() - t0, detail))
    return out


def results_csv(results: list[CheckResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["check", "status", "value", "threshold", "seconds", "detail"])
    for r in results:
        w.writerow([r.name, "pass" if r.passed else "fail", f"{r.value:.17g}", f"{r.threshold:.17g}", f"{r.seconds:.3f}", r.detail])
    return buf.getvalue()
