"""Acceptance criteria: one printed PASS/FAIL line per criterion.

Each check returns (passed, detail); runtime budgets are part of the check.
"""

import math
import time

import numpy as np
import pytest
from scipy.integrate import quad

from weyllab import geometry, partition, pnu, riesz, specfun, spectra
from weyllab.geometry import Disk, Interval


def _bump(x, c, r):
    s = (np.asarray(x, dtype=float) - c) / r
    out = np.zeros_like(s)
    m = np.abs(s) < 1
    out[m] = np.exp(1 - 1 / (1 - s[m] ** 2))
    return out


def c01_pnu_integral():
    worst = max(abs(pnu.pnu_integral(pnu.PnuContext(nu, d)) - nu / 2)
                for nu in (0.0, 0.25, 0.5, 1.0, 2.0) for d in (1, 2, 3))
    return worst < 1e-3, f"max |int P_nu - nu/2| = {worst:.2e} (< 1e-3)", 30


def c02_pnu_tail():
    worst, sups = 0.0, []
    for nu in (0.0, 0.5, 1.0, 2.0):
        for d in (1, 2):
            ctx = pnu.PnuContext(nu, d)
            a = pnu.pnu_tail_envelope(ctx, 50, 500, samples=256)
            b = pnu.pnu_tail_envelope(ctx, 50, 500, samples=512)
            sups.append(b)
            worst = max(worst, abs(b - a) / a)
    ok = all(math.isfinite(s) for s in sups) and worst < 0.25
    return ok, f"max sup t^2|P| = {max(sups):.3g}, resampling change {worst:.2%} (< 25%)", 30


def c03_hankel():
    worst = 0.0
    for nu in (0.0, 0.5, 1.0):
        plan = specfun.make_hankel_plan(nu)
        t = plan.nodes
        for g in (t ** (nu + 0.5) * np.exp(-t * t / 2), t ** (nu + 0.5) * np.exp(-t * t),
                  t ** (nu + 2.5) * np.exp(-t * t / 1.5)):
            back = specfun.hankel_transform(plan, specfun.hankel_transform(plan, g))
            worst = max(worst, float(np.max(np.abs(back - g))))
    return worst < 1e-6, f"max round-trip error {worst:.2e} (< 1e-6)", 10


def c04_oracle():
    worst = 0.0
    for b in (0.3, 0.5, 1.0, 2.0):
        lam = 1.01 * specfun.bessel_j_zeros(b, 20)[-1] ** 2
        exact = spectra.exact_model_spectrum(b, 1.0, lam).eigenvalues[:20]
        op = spectra.OperatorSpec(Interval(0.0, 1.0), b, singular_ends=("a",))
        num = spectra.solve_1d(op, lam).eigenvalues[:20]
        worst = max(worst, float(np.max(np.abs(num - exact) / exact)))
    return worst < 1e-4, f"max relative error k <= 20: {worst:.2e} (< 1e-4)", 60


def c05_interval_dirichlet():
    sp = spectra.exact_model_spectrum(0.5, 1.0, 1e6)
    fit = riesz.fit_asymptotics(riesz.riesz_curve(sp, np.geomspace(1e-3, 1e-2, 40)), 1, (1e-3, 1e-2))
    L1 = riesz.weyl_constant(1)
    g0 = abs(fit.c0 - L1) / L1
    ok = g0 < 5e-3 and abs(fit.c1 + 0.5) < 0.05
    return ok, f"c0 = {fit.c0:.6f} (gap {g0:.2e} < 0.5%), c1 = {fit.c1:.5f} (|c1 + 1/2| < 0.05)", 10


def c06_interval_singular():
    parts, ok = [], True
    for b in (0.75, 1.0, 1.5):
        sp = spectra.solve_1d(spectra.OperatorSpec(Interval(), b), 1e6)
        cert = sp.certificate
        certified = cert["sturm_count"] <= cert["listed"] <= cert["sturm_count_search"]
        fit = riesz.fit_asymptotics(riesz.riesz_curve(sp, np.geomspace(1e-3, 1e-2, 40)), 1, (1e-3, 1e-2))
        gap = abs(fit.c1 + b) / b
        ok &= certified and gap < 0.1
        parts.append(f"b={b}: c1={fit.c1:.4f} gap {gap:.2%}")
    return ok, "; ".join(parts) + " (< 10%)", 600


def c07_disk():
    sp = spectra.disk_spectrum(spectra.OperatorSpec(Disk(1.0), 0.5), 0.02**-2)
    fit = riesz.fit_asymptotics(riesz.riesz_curve(sp, np.geomspace(0.02, 0.1, 40)), 2, (0.02, 0.1))
    g0 = abs(fit.c0 - 0.125) / 0.125
    g1 = abs(fit.c1 + 1 / 3) / (1 / 3)
    return g0 < 0.01 and g1 < 0.1, f"c0 = {fit.c0:.6f} (gap {g0:.2%} < 1%), c1 = {fit.c1:.5f} (gap {g1:.2%} < 10%)", 600


def c08_density():
    one = riesz.density_functional(Interval(), 5e-4, np.ones_like)
    inner = riesz.density_functional(Interval(), 5e-4, lambda x: _bump(x, 0.5, 0.3))
    ok = abs(one - 1) < 0.05 and inner < 0.01
    return ok, f"f=1: {one:.6f} (within 5% of 1), interior f: {inner:.2e} (< 0.01)", 60


def c09_halfspace():
    worst = 0.0
    for d in (1, 2):
        if d == 1:
            prof = riesz.HalfspaceProfile(lambda p: _bump(p[..., 0], 0.3, 0.25) ** 2, 1, 0.0, 0.55)
        else:
            prof = riesz.HalfspaceProfile(lambda p: (_bump(p[..., 0], 0.0, 0.4) * _bump(p[..., 1], 0.3, 0.25)) ** 2,
                                          2, 0.4, 0.55)
        for b in (0.5, 1.0):
            for h in (0.05, 0.2):
                a = riesz.halfspace_phase_integral(prof, b, h)
                c = riesz.halfspace_decomposition(prof, b, h)
                worst = max(worst, abs(a - c) / abs(a))
    return worst < 1e-5, f"max relative mismatch {worst:.2e} (< 1e-5)", 60


def c10_partition():
    rng = np.random.default_rng(2024)
    worst = 0.0
    icfg = partition.PartitionConfig(Interval(0.0, 1.0), 0.05)
    for x in rng.uniform(0.0, 1.0, 100):
        worst = max(worst, abs(partition.partition_normalization(icfg, x) - 1))
    dcfg = partition.PartitionConfig(Disk(1.0), 0.05)
    r = np.sqrt(rng.uniform(0, 1, 100))
    a = rng.uniform(0, 2 * math.pi, 100)
    for p in np.stack([r * np.cos(a), r * np.sin(a)], -1):
        worst = max(worst, abs(partition.partition_normalization(dcfg, p) - 1))
    # directional central differences of ell on both domains
    h = 1e-7
    u = rng.uniform(-0.1, 1.1, 10000)
    grad = float(np.max(np.abs(partition.ell(icfg, u + h) - partition.ell(icfg, u - h)) / (2 * h)))
    v = rng.uniform(-1.1, 1.1, (10000, 2))
    ang = rng.uniform(0, 2 * math.pi, 10000)
    e = h * np.stack([np.cos(ang), np.sin(ang)], -1)
    grad = max(grad, float(np.max(np.abs(partition.ell(dcfg, v + e) - partition.ell(dcfg, v - e)) / (2 * h))))
    ok = worst < 1e-5 and grad <= 0.5 + 1e-8
    return ok, f"max normalization residual {worst:.2e} (< 1e-5), FD |grad ell| <= {grad:.9f} (<= 1/2 + 1e-8)", 120


def c11_straightening():
    family = [(1.0, 0.1), (1.0, 0.02), (0.5, 0.1), (2.0, 0.4), (1.0, 0.3)]
    jac, lower, env, n_pts = 0.0, 0.0, 0.0, 0
    rng = np.random.default_rng(11)
    for R, ell in family:
        chart = geometry.straightening_chart(Disk(R), np.array([0.0, -R]), ell)
        r = ell * np.sqrt(rng.uniform(0, 1, 12000))
        a = rng.uniform(0, 2 * math.pi, 12000)
        pts = chart.x0 + np.stack([r * np.cos(a), r * np.sin(a)], -1)
        pts = pts[np.asarray(chart.dom.contains(pts)) & np.asarray(chart.in_ball(pts))][:2000]
        n_pts += len(pts)
        jac = max(jac, float(np.max(np.abs(chart.jacobian_fd(pts) - 1))))
        lower = max(lower, float(np.max(chart.dom.dist(pts) - chart.flat_distance(pts))))
        bound = geometry.COMPARISON_CONSTANT * float(chart.omega(2 * ell)) ** 2
        ratio = max(geometry.distance_comparison_check(chart, p).ratio for p in pts)
        env = max(env, ratio / bound)
    ok = n_pts == 10000 and jac < 1e-8 and lower <= 0.0 and env <= 1.0
    detail = (f"{n_pts} points: |det D Phi - 1| <= {jac:.1e} (< 1e-8), max(dist - dist_Phi) = {lower:.1e} (<= 0), "
              f"ratio / (C omega(2l)^2) <= {env:.3f} (<= 1)")
    return ok, detail, 60


def c12_local_bulk():
    ell = 0.15
    h = ell / 50
    opr = spectra.assemble_1d(spectra.OperatorSpec(Interval(), 0.5), spectra.GradedMesh(3000))
    val = riesz.local_trace(opr, lambda x: _bump(x, 0.5, ell), h)
    mass = quad(lambda x: _bump(x, 0.5, ell) ** 2, 0.5 - ell, 0.5 + ell, epsabs=1e-14)[0]
    lead = riesz.weyl_constant(1) / h * mass
    gap = abs(val - lead) / lead
    return gap < 0.02, f"Tr = {val:.6f}, L1 h^-1 int phi^2 = {lead:.6f}, gap {gap:.2%} (< 2%)", 120


CRITERIA = [
    (1, "P_nu integral identity", c01_pnu_integral),
    (2, "P_nu tail envelope", c02_pnu_tail),
    (3, "Hankel self-inverse", c03_hankel),
    (4, "exact-model oracle equivalence", c04_oracle),
    (5, "two-term fit, interval, b = 1/2", c05_interval_dirichlet),
    (6, "two-term fit, interval, singular b", c06_interval_singular),
    (7, "two-term fit, unit disk, b = 1/2", c07_disk),
    (8, "boundary density functional", c08_density),
    (9, "half-space main-term extraction", c09_halfspace),
    (10, "partition normalization and ell gradient", c10_partition),
    (11, "straightening certificates", c11_straightening),
    (12, "local bulk trace", c12_local_bulk),
]


@pytest.mark.parametrize("num,title,check", CRITERIA, ids=[f"criterion{n:02d}" for n, _, _ in CRITERIA])
def test_criterion(num, title, check, capsys):
    t0 = time.perf_counter()
    passed, detail, budget = check()
    elapsed = time.perf_counter() - t0
    in_time = elapsed < budget
    status = "PASS" if passed and in_time else "FAIL"
    with capsys.disabled():
        print(f"\n[{status}] criterion {num:2d} {title}: {detail}; {elapsed:.1f} s (budget {budget} s)")
    assert passed, detail
    assert in_time, f"{elapsed:.1f} s exceeds {budget} s"
