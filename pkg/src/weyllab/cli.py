"""Command-line entry point: ``weyllab <subcommand> ...``.

Exit codes: 0 pass, 1 check failure, 2 usage/config error,
3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import geometry, partition, pnu, riesz, specfun, spectra
from .pipeline import ConfigError, StageError, build_operator, compute_spectrum, load_config, run_experiment
from .verify import FAULTS, results_csv, verify_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NONCONV = 0, 1, 2, 3

_NONCONVERGENCE = (
    pnu.PnuConvergenceError,
    spectra.IncompleteSpectrumError,
    partition.PartitionQuadratureError,
    specfun.BesselDomainError,
    ArithmeticError,
)


def _g(x: float) -> str:
    return f"{x:.17g}"


def _cmd_specfun(args) -> int:
    if args.kind == "j":
        val = specfun.bessel_j(args.nu, args.x)
    elif args.kind == "y":
        val = specfun.bessel_y(args.nu, args.x)
    elif args.kind == "zero":
        if args.x < 1 or args.x != int(args.x):
            raise ConfigError("--x is the zero index for --kind zero")
        val = specfun.bessel_j_zero(args.nu, int(args.x))
    else:
        val = specfun.bracket_antiderivative(args.nu, args.x)
    print(f"{float(val):.15g}")
    return EXIT_OK


def _cmd_pnu(args) -> int:
    ctx = pnu.PnuContext(args.nu, args.dim)
    if args.action == "integral":
        res = pnu.pnu_integral_details(ctx, args.tol)
        print(json.dumps({"nu": args.nu, "dim": args.dim, "value": res.value, "expected": args.nu / 2,
                          "T": res.T, "tail_estimate": res.tail_estimate, "tail_bound": res.tail_bound}))
        return EXIT_OK
    if args.t is None:
        raise ConfigError("pnu eval needs --t")
    ts = [float(v) for v in args.t.split(",")]
    print("t,P")
    for t, p in zip(ts, np.atleast_1d(pnu.pnu_eval(ctx, np.array(ts)))):
        print(f"{_g(t)},{_g(p)}")
    return EXIT_OK


def _load_domain(path):
    try:
        return geometry.load_domain(path)
    except (OSError, ValueError, KeyError) as exc:
        raise ConfigError(f"domain {path}: {exc}") from exc


def _cmd_geometry(args) -> int:
    dom = _load_domain(args.domain)
    rows = []
    if isinstance(dom, geometry.Interval):
        rows.append(("boundary_integral_one", abs(dom.boundary_integral(lambda x: 1.0) - 2.0), 1e-14))
        rows.append(("signed_distance_mid", abs(dom.signed_distance(0.5 * (dom.a + dom.b)) - dom.inradius), 1e-14))
    else:
        ell = 0.25 * min(dom.inradius, 0.5) if isinstance(dom, geometry.Disk) else 0.05
        x0 = dom.boundary_point(0.0)
        chart = geometry.straightening_chart(dom, x0, ell)
        rng = np.random.default_rng(args.seed)
        r = ell * np.sqrt(rng.uniform(0, 1, 4 * args.samples))
        a = rng.uniform(0, 2 * math.pi, r.size)
        pts = chart.x0 + np.stack([r * np.cos(a), r * np.sin(a)], axis=-1)
        pts = pts[np.asarray(dom.contains(pts))][: args.samples]
        rows.append(("unit_jacobian", float(np.max(np.abs(chart.jacobian_fd(pts) - 1))), 1e-8))
        rows.append(("inverse_roundtrip", float(np.max(np.abs(chart.phi_inv(chart.phi(pts)) - pts))), 1e-12))
        gap = np.asarray(dom.dist(pts)) - chart.flat_distance(pts)
        rows.append(("dist_lower_bound", max(float(np.max(gap)), 0.0), 1e-12))
        direct, straight = geometry.chart_volume_check(chart)
        rows.append(("volume_preservation", abs(direct - straight) / direct, 1e-8))
    print("check,status,value,threshold")
    ok = True
    for name, value, thr in rows:
        passed = value < thr
        ok &= passed
        print(f"{name},{'pass' if passed else 'fail'},{_g(value)},{_g(thr)}")
    return EXIT_OK if ok else EXIT_FAIL


def _cmd_partition(args) -> int:
    dom = _load_domain(args.domain)
    cfg = partition.PartitionConfig(dom, args.ell0)
    rng = np.random.default_rng(args.seed)
    if isinstance(dom, geometry.Interval):
        pts = list(rng.uniform(dom.a, dom.b, args.samples))
    else:
        pts = []
        center = np.asarray(getattr(dom, "center", (0.0, 0.0)))
        scale = dom.radius if isinstance(dom, geometry.Disk) else float(np.max(dom.rho(np.linspace(0, 2 * math.pi, 256))))
        while len(pts) < args.samples:
            p = center + rng.uniform(-scale, scale, 2)
            if dom.contains(p):
                pts.append(p)
    tol = 1e-5 if not isinstance(dom, geometry.StarDomain) else 1e-3
    ok = True
    print("point,residual,status")
    for p in pts:
        res = abs(partition.partition_normalization(cfg, p) - 1)
        passed = res < tol
        ok &= passed
        label = _g(float(p)) if np.ndim(p) == 0 else ";".join(_g(v) for v in p)
        print(f"{label},{_g(res)},{'pass' if passed else 'fail'}")
    return EXIT_OK if ok else EXIT_FAIL


def _cmd_spectrum(args) -> int:
    cfg = load_config(args.config)
    if args.Lambda is not None:
        cfg = replace(cfg, cutoff=args.Lambda)
    spec = build_operator(cfg)
    sp = compute_spectrum(cfg, spec)
    path, side = sp.write(args.out)
    print(f"{len(sp)} eigenvalues ({sp.count} with multiplicity) <= {sp.cutoff:g} -> {path}, {side}")
    return EXIT_OK


def _cmd_riesz(args) -> int:
    sp = spectra.Spectrum.read(args.spectrum)
    curve = riesz.riesz_curve(sp, riesz.parse_h_grid(args.h_grid))
    if args.out:
        curve.write(args.out)
    else:
        print("h,trace,valid")
        for h, t, v in zip(curve.h, curve.trace, curve.valid):
            print(f"{_g(h)},{_g(t)},{int(v)}")
    return EXIT_OK if np.all(curve.valid) else EXIT_FAIL


def _cmd_fit(args) -> int:
    curve = riesz.RieszCurve.read(args.curve)
    window = tuple(float(v) for v in args.window.split(":")) if args.window else None
    fit = riesz.fit_asymptotics(curve, args.dim, window)
    print(json.dumps(fit.as_dict(), indent=2))
    return EXIT_OK


_BUILTIN_F = {
    "one": np.ones_like,
    "x": lambda x: np.asarray(x, dtype=float),
    "interior": lambda x: np.where(
        np.abs(x - 0.5) < 0.3, np.exp(-1.0 / np.clip(1 - ((x - 0.5) / 0.3) ** 2, 1e-300, None)), 0.0
    ),
}


def _parse_f(text: str):
    if text in _BUILTIN_F:
        return _BUILTIN_F[text]
    try:
        coeffs = [float(c) for c in text.replace(",", " ").split()]
    except ValueError as exc:
        raise ConfigError(f"--f must be one of {sorted(_BUILTIN_F)} or polynomial coefficients") from exc
    return lambda x: np.polynomial.polynomial.polyval(np.asarray(x, dtype=float), coeffs)


def _cmd_density(args) -> int:
    dom = _load_domain(args.domain) if args.domain else geometry.Interval(0.0, 1.0)
    if not isinstance(dom, geometry.Interval):
        raise ConfigError("density is defined on intervals")
    f = _parse_f(args.f)
    val = riesz.density_functional(dom, args.h, f)
    limit = 0.5 * (float(f(np.array(dom.a))) + float(f(np.array(dom.b))))
    print(json.dumps({"h": args.h, "value": val, "limit": limit}))
    return EXIT_OK


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    report = run_experiment(cfg)
    print(json.dumps({k: report[k] for k in ("c0", "c1", "predicted", "gaps", "passed")}, indent=2))
    return EXIT_OK if report["passed"] else EXIT_FAIL


def _cmd_verify(args) -> int:
    results = verify_suite(args.level, args.inject_fault)
    text = results_csv(results)
    if args.out:
        Path(args.out).write_text(text)
    sys.stdout.write(text)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="weyllab", description="Two-term Weyl asymptotics with inverse-square boundary potentials.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("specfun", help="Bessel evaluations")
    s.add_argument("action", choices=["eval"])
    s.add_argument("--nu", type=float, required=True)
    s.add_argument("--x", type=float, required=True)
    s.add_argument("--kind", choices=["j", "y", "zero", "bracket"], default="j")
    s.set_defaults(func=_cmd_specfun)

    s = sub.add_parser("pnu", help="boundary-layer profile P_nu")
    s.add_argument("action", choices=["integral", "eval"])
    s.add_argument("--nu", type=float, required=True)
    s.add_argument("--dim", type=int, default=1)
    s.add_argument("--tol", type=float, default=1e-3)
    s.add_argument("--t", help="comma-separated t values for eval")
    s.set_defaults(func=_cmd_pnu)

    s = sub.add_parser("geometry", help="chart and distance certificates")
    s.add_argument("action", choices=["check"])
    s.add_argument("--domain", required=True)
    s.add_argument("--samples", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=_cmd_geometry)

    s = sub.add_parser("partition", help="partition-of-unity normalization table")
    s.add_argument("action", choices=["check"])
    s.add_argument("--domain", required=True)
    s.add_argument("--ell0", type=float, required=True)
    s.add_argument("--samples", type=int, default=20)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=_cmd_partition)

    s = sub.add_parser("spectrum", help="compute a certified spectrum")
    s.add_argument("--config", required=True)
    s.add_argument("--lambda", dest="Lambda", type=float)
    s.add_argument("--out", required=True)
    s.set_defaults(func=_cmd_spectrum)

    s = sub.add_parser("riesz", help="Riesz means of a spectrum file")
    s.add_argument("--spectrum", required=True)
    s.add_argument("--h-grid", required=True, help="hmin:hmax:n (log-spaced)")
    s.add_argument("--out")
    s.set_defaults(func=_cmd_riesz)

    s = sub.add_parser("fit", help="fit c0 h^-d + c1 h^{1-d} to a curve")
    s.add_argument("--curve", required=True)
    s.add_argument("--dim", type=int, required=True)
    s.add_argument("--window", help="hmin:hmax")
    s.set_defaults(func=_cmd_fit)

    s = sub.add_parser("density", help="boundary density functional on an interval")
    s.add_argument("--h", type=float, required=True)
    s.add_argument("--f", default="one", help="one | x | interior | polynomial coefficients c0,c1,...")
    s.add_argument("--domain")
    s.set_defaults(func=_cmd_density)

    s = sub.add_parser("run", help="spectrum -> curve -> fit pipeline")
    s.add_argument("--config", required=True)
    s.set_defaults(func=_cmd_run)

    s = sub.add_parser("verify", help="invariant battery")
    s.add_argument("--level", choices=["fast", "full"], default="fast")
    s.add_argument("--out")
    s.add_argument("--inject-fault", choices=sorted(FAULTS), help="test hook: corrupt a constant")
    s.set_defaults(func=_cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONV if isinstance(exc.cause, _NONCONVERGENCE) else EXIT_FAIL
    except _NONCONVERGENCE as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONV
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
