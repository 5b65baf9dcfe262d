"""
Experiment configuration and the spectrum → Riesz curve → fit pipeline.

A configuration is a flat ``key = value`` file with ``#`` comments::

    domain = unit_interval.dom     # path relative to this file
    b = 0.75                       # or: piecewise 0:0.75 1:1.25
    V = 0                          # or: poly 1.0,0.0,2.0  (coefficients in x or r)
    h_min = 1e-3
    h_max = 1e-2
    h_count = 40
    output = out/interval_b075
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .geometry import BoundaryField, Disk, Interval, load_domain, parse_key_values
from .riesz import fit_asymptotics, riesz_curve, weyl_constant
from .spectra import (
    GradedMesh,
    OperatorSpec,
    Spectrum,
    disk_spectrum,
    exact_model_spectrum,
    solve_1d,
)

__all__ = [
    "ConfigError",
    "StageError",
    "ExperimentConfig",
    "parse_config",
    "load_config",
    "build_operator",
    "compute_spectrum",
    "run_experiment",
    "sha256_file",
    "thread_cap",
]


class ConfigError(ValueError):
    pass


class StageError(RuntimeError):
    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"[{stage}] {type(cause).__name__}: {cause}")
        self.stage = stage
        self.cause = cause


def thread_cap() -> int:
    """Worker cap from WEYLLAB_THREADS (default 1)."""
    raw = os.environ.get("WEYLLAB_THREADS", "1")
    try:
        n = int(raw)
    except ValueError as exc:
        raise ConfigError(f"WEYLLAB_THREADS must be an integer, got {raw!r}") from exc
    return max(1, n)


@dataclass(frozen=True)
class ExperimentConfig:
    domain: Path
    b: str = "0.5"
    V: str = "0"
    h_min: float = 1e-3
    h_max: float = 1e-2
    h_count: int = 40
    h_log: bool = True
    cutoff: float | None = None
    mesh_n: int | None = None
    grading: float | None = None
    refine_max: int = 0
    method: str = "auto"
    fit_window: tuple[float, float] | None = None
    gate_c0: float | None = None
    gate_c1: float | None = None
    seed: int = 0
    output: Path = Path("weyllab_out")
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0 < self.h_min < self.h_max:
            raise ConfigError("need 0 < h_min < h_max")
        if self.h_count < 6:
            raise ConfigError("h_count must be at least 6 for fitting")
        if self.method not in {"auto", "fem", "bessel", "exact"}:
            raise ConfigError(f"unknown method {self.method!r}")

    @property
    def h_grid(self) -> np.ndarray:
        if self.h_log:
            return np.geomspace(self.h_max, self.h_min, self.h_count)
        return np.linspace(self.h_max, self.h_min, self.h_count)

    @property
    def spectrum_cutoff(self) -> float:
        return self.cutoff if self.cutoff is not None else self.h_min**-2


_KNOWN = {
    "domain", "b", "V", "h_min", "h_max", "h_count", "h_log", "lambda", "mesh_n", "grading",
    "refine_max", "method", "fit_window", "gate_c0", "gate_c1", "seed", "output",
}


def _bool(text: str) -> bool:
    low = text.lower()
    if low in {"1", "true", "yes", "on"}:
        return True
    if low in {"0", "false", "no", "off"}:
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def parse_config(text: str, base: Path | None = None) -> ExperimentConfig:
    try:
        kv = parse_key_values(text)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    unknown = set(kv) - _KNOWN
    if unknown:
        raise ConfigError(f"unknown keys: {sorted(unknown)}")
    missing = [k for k in ("domain", "h_min", "h_max", "h_count") if k not in kv]
    if missing:
        raise ConfigError(f"missing keys: {missing}")
    base = base or Path(".")

    def opt_float(key):
        return float(kv[key]) if key in kv else None

    try:
        window = None
        if "fit_window" in kv:
            lo, hi = kv["fit_window"].split(":")
            window = (float(lo), float(hi))
        return ExperimentConfig(
            domain=(base / kv["domain"]).resolve(),
            b=kv.get("b", "0.5"),
            V=kv.get("V", "0"),
            h_min=float(kv["h_min"]),
            h_max=float(kv["h_max"]),
            h_count=int(kv["h_count"]),
            h_log=_bool(kv.get("h_log", "true")),
            cutoff=opt_float("lambda"),
            mesh_n=int(kv["mesh_n"]) if "mesh_n" in kv else None,
            grading=opt_float("grading"),
            refine_max=int(kv.get("refine_max", 0)),
            method=kv.get("method", "auto"),
            fit_window=window,
            gate_c0=opt_float("gate_c0"),
            gate_c1=opt_float("gate_c1"),
            seed=int(kv.get("seed", 0)),
            output=(base / kv.get("output", "weyllab_out")).resolve(),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, path.parent)


def _parse_b(text: str) -> BoundaryField:
    text = text.strip()
    if text.startswith("piecewise"):
        pairs = [p.split(":") for p in text[len("piecewise"):].split()]
        xs = np.array([float(a) for a, _ in pairs])
        vs = np.array([float(v) for _, v in pairs])
        if np.any(np.diff(xs) <= 0) or np.any(vs <= 0):
            raise ConfigError("piecewise b needs increasing nodes and positive values")
        return BoundaryField(func=lambda x: np.interp(np.asarray(x, dtype=float), xs, vs))
    return BoundaryField.constant(float(text))


def _parse_V(text: str):
    text = text.strip()
    if text in {"", "0", "none"}:
        return None
    if text.startswith("poly"):
        coeffs = [float(c) for c in text[4:].replace(",", " ").split()]
        return lambda x: np.polynomial.polynomial.polyval(np.asarray(x, dtype=float), coeffs)
    raise ConfigError(f"unsupported V descriptor {text!r}")


def build_operator(cfg: ExperimentConfig) -> OperatorSpec:
    try:
        dom = load_domain(cfg.domain)
    except (OSError, ValueError, KeyError) as exc:
        raise ConfigError(f"domain descriptor {cfg.domain}: {exc}") from exc
    if not isinstance(dom, (Interval, Disk)):
        raise ConfigError("spectra are computed for intervals and disks only")
    return OperatorSpec(dom, _parse_b(cfg.b), _parse_V(cfg.V))


def compute_spectrum(cfg: ExperimentConfig, spec: OperatorSpec) -> Spectrum:
    Lam = cfg.spectrum_cutoff
    mesh = GradedMesh(cfg.mesh_n, cfg.grading) if cfg.mesh_n else None
    dom = spec.dom
    if isinstance(dom, Disk):
        method = "bessel" if cfg.method == "exact" else cfg.method
        return disk_spectrum(spec, Lam, method=method, mesh=mesh, workers=thread_cap())
    pure = spec.b.is_constant and spec.b.value == 0.5 and spec.V is None
    if cfg.method in {"exact", "bessel"} or (cfg.method == "auto" and pure):
        if not pure:
            raise ConfigError("the exact interval spectrum needs b = 1/2 and V = 0")
        return exact_model_spectrum(0.5, dom.measure, Lam)
    return solve_1d(spec, Lam, mesh, max_refine=cfg.refine_max)


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _predicted(spec: OperatorSpec, constants=weyl_constant) -> tuple[int, float, float]:
    dom = spec.dom
    d = dom.dim
    return d, constants(d) * dom.measure, -0.5 * constants(d - 1) * spec.b.boundary_integral(dom)


def _gap(value: float, target: float) -> float:
    return abs(value - target) / abs(target) if target else abs(value)


def run_experiment(cfg: ExperimentConfig, constants=weyl_constant) -> dict:
    """Spectrum CSV, Riesz curve CSV, fit JSON and a manifest in ``cfg.output``.

    On a stage failure every file written so far gets a ``.partial`` suffix
    and a StageError naming the stage is raised.
    """
    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    stage = "operator"
    try:
        spec = build_operator(cfg)
        stage = "spectrum"
        spectrum = compute_spectrum(cfg, spec)
        written.extend(spectrum.write(out / "spectrum.csv"))
        stage = "riesz"
        curve = riesz_curve(spectrum, cfg.h_grid)
        written.append(curve.write(out / "curve.csv"))
        stage = "fit"
        d, c0_pred, c1_pred = _predicted(spec, constants)
        fit = fit_asymptotics(curve, d, cfg.fit_window or (cfg.h_min, cfg.h_max))
        gates = {
            "sturm_certificate": _certificate_ok(spectrum),
            "curve_monotone": bool(np.all(np.diff(curve.trace[curve.valid]) >= -1e-12)),
            "all_samples_valid": bool(np.all(curve.valid)),
        }
        gaps = {"c0": _gap(fit.c0, c0_pred), "c1": _gap(fit.c1, c1_pred)}
        if cfg.gate_c0 is not None:
            gates["c0_gap"] = gaps["c0"] <= cfg.gate_c0
        if cfg.gate_c1 is not None:
            gates["c1_gap"] = gaps["c1"] <= cfg.gate_c1
        report = {
            "c0": fit.c0,
            "c1": fit.c1,
            "predicted": {"c0": c0_pred, "c1": c1_pred},
            "gaps": gaps,
            "fit": fit.as_dict(),
            "gates": gates,
            "passed": all(gates.values()),
            "dimension": d,
            "spectrum": {"listed": len(spectrum), "count": spectrum.count, "cutoff": spectrum.cutoff},
        }
        fit_path = out / "fit.json"
        fit_path.write_text(json.dumps(report, indent=2, sort_keys=True, default=_json_float) + "\n")
        written.append(fit_path)
    except Exception as exc:
        for p in written:
            if p.exists():
                p.replace(p.with_name(p.name + ".partial"))
        if isinstance(exc, ConfigError):
            raise
        raise StageError(stage, exc) from exc
    manifest = {
        "config": {k: str(v) for k, v in sorted(vars(cfg).items()) if k != "extra"},
        "files": {p.name: sha256_file(p) for p in written},
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return report


def _certificate_ok(spectrum: Spectrum) -> bool:
    cert = spectrum.certificate
    if "sturm_count" in cert:
        lo, hi = cert["sturm_count"], cert.get("sturm_count_search", cert["sturm_count"])
        return lo <= cert["listed"] <= hi
    if "per_mode" in cert:
        return cert["per_mode"][-1] == 0 and cert["listed"] == spectrum.count
    return cert.get("listed") == len(spectrum)


def _json_float(obj):
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    raise TypeError(type(obj).__name__)
