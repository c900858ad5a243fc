"""Sweeps over N, log-log scaling fits and report emission.

Configuration files are flat JSON objects. Keys (all optional, defaults in
``DEFAULTS``)::

    strategies      list of protocol names, e.g. ["ramsey-cc", "ghz-qc"]
    N_values        strictly increasing list of ints, at least 3 of them
    nu              repetitions per estimate
    trials          independent estimates per cell
    phi_true        float, or null for a per-cell quadrature phase
    policy          "max-slope" | "at-true-value"
    ghz_path        "auto" | "statevector" | "analytic"
    generator       "qubit-z" | "qutrit" | "custom"
    generator_real  square list of lists (custom only)
    generator_imag  square list of lists (custom only, default zeros)
    seed            non-negative int
    output          output path, or null to skip writing
    format          "csv" | "json"

Command-line flags override file values, which override the defaults.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path

import numpy as np
from scipy import stats

from . import genspec, protocols, qcore
from .errors import ConfigError, DegenerateFit, InvalidReport, IoFailure, MetrologyError
from .protocols import Protocol

CSV_HEADER = ("strategy", "N", "nu", "delta_phi", "bound", "ratio")
SWEEP_PROTOCOLS = (Protocol.RAMSEY_CC, Protocol.GHZ_QC, Protocol.SEQUENTIAL)

DEFAULTS = {
    "strategies": ["ramsey-cc", "ghz-qc"],
    "N_values": [4, 8, 16, 32, 64],
    "nu": 10_000,
    "trials": 1000,
    "phi_true": None,
    "policy": "max-slope",
    "ghz_path": "auto",
    "generator": "qubit-z",
    "generator_real": None,
    "generator_imag": None,
    "seed": 0,
    "output": None,
    "format": "csv",
}


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


@dataclass(frozen=True)
class SweepConfig:
    strategies: tuple
    n_values: tuple
    nu: int
    generator: genspec.Generator
    generator_spec: dict
    seed: int = 0
    trials: int = 1000
    phi_true: float | None = None
    policy: protocols.OperatingPoint = protocols.OperatingPoint.MAX_SLOPE
    ghz_path: protocols.GhzPath = protocols.GhzPath.AUTO
    output: Path | None = None
    fmt: str = "csv"

    def __post_init__(self):
        strategies = tuple(Protocol.parse(s) for s in self.strategies)
        if not strategies:
            raise ConfigError("at least one strategy is required")
        for s in strategies:
            if s not in SWEEP_PROTOCOLS:
                raise ConfigError(f"{s.value} cannot be swept over N")
        if len(set(strategies)) != len(strategies):
            raise ConfigError("duplicate strategies")
        object.__setattr__(self, "strategies", tuple(sorted(strategies, key=SWEEP_PROTOCOLS.index)))
        ns = tuple(int(n) for n in self.n_values)
        if len(ns) < 3:
            raise ConfigError("at least 3 N values are needed to fit an exponent")
        if any(b <= a for a, b in zip(ns, ns[1:])) or ns[0] < 1:
            raise ConfigError("N values must be positive and strictly increasing")
        object.__setattr__(self, "n_values", ns)
        if self.fmt not in ("csv", "json"):
            raise ConfigError(f"unknown output format {self.fmt!r}")
        if self.nu < 1 or self.trials < 2 or self.seed < 0:
            raise ConfigError("need nu >= 1, trials >= 2 and a non-negative seed")
        object.__setattr__(self, "policy", protocols._coerce(protocols.OperatingPoint, self.policy, "policy"))
        object.__setattr__(self, "ghz_path", protocols._coerce(protocols.GhzPath, self.ghz_path, "GHZ path"))

    def echo(self) -> dict:
        return {
            "strategies": [s.value for s in self.strategies],
            "N_values": list(self.n_values),
            "nu": self.nu,
            "trials": self.trials,
            "phi_true": self.phi_true,
            "policy": self.policy.value,
            "ghz_path": self.ghz_path.value,
            "seed": self.seed,
            **self.generator_spec,
        }


def build_generator(spec: dict) -> tuple[genspec.Generator, dict]:
    name = spec.get("generator") or "qubit-z"
    if name != "custom":
        return genspec.preset(name), {"generator": name}
    real = spec.get("generator_real")
    if real is None:
        raise ConfigError("custom generator needs generator_real")
    imag = spec.get("generator_imag")
    try:
        re = np.array(real, dtype=float)
        im = np.zeros_like(re) if imag is None else np.array(imag, dtype=float)
        g = genspec.Generator.from_matrix(re + 1j * im)
    except MetrologyError as exc:
        raise ConfigError(f"invalid custom generator: {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid custom generator entries: {exc}") from exc
    echo = {"generator": "custom", "generator_real": re.tolist(), "generator_imag": im.tolist()}
    return g, echo


def load_config_file(path) -> dict:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigError(f"config not found: {p}") from None
    except OSError as exc:
        raise ConfigError(f"cannot read config {p}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {p} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(data) - set(DEFAULTS)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return data


def make_sweep_config(path=None, **overrides) -> SweepConfig:
    """Defaults, then the file at ``path``, then non-None ``overrides``."""
    merged = dict(DEFAULTS)
    if path is not None:
        merged.update(load_config_file(path))
    merged.update({k: v for k, v in overrides.items() if v is not None})
    g, gen_echo = build_generator(merged)
    try:
        return SweepConfig(
            strategies=tuple(merged["strategies"]),
            n_values=tuple(merged["N_values"]),
            nu=int(merged["nu"]),
            generator=g,
            generator_spec=gen_echo,
            seed=int(merged["seed"]),
            trials=int(merged["trials"]),
            phi_true=None if merged["phi_true"] is None else float(merged["phi_true"]),
            policy=merged["policy"],
            ghz_path=merged["ghz_path"],
            output=None if merged["output"] is None else Path(merged["output"]),
            fmt=merged["format"],
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config value: {exc}") from exc


@dataclass(frozen=True)
class Cell:
    strategy: Protocol
    n: int
    nu: int
    seed: int
    delta_phi: float = math.nan
    bound: float = math.nan
    error: str | None = None

    @property
    def failed(self) -> bool:
        return self.error is not None

    @property
    def ratio(self) -> float:
        return self.delta_phi / self.bound


@dataclass(frozen=True)
class Fit:
    strategy: Protocol
    exponent: float
    intercept: float
    stderr: float
    residual: float
    n_points: int


@dataclass(frozen=True)
class ScalingReport:
    config: dict
    cells: tuple
    fits: tuple
    partial: bool = False
    notes: tuple = field(default_factory=tuple)

    def cells_for(self, strategy) -> list:
        s = Protocol.parse(strategy)
        return [c for c in self.cells if c.strategy == s]

    def fit_for(self, strategy) -> Fit:
        s = Protocol.parse(strategy)
        for f in self.fits:
            if f.strategy == s:
                return f
        raise KeyError(s.value)


def fit_exponent(points) -> tuple[float, float, float]:
    """OLS of ``log(delta_phi)`` on ``log(N)``: ``(slope, intercept, stderr)``."""
    pts = [(float(n), float(d)) for n, d in points]
    if len(pts) < 3:
        raise DegenerateFit("need at least 3 points")
    x = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    if np.any(x <= 0) or np.any(y <= 0) or not np.all(np.isfinite(y)):
        raise DegenerateFit("all N and delta_phi values must be positive")
    if np.ptp(x) == 0:
        raise DegenerateFit("all N values are equal")
    res = stats.linregress(np.log(x), np.log(y))
    return float(res.slope), float(res.intercept), float(res.stderr)


def _fit_residual(points, slope, intercept) -> float:
    x = np.log([p[0] for p in points])
    y = np.log([p[1] for p in points])
    return float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))


def worker_count() -> int:
    env = os.environ.get("METROSCALE_WORKERS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ConfigError(f"METROSCALE_WORKERS must be an integer, got {env!r}") from None
        if n < 1:
            raise ConfigError("METROSCALE_WORKERS must be >= 1")
        return n
    return os.cpu_count() or 1


def _run_cell(cfg: SweepConfig, strategy: Protocol, n: int) -> Cell:
    seed = qcore.derive_seed(cfg.seed, SWEEP_PROTOCOLS.index(strategy), n)
    phi = cfg.phi_true if cfg.phi_true is not None else protocols.quadrature_phase(cfg.generator, strategy, n)
    try:
        scfg = protocols.StrategyConfig(
            strategy, cfg.generator, n=n, nu=cfg.nu, phi_true=phi, seed=seed,
            policy=cfg.policy, trials=cfg.trials, ghz_path=cfg.ghz_path,
        )
        r = protocols.run(scfg)
    except MetrologyError as exc:
        return Cell(strategy, n, cfg.nu, seed, error=f"{type(exc).__name__}: {exc}")
    return Cell(strategy, n, cfg.nu, seed, r.delta_phi_empirical, r.theoretical_bound)


def run_sweep(cfg: SweepConfig, workers: int | None = None) -> ScalingReport:
    """Run every (strategy, N) cell and fit one exponent per strategy.

    Cells get seeds derived from the root seed and their (strategy, N) key,
    so results do not depend on scheduling; failed cells are kept with
    their error and mark the report partial.
    """
    keys = [(s, n) for s in cfg.strategies for n in cfg.n_values]
    workers = worker_count() if workers is None else workers
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            cells = list(pool.map(lambda k: _run_cell(cfg, *k), keys))
    else:
        cells = [_run_cell(cfg, *k) for k in keys]
    fits, notes = [], []
    for s in cfg.strategies:
        pts = [(c.n, c.delta_phi) for c in cells if c.strategy == s and not c.failed]
        try:
            slope, intercept, stderr = fit_exponent(pts)
        except DegenerateFit as exc:
            notes.append(f"{s.value}: no fit ({exc})")
            continue
        fits.append(Fit(s, slope, intercept, stderr, _fit_residual(pts, slope, intercept), len(pts)))
    partial = any(c.failed for c in cells)
    return ScalingReport(cfg.echo(), tuple(cells), tuple(fits), partial, tuple(notes))


# --- emission ---------------------------------------------------------------


def report_to_csv(report: ScalingReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for c in report.cells:
        if c.failed:
            continue
        w.writerow([c.strategy.value, c.n, c.nu, fmt_float(c.delta_phi), fmt_float(c.bound), fmt_float(c.ratio)])
    return buf.getvalue()


def report_to_dict(report: ScalingReport) -> dict:
    return {
        "config": report.config,
        "partial": report.partial,
        "cells": [
            {
                "strategy": c.strategy.value,
                "N": c.n,
                "nu": c.nu,
                "seed": c.seed,
                "delta_phi": None if c.failed else c.delta_phi,
                "bound": None if c.failed else c.bound,
                "ratio": None if c.failed else c.ratio,
                "error": c.error,
            }
            for c in report.cells
        ],
        "fits": [
            {
                "strategy": f.strategy.value,
                "exponent": f.exponent,
                "intercept": f.intercept,
                "stderr": f.stderr,
                "residual": f.residual,
                "n_points": f.n_points,
            }
            for f in report.fits
        ],
        "notes": list(report.notes),
    }


def report_from_dict(data: dict) -> ScalingReport:
    cells = tuple(
        Cell(
            Protocol.parse(c["strategy"]), c["N"], c["nu"], c["seed"],
            math.nan if c["delta_phi"] is None else c["delta_phi"],
            math.nan if c["bound"] is None else c["bound"],
            c["error"],
        )
        for c in data["cells"]
    )
    fits = tuple(
        Fit(Protocol.parse(f["strategy"]), f["exponent"], f["intercept"], f["stderr"], f["residual"], f["n_points"])
        for f in data["fits"]
    )
    return ScalingReport(data["config"], cells, fits, data["partial"], tuple(data.get("notes", ())))


def report_to_json(report: ScalingReport) -> str:
    # Python's float repr is the shortest string that round-trips exactly
    return json.dumps(report_to_dict(report), indent=2, allow_nan=False) + "\n"


def load_schema() -> dict:
    return json.loads(resources.files("metroscale").joinpath("report.schema.json").read_text(encoding="utf-8"))


def summary_text(report: ScalingReport, timestamp: bool = True) -> str:
    lines = []
    if timestamp:
        lines.append(f"generated {datetime.now(timezone.utc).isoformat(timespec='seconds')}")
    lines.append(f"config: {json.dumps(report.config, sort_keys=True)}")
    if report.partial:
        lines.append("PARTIAL: some cells failed")
    lines.append(f"{'strategy':<12}{'N':>6}{'delta_phi':>14}{'bound':>14}{'ratio':>8}")
    for c in report.cells:
        if c.failed:
            lines.append(f"{c.strategy.value:<12}{c.n:>6}  failed: {c.error}")
        else:
            lines.append(f"{c.strategy.value:<12}{c.n:>6}{c.delta_phi:>14.5e}{c.bound:>14.5e}{c.ratio:>8.3f}")
    for f in report.fits:
        lines.append(
            f"fit {f.strategy.value}: exponent {f.exponent:+.4f} ± {f.stderr:.4f} "
            f"(residual {f.residual:.3g}, {f.n_points} points)"
        )
    lines.extend(report.notes)
    return "\n".join(lines) + "\n"


def emit_report(report: ScalingReport, fmt: str, path) -> list[Path]:
    """Write the table (csv or json) to ``path`` and a summary next to it."""
    if not report.cells or all(c.failed for c in report.cells):
        raise InvalidReport("report has no successful cells to emit")
    if fmt == "csv":
        text = report_to_csv(report)
    elif fmt == "json":
        text = report_to_json(report)
    else:
        raise ConfigError(f"unknown output format {fmt!r}")
    out = Path(path)
    summary = out.with_name(out.name + ".summary.txt")
    try:
        out.parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        summary.write_text(summary_text(report), encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write report: {exc}") from exc
    return [out, summary]
