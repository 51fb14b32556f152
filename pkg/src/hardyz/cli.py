"""Command-line front end: ``python -m hardyz <command> [options]``.

Exit status is 0 when every reported cell passes, 2 when some cell fails its
band, and 1 on a configuration or execution error (including cells whose
computation raised).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from ._parallel import thread_count
from .errors import HardyZError
from .ladder import clear_caches, ladder_for_window, verify_ladder, verify_third_order
from .nupoints import WindowSpec
from .quad import (
    DEFAULT_BANDS,
    Tolerances,
    VerificationReport,
    make_report,
    sort_reports,
    verify_hardy_littlewood,
    verify_mean_value,
    verify_nu_sums,
    verify_nupoint_law,
    verify_set_measures,
    verify_signum_law,
    verify_tau_consistency,
    verify_tiling,
)
from .special import EvalConfig, reset_z_eval_count, rs_z, rs_z_array, z_eval_count, z_oracle

COMMANDS = (
    "eval", "nupoints", "sets", "verify-t1", "verify-t2", "verify-lemmas", "verify-hl", "ladder", "bench", "all",
)
#: suites run by ``all``; eval and bench are excluded (bench reports timings)
ALL_SUITES = ("nupoints", "sets", "verify-t1", "verify-t2", "verify-lemmas", "verify-hl", "ladder")
CSV_COLUMNS = (
    "scenario", "T", "H", "param_name", "param_value", "observed", "predicted",
    "ratio", "error_budget", "pass", "n_evals", "seconds",
)

_PI_RE = re.compile(r"^([+-]?(?:\d+(?:\.\d*)?|\.\d+)?(?:e[+-]?\d+)?)\*?pi(?:/([0-9.]+(?:e[+-]?\d+)?))?$")


def parse_number(text: str) -> float:
    """Float from '1e6', '0.5', 'pi', 'pi/2', '-pi/4', '3pi/4' or '2*pi/3'."""
    s = text.strip().lower().replace(" ", "")
    m = _PI_RE.match(s)
    if m:
        coef = m.group(1)
        c = 1.0 if coef in ("", "+") else -1.0 if coef == "-" else float(coef)
        d = float(m.group(2)) if m.group(2) else 1.0
        return c * math.pi / d
    try:
        return float(s)
    except ValueError:
        raise ValueError(f"not a number or pi fraction: {text!r}") from None


def parse_grid(text: str) -> list[float]:
    return [parse_number(p) for p in text.split(",") if p.strip()]


class ConfigError(ValueError):
    """Invalid scenario configuration; the message names the field."""


@dataclass
class ScenarioConfig:
    command: str
    T: float = 1e6
    H: float = 1e3
    x_grid: list = field(default_factory=lambda: [math.pi / 4, math.pi / 2])
    y_grid: list | None = None
    tau_grid: list = field(default_factory=lambda: [0.0, 1.0, math.pi / 2, -math.pi / 2])
    t_values: list = field(default_factory=list)
    n: int = 10000
    remainder_order: int = 2
    quad_tol: float = 1e-10
    safety: float = 5.0
    bands: dict = field(default_factory=dict)
    output_path: str | None = None
    format: str = "csv"
    timing: bool = True

    def validate(self) -> None:
        """Check every field against the preconditions of the modules it feeds."""
        if self.command not in COMMANDS:
            raise ConfigError(f"command: must be one of {', '.join(COMMANDS)}")
        if self.format not in ("csv", "json"):
            raise ConfigError("format: must be csv or json")
        if not (math.isfinite(self.T) and self.T >= 1000):
            raise ConfigError(f"T: must be >= 1000, got {self.T}")
        if self.T > 1e8:
            raise ConfigError(f"T: working range ends at 1e8, got {self.T}")
        if not (0 < self.H <= self.T):
            raise ConfigError(f"H: must satisfy 0 < H <= T, got {self.H}")
        for name, grid in (("x", self.x_grid), ("y", self.y_grid or [])):
            for v in grid:
                if not (0 < v <= math.pi / 2 + 1e-15):
                    raise ConfigError(f"{name}: values must lie in (0, pi/2], got {v}")
        if not self.x_grid:
            raise ConfigError("x: grid is empty")
        for v in self.tau_grid:
            if not (-math.pi <= v <= math.pi):
                raise ConfigError(f"tau: values must lie in [-pi, pi], got {v}")
        for v in self.t_values:
            if not v >= 50:
                raise ConfigError(f"t: values must be >= 50, got {v}")
        if self.command == "eval" and not self.t_values:
            raise ConfigError("t: eval needs at least one value")
        if self.n < 1:
            raise ConfigError(f"n: must be positive, got {self.n}")
        if self.remainder_order not in (0, 1, 2):
            raise ConfigError(f"remainder-order: must be 0, 1 or 2, got {self.remainder_order}")
        if self.remainder_order == 0 and self.command not in ("eval", "nupoints", "sets"):
            raise ConfigError("remainder-order: verification suites need at least one correction term")
        if not (0 < self.quad_tol < 1e-3):
            raise ConfigError(f"tol: must lie in (0, 1e-3), got {self.quad_tol}")
        if not self.safety > 0:
            raise ConfigError(f"safety: must be positive, got {self.safety}")
        for k, (lo, hi) in self.bands.items():
            if not lo < hi:
                raise ConfigError(f"band: {k} needs lo < hi, got {lo}:{hi}")
        if self.command == "ladder" or self.command == "all":
            if 1.5 * self.H > self.T / math.log(self.T):
                raise ConfigError("H: the ladder needs about 1.3 H <= T / ln T")
        if self.output_path:
            parent = os.path.dirname(os.path.abspath(self.output_path))
            if not os.path.isdir(parent):
                raise ConfigError(f"output: directory {parent} does not exist")

    def tolerances(self) -> Tolerances:
        bands = dict(DEFAULT_BANDS)
        bands.update(self.bands)
        return Tolerances(bands, self.safety, self.quad_tol)

    def echo(self) -> dict:
        d = asdict(self)
        d.pop("timing")
        if self.command != "eval":
            d.pop("t_values")
        if self.command != "bench":
            d.pop("n")
        return d


def _eval_reports(cfg: ScenarioConfig, ecfg: EvalConfig, tols: Tolerances) -> list[VerificationReport]:
    out = []
    for t in cfg.t_values:
        t0 = time.perf_counter()
        w = WindowSpec(max(t, 1000.0), 1.0)
        z = rs_z(t, ecfg)
        try:
            ref = z_oracle(t, 13 if t >= 1e4 else 20)
            pred = ref.value
            budget = z.err_bound + ref.err_bound
        except HardyZError:
            pred, budget = math.nan, z.err_bound
        r = make_report("eval_z", w, "t", t, z.value, pred, budget, tols, 1, time.perf_counter() - t0, safety=1.0)
        r.T, r.H = t, 0.0
        out.append(r)
    return out


def _bench_reports(cfg: ScenarioConfig, ecfg: EvalConfig, tols: Tolerances) -> list[VerificationReport]:
    w = WindowSpec(cfg.T, cfg.H)
    rng = np.random.default_rng(12345)
    ts = np.sort(rng.uniform(cfg.T, cfg.T + cfg.H, cfg.n))
    rs_z_array(ts[:16], ecfg)  # compile / warm the tables
    t0 = time.perf_counter()
    rs_z_array(ts, ecfg)
    dt = time.perf_counter() - t0
    rate = cfg.n / dt if dt > 0 else math.inf
    sub = ts[:: max(1, cfg.n // 100)][:100]
    t1 = time.perf_counter()
    zs = rs_z_array(sub, ecfg)
    ref = np.array([z_oracle(t, 13 if t >= 1e4 else 20).value for t in sub])
    err = float(np.max(np.abs(zs - ref)))
    allowed = 10.0 * cfg.T ** -0.75
    info = make_report("bench_rate", w, "n", cfg.n, rate, math.nan, math.nan, tols, cfg.n, dt)
    # a throughput figure has no main term; it passes when it is a real rate
    info.passed = info.pass_budget = math.isfinite(rate) and rate > 0
    info.status = "ok" if info.passed else "fail"
    return [
        info,
        make_report("bench_max_err", w, "n", sub.size, err, 0.0, allowed, tols, 2 * sub.size,
                    time.perf_counter() - t1, safety=1.0),
    ]


def _suite(name: str, cfg: ScenarioConfig, ecfg: EvalConfig, tols: Tolerances) -> list[VerificationReport]:
    w = WindowSpec(cfg.T, cfg.H)
    xs = cfg.x_grid
    if name == "nupoints":
        return verify_nupoint_law(w, cfg.tau_grid, tols)
    if name == "sets":
        return verify_set_measures(w, xs, tols)
    if name == "verify-t1":
        return verify_mean_value(w, xs, cfg.y_grid, ecfg, tols) + verify_tau_consistency(w, xs, ecfg, tols)
    if name == "verify-t2":
        return verify_signum_law(w, xs, ecfg, tols)
    if name == "verify-lemmas":
        return verify_nu_sums(w, cfg.tau_grid, ecfg, tols)
    if name == "verify-hl":
        return [verify_hardy_littlewood(w, ecfg, tols), verify_tiling(w, ecfg, tols)]
    if name == "ladder":
        out = verify_ladder(w, None, ecfg, tols)
        if any(r.status == "error" for r in out):
            return out
        g = ladder_for_window(w, tols.quad_tol, ecfg)
        return out + verify_third_order(w, xs, g, ecfg, tols)
    if name == "eval":
        return _eval_reports(cfg, ecfg, tols)
    if name == "bench":
        return _bench_reports(cfg, ecfg, tols)
    raise ConfigError(f"command: unknown suite {name}")


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _pass_field(r: VerificationReport) -> str:
    return "error" if r.status == "error" else _fmt(r.passed)


def _row(r: VerificationReport, timing: bool) -> list[str]:
    return [
        r.scenario, _fmt(float(r.T)), _fmt(float(r.H)), r.param_name, _fmt(r.param_value), _fmt(r.observed),
        _fmt(r.predicted), _fmt(r.ratio), _fmt(r.error_budget), _pass_field(r), str(r.n_evals),
        _fmt(r.seconds if timing else 0.0),
    ]


def _json_num(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def render(reports, meta: dict, fmt: str, timing: bool) -> str:
    """Reports plus metadata as CSV (metadata in leading '#' lines) or JSON."""
    if fmt == "csv":
        buf = io.StringIO()
        for k, v in meta.items():
            buf.write(f"# {k}: {json.dumps(v, sort_keys=True, default=_json_default)}\n")
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(CSV_COLUMNS)
        for r in reports:
            wr.writerow(_row(r, timing))
        return buf.getvalue()
    cells = []
    for r in reports:
        cells.append({
            "scenario": r.scenario, "T": r.T, "H": r.H, "param_name": r.param_name,
            "param_value": _json_num(r.param_value), "observed": _json_num(r.observed),
            "predicted": _json_num(r.predicted), "ratio": _json_num(r.ratio),
            "error_budget": _json_num(r.error_budget), "pass": r.passed if r.status != "error" else None,
            "n_evals": r.n_evals, "seconds": r.seconds if timing else 0.0, "status": r.status,
            "pass_ratio": r.pass_ratio, "pass_budget": r.pass_budget, "band": [_json_num(b) for b in r.band],
            "safety": _json_num(r.safety), "message": r.message,
        })
    return json.dumps({"metadata": meta, "cells": cells}, indent=1, sort_keys=False, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, tuple):
        return list(o)
    return str(o)


def run_scenario(cfg: ScenarioConfig, stdout=None) -> int:
    """Run the configured suites, write the report, return the exit status."""
    stdout = stdout or sys.stdout
    cfg.validate()
    ecfg = EvalConfig(remainder_order=cfg.remainder_order)
    tols = cfg.tolerances()
    names = ALL_SUITES if cfg.command == "all" else (cfg.command,)
    clear_caches()
    reset_z_eval_count()
    wall0 = time.perf_counter()
    reports: list[VerificationReport] = []
    for name in names:
        reports.extend(_suite(name, cfg, ecfg, tols))
    reports = sort_reports(reports)
    meta = {"version": __version__, "config": cfg.echo(), "total_z_evals": z_eval_count()}
    if cfg.timing:
        meta["wall_time"] = time.perf_counter() - wall0
        meta["threads"] = thread_count()
    meta["cells"] = len(reports)
    text = render(reports, meta, cfg.format, cfg.timing)
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    if any(r.status == "error" for r in reports):
        return 1
    return 0 if all(r.passed for r in reports) else 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _band(text: str) -> tuple[str, tuple[float, float]]:
    try:
        name, rng = text.split("=", 1)
        lo, hi = rng.split(":", 1)
        return name.strip(), (parse_number(lo), parse_number(hi))
    except ValueError:
        raise argparse.ArgumentTypeError(f"band must look like scenario=lo:hi, got {text!r}") from None


def _num(text):
    try:
        return parse_number(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _grid(text):
    try:
        return parse_grid(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hardyz", description="Hardy Z-function mean-value and signum-law verification.",
                allow_abbrev=False)
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--T", type=_num, default=1e6, help="window start (default 1e6)")
    p.add_argument("--H", type=_num, default=1e3, help="window length (default 1e3)")
    p.add_argument("--x", type=_grid, default=None, help="half-widths x, e.g. pi/4,pi/2")
    p.add_argument("--y", type=_grid, default=None, help="half-widths y for G2 (default: same as --x)")
    p.add_argument("--tau", type=_grid, default=None, help="shifts tau, e.g. 0,1,pi/2")
    p.add_argument("--t", type=_grid, default=None, help="abscissae for eval")
    p.add_argument("--n", type=int, default=10000, help="evaluations for bench")
    p.add_argument("--remainder-order", type=int, default=2, choices=(0, 1, 2))
    p.add_argument("--tol", type=_num, default=1e-10, help="relative quadrature tolerance")
    p.add_argument("--safety", type=_num, default=5.0, help="multiplier on error budgets")
    p.add_argument("--band", type=_band, action="append", default=[], help="override a band: scenario=lo:hi")
    p.add_argument("--output", default=None, help="report path (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--timing", choices=("on", "off"), default="on",
                   help="'off' zeroes the seconds column and drops wall time, for byte-comparable reports")
    p.add_argument("--version", action="version", version=f"hardyz {__version__}")
    return p


def config_from_args(argv=None) -> ScenarioConfig:
    a = build_parser().parse_args(argv)
    cfg = ScenarioConfig(command=a.command, T=a.T, H=a.H, n=a.n, remainder_order=a.remainder_order,
                         quad_tol=a.tol, safety=a.safety, bands=dict(a.band), output_path=a.output,
                         format=a.format, timing=a.timing == "on")
    if a.x is not None:
        cfg.x_grid = a.x
    if a.y is not None:
        cfg.y_grid = a.y
    if a.tau is not None:
        cfg.tau_grid = a.tau
    if a.t is not None:
        cfg.t_values = a.t
    return cfg


def main(argv=None) -> int:
    try:
        cfg = config_from_args(argv)
        return run_scenario(cfg)
    except ConfigError as e:
        sys.stderr.write(f"hardyz: invalid configuration: {e}\n")
        return 1
    except (HardyZError, OSError, ValueError) as e:
        sys.stderr.write(f"hardyz: {type(e).__name__}: {e}\n")
        return 1
