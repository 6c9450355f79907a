"""Command-line front end: frame audits, transforms, norms and experiments.

Exit status is 0 when every asserted check passes, 1 when a check fails
(the report is still written) and 2 for invalid input or configuration.
"""

from __future__ import annotations

import argparse
import inspect
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import experiments as ex
from .experiments import AuditReport, Check, report_csv, report_json
from .frame import FrequencyGrid, overlap_count, partition_of_unity
from .lattice import System
from .spaces import DYADIC, SpaceParams, function_norm, sequence_norm
from .transform import (
    PeriodicSignal,
    analyze,
    littlewood_paley_check,
    load_coefficients,
    load_signal,
    random_signal,
    resolved_limit,
    roundtrip_error,
    save_coefficients,
    save_signal,
    synthesize,
)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INVALID = 2

DEFAULT_GRID = 128
DEFAULT_SEED = 42

SYSTEMS = {"smooth": System.SMOOTH_PARSEVAL, "cone": System.CONE_PROJECTED}


class InvalidInput(Exception):
    """Raised for anything that should end with exit status 2."""


@dataclass
class RunConfig:
    """Validated settings of one invocation."""

    command: str
    action: str | None = None
    grid: int = DEFAULT_GRID
    jmax: int | None = None
    system: str = "smooth"
    alpha: float = 0.0
    p: float = 2.0
    q: float = 2.0
    family: str = "ab"
    seed: int = DEFAULT_SEED
    input: str | None = None
    output: str | None = None
    format: str = "json"
    tol: float | None = None
    params: dict = field(default_factory=dict)
    threads: int = 1

    def validate(self) -> None:
        if self.grid < 2 or self.grid & (self.grid - 1):
            raise InvalidInput(f"grid must be a power of two >= 2, got {self.grid}")
        if self.system not in SYSTEMS:
            raise InvalidInput(f"system must be one of {sorted(SYSTEMS)}")
        if self.family not in ("ab", DYADIC):
            raise InvalidInput("family must be 'ab' or 'dyadic'")
        cover = FrequencyGrid(self.grid).j_cover
        if self.jmax is not None and not 0 <= self.jmax <= cover:
            raise InvalidInput(f"jmax must lie in 0..{cover} for grid {self.grid}")
        if not (self.p > 0 and math.isfinite(self.p)):
            raise InvalidInput("p must be positive and finite")
        if not self.q > 0:
            raise InvalidInput("q must be positive (inf allowed)")
        if self.tol is not None and not self.tol > 0:
            raise InvalidInput("tolerance must be positive")
        if self.format not in ("json", "csv"):
            raise InvalidInput("format must be json or csv")
        if self.seed < 0:
            raise InvalidInput("seed must be nonnegative")

    @property
    def j_max(self) -> int:
        """Requested top scale; defaults to floor(log4 N)."""
        return FrequencyGrid(self.grid).j_max if self.jmax is None else self.jmax


def _threads() -> int:
    raw = os.environ.get("SHEARLET_THREADS")
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise InvalidInput(f"SHEARLET_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise InvalidInput("SHEARLET_THREADS must be at least 1")
    return n


def _key_value(text: str) -> tuple[str, object]:
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    k, v = text.split("=", 1)
    try:
        return k.strip(), json.loads(v)
    except json.JSONDecodeError:
        return k.strip(), v


def _float(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file whose keys override the flags")
    common.add_argument("--seed", type=int, default=None, help=f"random seed (default {DEFAULT_SEED})")
    common.add_argument("--output", "-o", help="write the report (or data file) here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default=None, help="report format")
    common.add_argument("--tol", type=_float, default=None, help="override the check tolerance")

    grid_opts = argparse.ArgumentParser(add_help=False)
    grid_opts.add_argument("--grid", type=int, default=None, help=f"grid size N (default {DEFAULT_GRID})")
    grid_opts.add_argument("--jmax", type=int, default=None, help="top scale (default floor(log4 N))")
    grid_opts.add_argument("--system", choices=sorted(SYSTEMS), default=None)

    parser = argparse.ArgumentParser(prog="shearlet-tl", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    frame = sub.add_parser("frame", help="partition of unity and overlap audits")
    fsub = frame.add_subparsers(dest="action", required=True)
    fsub.add_parser("check", parents=[common, grid_opts], help="squared windows sum to one")
    fsub.add_parser("overlap", parents=[common, grid_opts], help="count overlapping horizontal bands")

    tr = sub.add_parser("transform", help="analysis and synthesis")
    tsub = tr.add_subparsers(dest="action", required=True)
    a = tsub.add_parser("analyze", parents=[common, grid_opts], help="signal file to coefficient records")
    a.add_argument("--input", "-i", required=False)
    s = tsub.add_parser("synthesize", parents=[common, grid_opts], help="coefficient records to signal file")
    s.add_argument("--input", "-i", required=False)
    tsub.add_parser("roundtrip", parents=[common, grid_opts], help="analysis then synthesis of a random signal")

    nm = sub.add_parser("norm", parents=[common, grid_opts], help="Triebel-Lizorkin function or sequence norm")
    nm.add_argument("--family", choices=("ab", DYADIC), default=None)
    nm.add_argument("--alpha", type=_float, default=None)
    nm.add_argument("--p", type=_float, default=None)
    nm.add_argument("--q", type=_float, default=None)
    nm.add_argument("--input", "-i", help="SHGRID01 signal, or coefficient records with --coefficients")
    nm.add_argument("--coefficients", action="store_true", help="treat the input as coefficient records")

    exp = sub.add_parser("experiment", help="numerical audits")
    esub = exp.add_subparsers(dest="action", required=True)
    for name, fn in ex.AUDITS.items():
        doc = (fn.__doc__ or "").strip().splitlines()[0] if fn.__doc__ else name
        e = esub.add_parser(name, parents=[common, grid_opts], help=doc)
        e.add_argument("--param", action="append", type=_key_value, default=[], metavar="KEY=VALUE",
                       help="keyword argument for the audit (JSON value)")
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    values = {k: v for k, v in vars(ns).items() if v is not None}
    params = dict(values.pop("param", []) or [])
    cfg_path = values.pop("config", None)
    coefficients = values.pop("coefficients", False)
    if cfg_path:
        try:
            with open(cfg_path) as fh:
                overrides = json.load(fh)
        except (OSError, json.JSONDecodeError) as err:
            raise InvalidInput(f"cannot read config {cfg_path}: {err}") from None
        if not isinstance(overrides, dict):
            raise InvalidInput("config file must hold a JSON object")
        allowed = set(RunConfig.__dataclass_fields__) - {"command", "action", "threads"}
        for k, v in overrides.items():
            key = k.replace("-", "_")
            if key == "params":
                if not isinstance(v, dict):
                    raise InvalidInput("config 'params' must be an object")
                params.update(v)
            elif key in allowed:
                values[key] = v
            else:
                raise InvalidInput(f"unknown config key {k!r}")
    values["params"] = params
    try:
        cfg = RunConfig(**values)
        for name in ("grid", "seed"):
            setattr(cfg, name, int(getattr(cfg, name)))
        if cfg.jmax is not None:
            cfg.jmax = int(cfg.jmax)
        for name in ("alpha", "p", "q"):
            setattr(cfg, name, float(getattr(cfg, name)))
    except (TypeError, ValueError) as err:
        raise InvalidInput(f"invalid configuration: {err}") from None
    cfg.params["_coefficients"] = coefficients
    cfg.threads = _threads()
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# commands


def _frame_check(cfg: RunConfig) -> AuditReport:
    grid = FrequencyGrid(cfg.grid)
    system = SYSTEMS[cfg.system]
    rep = partition_of_unity(system, grid, cfg.j_max)
    tol = 1e-8 if cfg.tol is None else cfg.tol
    dev = np.abs(rep.residual)
    mask = grid.resolved_mask(cfg.j_max)
    if system is System.CONE_PROJECTED:
        mask &= ~grid.seam_mask()
    checked = float(dev[mask].max()) if mask.any() else 0.0
    out = AuditReport(
        "frame-check",
        "squared windows of the system sum to one on the frequencies the truncated family resolves",
        {"system": cfg.system, "grid": cfg.grid, "j_max": cfg.j_max, "tol": tol},
        measured=rep.summary(),
    )
    out.add_case("full", cfg.j_max, None, rep.max_deviation, tol, group="full")
    out.add_case("resolved", cfg.j_max, None, rep.max_deviation_resolved, tol, group="resolved")
    out.add_case("off_seam", cfg.j_max, None, rep.max_deviation_off_seam, tol, group="off_seam")
    out.add_case("on_seam", cfg.j_max, None, rep.max_deviation_on_seam, tol, group="on_seam")
    out.add_case("checked", cfg.j_max, None, checked, tol, group="checked")
    out.checks = [Check("deviation on the checked region", "max_le", tol, field="measured", group="checked")]
    return out


def _frame_overlap(cfg: RunConfig) -> AuditReport:
    grid = FrequencyGrid(cfg.grid)
    j_max = cfg.j_max if cfg.jmax is not None else min(5, grid.j_cover)
    rep = overlap_count(grid, j_max)
    out = AuditReport(
        "frame-overlap",
        "each horizontal band meets at most 11 other horizontal bands",
        {"grid": cfg.grid, "j_max": j_max},
        measured={"max_count": rep.max_count, "max_interaction": rep.max_interaction},
    )
    for (j, l), c in sorted(rep.counts.items()):
        out.add_case(f"j{j}_l{l}", j, l, c, rep.bound, group="count", interactions=rep.interactions[(j, l)])
    out.checks = [Check("overlap count", "max_le", 1.0)]
    return out


def _need_input(cfg: RunConfig) -> str:
    if not cfg.input:
        raise InvalidInput("--input is required")
    return cfg.input


def _load_signal(path: str) -> PeriodicSignal:
    try:
        return load_signal(path)
    except (OSError, ValueError) as err:
        raise InvalidInput(f"cannot load signal {path}: {err}") from None


def _transform_analyze(cfg: RunConfig):
    f = _load_signal(_need_input(cfg))
    grid = f.grid
    j_max = grid.j_max if cfg.jmax is None else cfg.jmax
    if j_max > grid.j_cover:
        raise InvalidInput(f"jmax exceeds grid capacity {grid.j_cover}")
    c = analyze(f, SYSTEMS[cfg.system], j_max)
    return c


def _transform_synthesize(cfg: RunConfig) -> PeriodicSignal:
    path = _need_input(cfg)
    try:
        c = load_coefficients(path, cfg.grid, cfg.jmax)
        return synthesize(c)
    except (OSError, ValueError, KeyError, TypeError, json.JSONDecodeError) as err:
        raise InvalidInput(f"cannot synthesize from {path}: {err}") from None


def _transform_roundtrip(cfg: RunConfig) -> AuditReport:
    grid = FrequencyGrid(cfg.grid)
    system = SYSTEMS[cfg.system]
    tol = 1e-8 if cfg.tol is None else cfg.tol
    rng = np.random.default_rng(cfg.seed)
    f = random_signal(grid, rng, resolved_limit(cfg.j_max))
    err = roundtrip_error(f, system, cfg.j_max)
    c = analyze(f, system, cfg.j_max)
    energy = c.energy() / f.norm2() ** 2 if f.norm2() else 1.0
    lp = littlewood_paley_check(f, system, cfg.j_max)
    out = AuditReport(
        "transform-roundtrip",
        "synthesis after analysis is the identity on signals the truncated family resolves",
        {"system": cfg.system, "grid": cfg.grid, "j_max": cfg.j_max, "seed": cfg.seed, "tol": tol},
        measured={"relative_error": err, "energy_ratio": energy, "littlewood_paley": lp},
    )
    out.add_case("relative_error", cfg.j_max, None, err, tol, group="error")
    row = out.add_case("energy_ratio", cfg.j_max, None, energy, 1.0, group="energy")
    row["deviation"] = energy - 1.0
    out.checks = [
        Check("reconstruction error", "max_le", tol, field="measured", group="error"),
        Check("energy preserved", "abs_le", tol, field="deviation", group="energy"),
    ]
    return out


def _norm(cfg: RunConfig) -> AuditReport:
    path = _need_input(cfg)
    try:
        sp = SpaceParams(cfg.alpha, cfg.p, cfg.q, cfg.family)
    except ValueError as err:
        raise InvalidInput(str(err)) from None
    if cfg.params.get("_coefficients"):
        try:
            c = load_coefficients(path, cfg.grid, cfg.jmax)
        except (OSError, ValueError, KeyError, TypeError, json.JSONDecodeError) as err:
            raise InvalidInput(f"cannot load coefficients {path}: {err}") from None
        value = sequence_norm(c, sp)
        n, j_max, kind = c.N, c.j_max, "sequence"
    else:
        f = _load_signal(path)
        j_max = cfg.jmax
        value = function_norm(f, sp, SYSTEMS[cfg.system], j_max)
        n, kind = f.N, "function"
        j_max = f.grid.j_cover if j_max is None else j_max
    out = AuditReport(
        "norm",
        "Triebel-Lizorkin quasi-norm (inner l^q over bands, outer L^p over the cell)",
        {"family": cfg.family, "alpha": cfg.alpha, "p": cfg.p, "q": cfg.q, "kind": kind, "system": cfg.system},
        measured={"family": cfg.family, "alpha": cfg.alpha, "p": cfg.p, "q": cfg.q, "value": value,
                  "grid": n, "j_max": j_max},
    )
    out.add_case("value", j_max, None, value, float("nan"), group="value")
    out.checks = [Check("finite value", "finite", 0.0, field="measured")]
    return out


def _experiment(cfg: RunConfig) -> AuditReport:
    fn = ex.AUDITS[cfg.action]
    sig = inspect.signature(fn)
    kwargs = {k: v for k, v in cfg.params.items() if not k.startswith("_")}
    unknown = set(kwargs) - set(sig.parameters)
    if unknown:
        raise InvalidInput(f"unknown parameter(s) for {cfg.action}: {sorted(unknown)}")
    if "seed" in sig.parameters and "seed" not in kwargs:
        kwargs["seed"] = cfg.seed
    if "j_max" in sig.parameters and "j_max" not in kwargs and cfg.jmax is not None:
        kwargs["j_max"] = cfg.jmax
    if "grids" in sig.parameters and "grids" not in kwargs and cfg.grid != DEFAULT_GRID:
        kwargs["grids"] = (cfg.grid, 2 * cfg.grid)
    for k, v in kwargs.items():
        if isinstance(v, list):
            kwargs[k] = tuple(tuple(x) if isinstance(x, list) else x for x in v)
    try:
        return fn(**kwargs)
    except (ValueError, TypeError) as err:
        raise InvalidInput(f"{cfg.action}: {err}") from None


def _write_text(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as err:
        raise InvalidInput(f"cannot write {path}: {err}") from None


def emit_report(report: AuditReport, path: str | None, fmt: str = "json", header: dict | None = None) -> None:
    """Write a report as JSON (sorted keys, 17 significant digits) or CSV."""
    if fmt == "csv":
        _write_text(report_csv(report), path)
        return
    d = report.to_dict()
    if header:
        d.update(header)
    _write_text(ex.to_json(d) + "\n", path)


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as err:
        return EXIT_INVALID if err.code not in (0, None) else EXIT_OK
    try:
        cfg = config_from_args(ns)
        key = (cfg.command, cfg.action)
        if key == ("transform", "analyze"):
            c = _transform_analyze(cfg)
            if cfg.output:
                try:
                    save_coefficients(c, cfg.output)
                except OSError as err:
                    raise InvalidInput(f"cannot write {cfg.output}: {err}") from None
            else:
                sys.stdout.write(json.dumps(c.to_records(), sort_keys=True) + "\n")
            return EXIT_OK
        if key == ("transform", "synthesize"):
            f = _transform_synthesize(cfg)
            if not cfg.output:
                raise InvalidInput("--output is required for synthesize")
            try:
                save_signal(f, cfg.output)
            except OSError as err:
                raise InvalidInput(f"cannot write {cfg.output}: {err}") from None
            return EXIT_OK
        handlers = {
            ("frame", "check"): _frame_check,
            ("frame", "overlap"): _frame_overlap,
            ("transform", "roundtrip"): _transform_roundtrip,
            ("norm", None): _norm,
        }
        handler = handlers.get(key, _experiment if cfg.command == "experiment" else None)
        if handler is None:
            raise InvalidInput(f"unknown command {cfg.command} {cfg.action or ''}".strip())
        report = handler(cfg)
        header = {"command": " ".join(x for x in key if x), "seed": cfg.seed, "threads": cfg.threads}
        emit_report(report, cfg.output, cfg.format, header)
        return EXIT_OK if report.passed else EXIT_FAILED
    except InvalidInput as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INVALID


def main() -> None:
    try:
        code = run()
        sys.stdout.flush()
    except BrokenPipeError:
        # downstream reader closed early (e.g. piped into head)
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        code = EXIT_OK
    sys.exit(code)


__all__ = ["RunConfig", "InvalidInput", "build_parser", "config_from_args", "emit_report", "run", "main"]
