"""Command-line entry point.

Configuration is a flat ``section.key = value`` file, one key per line,
``#`` starts a comment. Rationals are written ``num/den``.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import json
import math
import os
import platform
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import __version__
from .errors import (AnsatzInsufficient, ConfigError, DbarError, NotClosed, ParseError,
                     ValidationError)
from .experiments import (CSV_COLUMNS, ExperimentConfig, QuadratureConfig, Tolerances,
                          dimension_sweep, lempert_example, mc_norm_check, verify_suite)
from .forms import parse_form
from .gaussian import DEFAULT_N, WeightSequence
from .qi import format_rational, parse_rational
from .solver import solve_minimal

COMMANDS = ("verify", "solve", "sweep", "lempert", "mc")
FORMATS = ("json", "csv", "both")


@dataclass(frozen=True)
class IOConfig:
    form: Optional[str] = None
    output: str = "dbarlab-out"
    format: str = "both"


@dataclass(frozen=True)
class RunConfig:
    command: str
    experiment: ExperimentConfig = field(default_factory=ExperimentConfig)
    io: IOConfig = field(default_factory=IOConfig)
    p: int = 2
    lempert_cap: Optional[int] = None

    @property
    def weights(self) -> WeightSequence:
        return self.experiment.weights


# -- parsing ----------------------------------------------------------------

def _int(v: str) -> int:
    return int(v.strip())


def _int_list(v: str) -> Tuple[int, ...]:
    v = v.strip()
    if ".." in v:
        lo, hi = v.split("..")
        return tuple(range(int(lo), int(hi) + 1))
    return tuple(int(x) for x in v.replace(",", " ").split())


def _rational_list(v: str) -> Tuple[Fraction, ...]:
    return tuple(parse_rational(x) for x in v.replace(",", " ").split())


_SCALARS = {
    "run.command": str.strip,
    "weights.kind": str.strip,
    "weights.c": lambda v: parse_rational(v.strip()),
    "weights.r": lambda v: parse_rational(v.strip()),
    "weights.N": _int,
    "weights.values": _rational_list,
    "experiment.n_range": _int_list,
    "experiment.s": _int,
    "experiment.t": _int,
    "experiment.degree_cap": _int,
    "experiment.seed": _int,
    "experiment.case_count": _int,
    "experiment.samples": _int,
    "experiment.jobs": _int,
    "quadrature.radial_nodes": _int,
    "quadrature.angular_nodes": _int,
    "quadrature.cutoff_radius": lambda v: parse_rational(v.strip()),
    "tolerances.mc_sigma": lambda v: float(v),
    "tolerances.lempert_rel_residual": lambda v: float(v),
    "io.form": str.strip,
    "io.output": str.strip,
    "io.format": str.strip,
    "lempert.p": _int,
    "lempert.cap": _int,
}


def _read_pairs(text: str):
    values: Dict[str, object] = {}
    lines: Dict[str, int] = {}
    errs = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            errs.append(("?", lineno, f"expected 'section.key = value', got {raw.strip()!r}"))
            continue
        key, val = (x.strip() for x in line.split("=", 1))
        if key not in _SCALARS:
            errs.append((key, lineno, "unknown key"))
            continue
        if key in values:
            errs.append((key, lineno, f"duplicate key (first set on line {lines[key]})"))
            continue
        try:
            values[key] = _SCALARS[key](val)
        except (ValueError, ZeroDivisionError) as exc:
            errs.append((key, lineno, f"bad value {val!r}: {exc}"))
            continue
        lines[key] = lineno
    return values, lines, errs


def _build_weights(values, lines):
    kind = values.get("weights.kind", "geometric")
    N = values.get("weights.N", DEFAULT_N)
    line = lines.get("weights.kind", 0)
    if kind == "geometric":
        if "weights.values" in values:
            raise ValidationError([("weights.values", lines["weights.values"],
                                    "only allowed with weights.kind = explicit")])
        c = values.get("weights.c", Fraction(1, 4))
        r = values.get("weights.r", Fraction(1, 2))
        try:
            return WeightSequence.geometric(c, r, N)
        except ValidationError as exc:
            key = "weights.c" if "weights.c" in lines else "weights.r"
            line = lines.get(key, line)
            raise ValidationError([(key, line, why) for _, _, why in exc.errors]) from None
    if kind == "explicit":
        if "weights.values" not in values:
            raise ValidationError([("weights.values", line, "explicit weights need values")])
        try:
            return WeightSequence.explicit(values["weights.values"])
        except ValidationError as exc:
            raise ValidationError([(k, lines["weights.values"], why)
                                   for k, _, why in exc.errors]) from None
    raise ValidationError([("weights.kind", line, f"unknown kind {kind!r}")])


def parse_config(text: str, command: Optional[str] = None) -> RunConfig:
    """Parse and validate a config file; ``command`` overrides ``run.command``."""
    values, lines, errs = _read_pairs(text)
    if command is not None:
        values["run.command"] = command
    cmd = values.get("run.command", "")
    if not cmd:
        errs.append(("run.command", lines.get("run.command", 0), "missing or empty command"))
    elif cmd not in COMMANDS:
        errs.append(("run.command", lines.get("run.command", 0),
                     f"unknown command {cmd!r}; expected one of {', '.join(COMMANDS)}"))
    if errs:
        raise ParseError(errs)

    weights = _build_weights(values, lines)
    qd, td = QuadratureConfig(), Tolerances()
    quad = QuadratureConfig(
        values.get("quadrature.radial_nodes", qd.radial_nodes),
        values.get("quadrature.angular_nodes", qd.angular_nodes),
        values.get("quadrature.cutoff_radius", qd.cutoff_radius))
    tol = Tolerances(values.get("tolerances.mc_sigma", td.mc_sigma),
                     values.get("tolerances.lempert_rel_residual", td.lempert_rel_residual))
    ed = ExperimentConfig()
    kwargs = {name: values.get(f"experiment.{name}", getattr(ed, name))
              for name in ("n_range", "s", "t", "degree_cap", "seed", "case_count",
                           "samples", "jobs")}
    try:
        exp = ExperimentConfig(weights=weights, quadrature=quad, tolerances=tol, **kwargs)
    except ValidationError as exc:
        raise ValidationError([(k, lines.get(k, 0), why) for k, _, why in exc.errors]) from None

    io = IOConfig(values.get("io.form"), values.get("io.output", IOConfig.output),
                  values.get("io.format", IOConfig.format))
    verrs = []
    if io.format not in FORMATS:
        verrs.append(("io.format", lines.get("io.format", 0), f"expected one of {FORMATS}"))
    if cmd in ("solve", "mc"):
        if not io.form:
            verrs.append(("io.form", 0, f"command {cmd!r} needs an input form"))
        elif not Path(io.form).is_file():
            verrs.append(("io.form", lines.get("io.form", 0), f"no such file: {io.form}"))
    p = values.get("lempert.p", 2)
    if p < 1:
        verrs.append(("lempert.p", lines.get("lempert.p", 0), "must be >= 1"))
    cap = values.get("lempert.cap")
    if cap is not None and cap < 0:
        verrs.append(("lempert.cap", lines.get("lempert.cap", 0), "must be >= 0"))
    if verrs:
        raise ValidationError(verrs)
    return RunConfig(cmd, exp, io, p, cap)


def _fmt_ints(xs) -> str:
    return ", ".join(str(x) for x in xs)


def render_config(cfg: RunConfig) -> str:
    """Inverse of :func:`parse_config`."""
    e, w = cfg.experiment, cfg.experiment.weights
    out = [f"run.command = {cfg.command}"]
    if w.kind == "geometric":
        out += ["weights.kind = geometric", f"weights.c = {format_rational(w.c)}",
                f"weights.r = {format_rational(w.r)}", f"weights.N = {w.N}"]
    else:
        out += ["weights.kind = explicit",
                "weights.values = " + ", ".join(format_rational(a) for a in w.prefix)]
    out += [
        f"experiment.n_range = {_fmt_ints(e.n_range)}",
        f"experiment.s = {e.s}", f"experiment.t = {e.t}",
        f"experiment.degree_cap = {e.degree_cap}", f"experiment.seed = {e.seed}",
        f"experiment.case_count = {e.case_count}", f"experiment.samples = {e.samples}",
        f"experiment.jobs = {e.jobs}",
        f"quadrature.radial_nodes = {e.quadrature.radial_nodes}",
        f"quadrature.angular_nodes = {e.quadrature.angular_nodes}",
        f"quadrature.cutoff_radius = {format_rational(Fraction(e.quadrature.cutoff_radius))}",
        f"tolerances.mc_sigma = {e.tolerances.mc_sigma!r}",
        f"tolerances.lempert_rel_residual = {e.tolerances.lempert_rel_residual!r}",
    ]
    if cfg.io.form is not None:
        out.append(f"io.form = {cfg.io.form}")
    out += [f"io.output = {cfg.io.output}", f"io.format = {cfg.io.format}",
            f"lempert.p = {cfg.p}"]
    if cfg.lempert_cap is not None:
        out.append(f"lempert.cap = {cfg.lempert_cap}")
    return "\n".join(out) + "\n"


def apply_env(cfg: RunConfig, environ=None) -> RunConfig:
    """``DBARLAB_OUTPUT`` and ``DBARLAB_JOBS`` override the file values."""
    environ = os.environ if environ is None else environ
    if environ.get("DBARLAB_OUTPUT"):
        cfg = dataclasses.replace(cfg, io=dataclasses.replace(
            cfg.io, output=environ["DBARLAB_OUTPUT"]))
    if environ.get("DBARLAB_JOBS"):
        try:
            jobs = int(environ["DBARLAB_JOBS"])
        except ValueError:
            raise ValidationError([("DBARLAB_JOBS", 0, "must be an integer")]) from None
        cfg = dataclasses.replace(cfg, experiment=dataclasses.replace(cfg.experiment,
                                                                      jobs=jobs))
    return cfg


# -- output -----------------------------------------------------------------

def dumps(obj, indent: int = 0) -> str:
    """Deterministic JSON: sorted keys, floats with 17 significant digits."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return json.dumps(str(x))
        return format(x, ".17g")
    if isinstance(obj, (str, Fraction)):
        return json.dumps(format_rational(obj) if isinstance(obj, Fraction) else obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent + 1)}"
                 for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(pad + dumps(v, indent + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _write_csv(path: Path, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(CSV_COLUMNS)
        for r in rows:
            if "norm_f_sq_num" in r:
                wr.writerow([r[c] if c != "ratio_float" else format(r[c], ".17g")
                             for c in CSV_COLUMNS])


def _manifest(cfg: RunConfig, outputs: List[str], exit_code: int) -> dict:
    text = render_config(cfg)
    return {
        "command": cfg.command,
        "config_sha256": hashlib.sha256(text.encode()).hexdigest(),
        "config": text,
        "seed": cfg.experiment.seed,
        "exit_code": exit_code,
        "outputs": sorted(outputs),
        "versions": {"dbarlab": __version__, "python": platform.python_version(),
                     "numpy": np.__version__},
    }


def _error_record(exc: Exception) -> dict:
    rec = {"error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, ConfigError):
        rec["errors"] = [{"key": k, "line": ln, "reason": why} for k, ln, why in exc.errors]
    return rec


def _execute(cfg: RunConfig) -> dict:
    e = cfg.experiment
    if cfg.command == "verify":
        return verify_suite(e)
    if cfg.command == "sweep":
        return dimension_sweep(e)
    if cfg.command == "lempert":
        return lempert_example(e, cfg.p, cfg.lempert_cap)
    f = parse_form(Path(cfg.io.form).read_text(encoding="utf-8"))
    if cfg.command == "mc":
        return mc_norm_check(e, f)
    rep = solve_minimal(f, e.weights)
    return {"experiment": "solve", "report": rep.to_dict(), "passed": True}


def run(cfg: RunConfig) -> int:
    """Execute ``cfg``; 0 when every asserted property holds, 1 on a property
    failure, 2 on a usage or configuration error."""
    out = Path(cfg.io.output)
    outputs = []
    code = 0
    try:
        verdict = _execute(cfg)
        code = 0 if verdict.get("passed") else 1
    except (NotClosed, AnsatzInsufficient) as exc:
        verdict = {"experiment": cfg.command, "passed": False, **_error_record(exc)}
        code = 1
    except (ConfigError, OSError, ValueError) as exc:
        verdict = {"experiment": cfg.command, "passed": False, **_error_record(exc)}
        code = 2
    except DbarError as exc:
        verdict = {"experiment": cfg.command, "passed": False, **_error_record(exc)}
        code = 1
    if cfg.io.format in ("json", "both") or code:
        _write(out / f"{cfg.command}.json", dumps(verdict) + "\n")
        outputs.append(f"{cfg.command}.json")
    if cfg.command == "sweep" and cfg.io.format in ("csv", "both") and "builtin" in verdict:
        _write_csv(out / "sweep.csv", verdict["builtin"])
        _write_csv(out / "sweep_truncated.csv", verdict["truncated"])
        outputs += ["sweep.csv", "sweep_truncated.csv"]
    _write(out / "manifest.json", dumps(_manifest(cfg, outputs, code)) + "\n")
    return code


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dbarlab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value config file")
    common.add_argument("--out", help="output directory")
    sub.add_parser("verify", parents=[common], help="exact identity sweep")
    sp = sub.add_parser("solve", parents=[common], help="minimal-norm solve of a form file")
    sp.add_argument("--form", help="form literal file")
    sub.add_parser("sweep", parents=[common], help="dimension sweep")
    sp = sub.add_parser("lempert", parents=[common], help="projected Lempert datum")
    sp.add_argument("--p", type=int)
    sp.add_argument("--cap", type=int, help="per-coordinate Hermite degree cap")
    sp = sub.add_parser("mc", parents=[common], help="Monte Carlo norm check of a form file")
    sp.add_argument("--form", help="form literal file")
    return ap


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    lines = []
    try:
        text = Path(args.config).read_text(encoding="utf-8") if args.config else ""
        # command-line flags become config lines so they get the same checks
        if getattr(args, "form", None):
            lines.append(f"io.form = {args.form}")
        if args.out:
            lines.append(f"io.output = {args.out}")
        if getattr(args, "p", None) is not None:
            lines.append(f"lempert.p = {args.p}")
        if getattr(args, "cap", None) is not None:
            lines.append(f"lempert.cap = {args.cap}")
        kept = "\n".join(l for l in text.splitlines()
                         if l.split("#", 1)[0].split("=", 1)[0].strip()
                         not in {x.split("=")[0].strip() for x in lines})
        cfg = apply_env(parse_config(kept + "\n" + "\n".join(lines), command=args.command))
    except (ConfigError, OSError) as exc:
        print(dumps(_error_record(exc)), file=sys.stderr)
        return 2
    code = run(cfg)
    print(f"{cfg.command}: exit {code}, outputs in {cfg.io.output}")
    return code


if __name__ == "__main__":
    sys.exit(main())
