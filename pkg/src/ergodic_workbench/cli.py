"""Batch front-end.

Every subcommand builds an :class:`ExperimentConfig` and hands it to
:func:`run`; ``run --config PATH`` reads the same schema from JSON.  Exit
status: 0 when every asserted property held, 1 on a property failure, 2 on a
configuration error, 3 on an I/O error.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import re
import sys
import tempfile
from dataclasses import dataclass, field

import numpy as np

from . import averaging as avg
from .ds_operator import DSOperator, operator_from_json, verify_ds
from .measure_model import (
    TailedFunction,
    TailedMeasureSpace,
    function_from_json,
    sample_paper_example,
)
from .pointwise_experiments import parse_system, return_times_avg, wiener_wintner_sweep
from .rearrangement import rearrange
from .suites import weak11_suite
from .symmetric_norms import compute_norm, parse_norm_spec

SCHEMA_VERSION = "ergodic-workbench/1"

PARAMETERS = {
    "norms": {"fn", "specs", "tol"},
    "op-verify": {"op", "space"},
    "avg-run": {"op", "fn", "weights", "n", "egorov"},
    "weak11-suite": {"instances", "horizon", "max_atoms"},
    "ww-sweep": {"system", "fn", "omega", "lambda_grid", "n"},
    "return-times": {"system_omega", "fn", "system_x", "gfn", "omega", "x", "n"},
    "paper-example": {"K", "grid_max", "points_per_decade"},
    "rearrange": {"fn"},
}
TABULAR = {"avg-run", "ww-sweep", "return-times", "paper-example", "rearrange"}


class ConfigError(ValueError):
    pass


class WeightsParseError(ConfigError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


@dataclass
class ExperimentConfig:
    kind: str
    parameters: dict = field(default_factory=dict)
    seed: int = 0
    output: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in PARAMETERS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}")
        unknown = set(self.parameters) - PARAMETERS[self.kind]
        if unknown:
            raise ConfigError(f"unknown parameters for {self.kind}: {sorted(unknown)}")
        bad_out = set(self.output) - {"path", "format"}
        if bad_out:
            raise ConfigError(f"unknown output keys: {sorted(bad_out)}")
        fmt = self.output.get("format") or ("csv" if self.kind in TABULAR else "json")
        if fmt not in ("csv", "json"):
            raise ConfigError(f"unknown format {fmt!r}")
        self.output = {"path": self.output.get("path"), "format": fmt}
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError("seed must be a non-negative integer")

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        unknown = set(doc) - {"kind", "parameters", "seed", "output"}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "kind" not in doc:
            raise ConfigError("config needs a 'kind'")
        return cls(doc["kind"], dict(doc.get("parameters", {})), doc.get("seed", 0), dict(doc.get("output", {})))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "parameters": self.parameters, "seed": self.seed, "output": self.output}


# -- parsing helpers ---------------------------------------------------------

def parse_complex(text: str) -> complex:
    """``"a+bi"`` style literals, e.g. ``0.6+0.8i``, ``-i``, ``2``."""
    s = text.strip().replace(" ", "")
    if not s:
        raise ValueError("empty complex literal")
    s = s.replace("I", "i")
    if s.endswith("i"):
        s = s[:-1] + "j"
    return complex(s)


def parse_weights(spec: str) -> avg.BesicovitchSequence:
    """Parse ``"trig:z=<c>,lambda=<c>(;z=<c>,lambda=<c>)*[;pert:<name>:<c>[:<r>]]"``.

    ``angle=<theta>`` may replace ``lambda=<c>`` to mean ``exp(2 pi i theta)``.
    The bound ``C`` is ``sum |z_j| + |c|``.
    """
    if not spec.startswith("trig:"):
        raise WeightsParseError("weights must start with 'trig:'", 0)
    pos = len("trig:")
    zs, lams = [], []
    pert = avg.Perturbation()
    for chunk in spec[pos:].split(";"):
        start = pos
        pos += len(chunk) + 1
        if chunk.startswith("pert:"):
            parts = chunk.split(":")
            name = parts[1] if len(parts) > 1 else ""
            if name not in ("zero", "harmonic", "geometric") or len(parts) > 4:
                raise WeightsParseError(f"bad perturbation {chunk!r}", start)
            try:
                c = parse_complex(parts[2]) if len(parts) > 2 else 0.0
                r = float(parts[3]) if len(parts) > 3 else 0.5
                pert = avg.Perturbation(name, c, r)
            except ValueError as exc:
                raise WeightsParseError(str(exc), start) from None
            continue
        items = {}
        offset = start
        for item in chunk.split(","):
            key, sep, val = item.partition("=")
            if not sep or key not in ("z", "lambda", "angle") or key in items:
                raise WeightsParseError(f"bad term {item!r}", offset)
            items[key] = (val, offset + len(key) + 1)
            offset += len(item) + 1
        if "z" not in items or (("lambda" in items) == ("angle" in items)):
            raise WeightsParseError("each term needs z= and exactly one of lambda= / angle=", start)
        try:
            z = parse_complex(items["z"][0])
            if "lambda" in items:
                lam = parse_complex(items["lambda"][0])
            else:
                lam = complex(np.exp(2j * np.pi * float(items["angle"][0])))
        except ValueError as exc:
            key = "lambda" if "lambda" in items else "angle"
            raise WeightsParseError(str(exc), items[key][1]) from None
        if abs(abs(lam) - 1) > 1e-12:
            raise WeightsParseError(f"lambda={items['lambda'][0]} is not unimodular", items["lambda"][1])
        zs.append(z)
        lams.append(lam)
    if not zs:
        raise WeightsParseError("no trigonometric terms", len("trig:"))
    return avg.BesicovitchSequence(avg.TrigPolynomial(zs, lams), pert)


def _int_list(value) -> list[int]:
    if isinstance(value, (list, tuple)):
        return [int(v) for v in value]
    return [int(float(v)) for v in str(value).split(",") if v.strip()]


def _load_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _load_function(spec: str, sys_=None) -> TailedFunction:
    m = re.fullmatch(r"indicator:(-?\d+)", spec or "")
    if m:
        if sys_ is None:
            raise ConfigError("indicator functions need a system")
        return TailedFunction.indicator(sys_.space(), [sys_.index(int(m.group(1)))])
    return function_from_json(_load_json(spec))


def _num(x: float):
    if isinstance(x, float) and not math.isfinite(x):
        return "inf" if x > 0 else "-inf" if x < 0 else "nan"
    return x


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return "%.17g" % float(x)


# -- runners -------------------------------------------------------------------

@dataclass
class Result:
    ok: bool = True
    doc: dict | None = None
    columns: list | None = None
    rows: list | None = None
    comments: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)


def _need(p: dict, *keys):
    missing = [k for k in keys if p.get(k) in (None, "")]
    if missing:
        raise ConfigError(f"missing parameters: {missing}")


def _run_norms(cfg: ExperimentConfig) -> Result:
    p = cfg.parameters
    _need(p, "fn", "specs")
    f = _load_function(p["fn"])
    specs = p["specs"] if isinstance(p["specs"], list) else [p["specs"]]
    out = {}
    for s in specs:
        try:
            spec = parse_norm_spec(s)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        out[s] = _num(compute_norm(f, spec, float(p.get("tol", 1e-12))))
    return Result(doc={"norms": out})


def _space_for_op(p: dict, T: DSOperator) -> TailedMeasureSpace:
    if p.get("space"):
        doc = _load_json(p["space"])
        return TailedMeasureSpace(doc["weights"], bool(doc.get("tail", True)))
    return TailedMeasureSpace.uniform(T.n_atoms)


def _run_op_verify(cfg: ExperimentConfig) -> Result:
    p = cfg.parameters
    _need(p, "op")
    T = operator_from_json(_load_json(p["op"]))
    report = verify_ds(T, _space_for_op(p, T))
    return Result(ok=report.ok, doc={"report": report.as_dict()})


def _run_avg(cfg: ExperimentConfig) -> Result:
    p = cfg.parameters
    _need(p, "op", "fn", "n")
    T = operator_from_json(_load_json(p["op"]))
    f = _load_function(p["fn"])
    beta = parse_weights(p["weights"]) if p.get("weights") else None
    trace = avg.averages_trace(T, f, _int_list(p["n"]), beta)
    columns = ["n"] + [f"atom{i}_{part}" for i in range(f.space.n_atoms) for part in ("re", "im")]
    columns += ["tail_re", "tail_im"]
    rows = []
    for n, g in zip(trace.ns, trace.functions):
        vals = [x for z in g.atom_values for x in (z.real, z.imag)]
        rows.append([n, *vals, g.tail_value.real, g.tail_value.imag])
    res = Result(columns=columns, rows=rows)
    if p.get("egorov"):
        eps, tol = (float(x) for x in p["egorov"])
        cert = avg.egorov_certify(trace, None, eps, tol)
        res.ok = cert.ok
        res.extra["egorov"] = {k: _num(v) if isinstance(v, float) else v for k, v in cert.as_dict().items()}
    return res


def _run_weak11(cfg: ExperimentConfig) -> Result:
    p = cfg.parameters
    summary = weak11_suite(
        cfg.seed,
        int(p.get("instances", 500)),
        int(p.get("horizon", 200)),
        int(p.get("max_atoms", 64)),
    )
    return Result(ok=summary["ok"], doc={"summary": summary})


def _lambda_grid(value) -> np.ndarray:
    if isinstance(value, (int, float)) or str(value).strip().isdigit():
        m = int(value)
        return np.exp(2j * np.pi * np.arange(m) / m)
    return np.array([parse_complex(s) for s in str(value).split(",")])


def _run_ww(cfg: ExperimentConfig) -> Result:
    p = cfg.parameters
    _need(p, "system", "fn", "n")
    sys_ = parse_system(p["system"])
    f = _load_function(p["fn"], sys_)
    rows = wiener_wintner_sweep(
        sys_, f, int(p.get("omega", 0)), _lambda_grid(p.get("lambda_grid", 64)), _int_list(p["n"])
    )
    columns = ["lambda_re", "lambda_im", "n", "avg_re", "avg_im", "delta_re", "delta_im"]
    table = [
        [r.lam.real, r.lam.imag, r.n, r.average.real, r.average.imag, r.report.delta_real, r.report.delta_imag]
        for r in rows
    ]
    return Result(columns=columns, rows=table, comments=["per-point finite-horizon sweep; one shared base point"])


def _run_return_times(cfg: ExperimentConfig) -> Result:
    p = cfg.parameters
    _need(p, "system_omega", "fn", "system_x", "gfn", "n")
    s1, s2 = parse_system(p["system_omega"]), parse_system(p["system_x"])
    f, g = _load_function(p["fn"], s1), _load_function(p["gfn"], s2)
    series = return_times_avg(s1, f, s2, g, int(p.get("omega", 0)), int(p.get("x", 0)), _int_list(p["n"]))
    rows = [[n, v.real, v.imag] for n, v in zip(series.ns, series.values)]
    return Result(columns=["n", "avg_re", "avg_im"], rows=rows, comments=[series.note])


def paper_example_table(K: int = 30, grid_max: float = 1e6, points_per_decade: int = 50):
    """Rearrangement table and truncated ``int |f|^p`` masses of the series example."""
    decades = int(round(math.log10(grid_max)))
    grid = np.geomspace(1.0, 10.0**decades, decades * points_per_decade + 1)
    f = sample_paper_example(K, grid)
    sf = rearrange(f)
    a = np.abs(f.atom_values)
    w = f.space.atom_weights
    masses = {}
    for p in (1, 2, 3):
        masses[p] = [
            float(np.sum((w * a**p)[grid <= 10.0**j * (1 + 1e-12)])) for j in range(decades + 1)
        ]
    return f, sf, masses


def _run_paper_example(cfg: ExperimentConfig) -> Result:
    p = cfg.parameters
    f, sf, masses = paper_example_table(
        int(p.get("K", 30)), float(p.get("grid_max", 1e6)), int(p.get("points_per_decade", 50))
    )
    rows = [[t, v] for t, v in zip(sf.breakpoints, sf.values)]
    increasing = all(np.all(np.diff(m) > 0) for m in masses.values())
    ok = sf.is_nonincreasing and increasing
    comments = [
        f"truncated mass p={q}: " + " ".join(_fmt(x) for x in m) for q, m in masses.items()
    ]
    doc = {
        "rearrangement": {"t": [float(x) for x in sf.breakpoints], "v": [float(x) for x in sf.values]},
        "truncated_masses": {str(q): m for q, m in masses.items()},
        "nonincreasing": sf.is_nonincreasing,
        "masses_increasing": bool(increasing),
    }
    return Result(ok=ok, columns=["t", "f_star"], rows=rows, comments=comments, doc=doc)


def _run_rearrange(cfg: ExperimentConfig) -> Result:
    _need(cfg.parameters, "fn")
    sf = rearrange(_load_function(cfg.parameters["fn"]))
    rows = [[t, v] for t, v in zip(sf.breakpoints, sf.values)]
    return Result(
        ok=sf.is_nonincreasing,
        columns=["t", "f_star"],
        rows=rows,
        comments=[f"tail value: {_fmt(sf.tail_value)}"],
    )


RUNNERS = {
    "norms": _run_norms,
    "op-verify": _run_op_verify,
    "avg-run": _run_avg,
    "weak11-suite": _run_weak11,
    "ww-sweep": _run_ww,
    "return-times": _run_return_times,
    "paper-example": _run_paper_example,
    "rearrange": _run_rearrange,
}


# -- output --------------------------------------------------------------------

def _render(cfg: ExperimentConfig, res: Result) -> str:
    echo = json.dumps(cfg.to_dict(), sort_keys=True)
    if cfg.output["format"] == "csv" and res.columns is not None:
        buf = io.StringIO()
        buf.write(f"# schema: {SCHEMA_VERSION}\n# config: {echo}\n")
        for c in res.comments:
            buf.write(f"# {c}\n")
        buf.write(",".join(res.columns) + "\n")
        for row in res.rows:
            buf.write(",".join(_fmt(x) for x in row) + "\n")
        return buf.getvalue()
    doc = {"schema": SCHEMA_VERSION, "config": cfg.to_dict(), "ok": res.ok}
    if res.doc is not None:
        doc.update(res.doc)
    elif res.columns is not None:
        doc["columns"] = res.columns
        doc["rows"] = [[_num(float(x)) if not isinstance(x, (int, np.integer)) else int(x) for x in r] for r in res.rows]
    if res.comments:
        doc["notes"] = res.comments
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _write_atomic(path: str, text: str):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="\n", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run(config: ExperimentConfig, stdout=None) -> int:
    """Execute one experiment and write its outputs; returns the exit status."""
    stdout = stdout or sys.stdout
    try:
        res = RUNNERS[config.kind](config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = _render(config, res)
    path = config.output.get("path")
    try:
        if path:
            _write_atomic(path, text)
        else:
            stdout.write(text)
        if "egorov" in res.extra:
            cert = json.dumps(
                {"schema": SCHEMA_VERSION, "config": config.to_dict(), "certificate": res.extra["egorov"]},
                sort_keys=True,
                indent=2,
            ) + "\n"
            if path:
                _write_atomic(os.path.splitext(path)[0] + ".egorov.json", cert)
            else:
                stdout.write("\n" + cert)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 3
    return 0 if res.ok else 1


# -- argument parsing ----------------------------------------------------------

def _common(p: argparse.ArgumentParser):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ergodic-workbench", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="JSON experiment config; replaces subcommand flags")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("run", help="run a JSON experiment config")
    p.add_argument("config_path")

    p = sub.add_parser("norms", help="symmetric norms of a function")
    p.add_argument("--fn", required=True)
    p.add_argument("--spec", nargs="+", required=True, dest="specs")
    p.add_argument("--tol", type=float, default=1e-12)
    _common(p)

    p = sub.add_parser("op", help="operator tools")
    opsub = p.add_subparsers(dest="op_command", required=True)
    q = opsub.add_parser("verify", help="check the Dunford-Schwartz conditions")
    q.add_argument("--op", required=True)
    q.add_argument("--space", default=None, help="JSON with 'weights' and 'tail' (default: unit weights)")
    _common(q)

    p = sub.add_parser("avg", help="ergodic averages")
    avsub = p.add_subparsers(dest="avg_command", required=True)
    q = avsub.add_parser("run", help="CSV trace of (weighted) averages")
    q.add_argument("--op", required=True)
    q.add_argument("--fn", required=True)
    q.add_argument("--weights", default=None)
    q.add_argument("--n", required=True)
    q.add_argument("--egorov", nargs=2, type=float, metavar=("EPS", "TOL"), default=None)
    _common(q)

    p = sub.add_parser("weak11-suite", help="random weak (1,1) suite")
    p.add_argument("--instances", type=int, default=500)
    p.add_argument("--horizon", type=int, default=200)
    p.add_argument("--max-atoms", type=int, default=64)
    _common(p)

    p = sub.add_parser("ww", help="Wiener-Wintner experiments")
    wwsub = p.add_subparsers(dest="ww_command", required=True)
    q = wwsub.add_parser("sweep", help="sweep lambda over the unit circle")
    q.add_argument("--system", required=True)
    q.add_argument("--fn", required=True, help="function JSON or indicator:<point>")
    q.add_argument("--omega", type=int, default=0)
    q.add_argument("--lambda-grid", default="64")
    q.add_argument("--n", required=True)
    _common(q)

    p = sub.add_parser("return-times", help="return-times averages at one (omega, x)")
    p.add_argument("--system-omega", required=True)
    p.add_argument("--fn", required=True)
    p.add_argument("--system-x", required=True)
    p.add_argument("--gfn", required=True)
    p.add_argument("--omega", type=int, default=0)
    p.add_argument("--x", type=int, default=0)
    p.add_argument("--n", required=True)
    _common(p)

    p = sub.add_parser("paper-example", help="rearrangement of the series example")
    p.add_argument("--K", type=int, default=30)
    p.add_argument("--grid-max", type=float, default=1e6)
    p.add_argument("--points-per-decade", type=int, default=50)
    _common(p)

    p = sub.add_parser("rearrange", help="(t, f*(t)) at the kinks")
    p.add_argument("--fn", required=True)
    _common(p)
    return parser


_KIND_OF = {
    ("norms", None): "norms",
    ("op", "verify"): "op-verify",
    ("avg", "run"): "avg-run",
    ("weak11-suite", None): "weak11-suite",
    ("ww", "sweep"): "ww-sweep",
    ("return-times", None): "return-times",
    ("paper-example", None): "paper-example",
    ("rearrange", None): "rearrange",
}
_NOT_PARAMS = {"command", "op_command", "avg_command", "ww_command", "seed", "out", "format", "config"}


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    path = args.config or getattr(args, "config_path", None)
    if path:
        try:
            return ExperimentConfig.from_dict(_load_json(path))
        except (json.JSONDecodeError, TypeError) as exc:
            raise ConfigError(f"cannot parse config: {exc}") from None
    sub = getattr(args, "op_command", None) or getattr(args, "avg_command", None) or getattr(args, "ww_command", None)
    kind = _KIND_OF.get((args.command, sub))
    if kind is None:
        raise ConfigError("no subcommand given")
    params = {k: v for k, v in vars(args).items() if k not in _NOT_PARAMS and v is not None}
    return ExperimentConfig(kind, params, args.seed, {"path": args.out, "format": args.format})


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 3
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
