"""Command-line harness: ``superpose <command> [flags]``.

Parameters may also come from a JSON file passed with ``--config``; flags
given on the command line override it. JSON results go to stdout (or
``--out``); CSV commands write metadata as one JSON line on stderr.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .binary_threshold import monotone_transform_separation, separation_margins
from .constructions import (
    gaussian_unit_matrix,
    rademacher_matrix,
    shifted_pair,
    shifted_pair_dimension,
)
from .core import gram
from .errors import ConstructionError, MatrixParseError, ParameterError, SuperposeError
from .geometry import verify_construction_geometry, verify_norm_bounded_geometry
from .interference import (
    build_graph,
    greedy_independent_set,
    independence_number,
    max_row_interferers,
    turan_edge_floor,
)
from .io import dumps_json, dumps_text, load_matrix
from .nonlinear_baseline import gap_experiment
from .recovery import min_dimension_scan, worst_case_error

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2
EXIT_PARSE = 3

COMMANDS = ("gen", "check", "scan", "interfere", "geometry", "threshold", "gap")
SIGMAS = {
    "identity": lambda x: np.asarray(x, dtype=np.float64),
    "tanh": np.tanh,
    "relu": lambda x: np.maximum(np.asarray(x, dtype=np.float64), 0.0),
}

EPILOG = """exit codes:
  0  success
  1  runtime error (I/O failure, construction failure)
  2  usage error (bad or missing flags, parameter or dimension error)
  3  parse error (malformed matrix, offset or config file)
"""


class UsageError(Exception):
    pass


@dataclass
class ExperimentConfig:
    command: str
    parameters: dict = field(default_factory=dict)
    seed: int = 0
    output_path: str | None = None
    format: str = "json"
    deterministic: bool = False


# name -> (type, default, help); a default of REQUIRED must be supplied
REQUIRED = object()
_OPTS = {
    "gen": {
        "kind": (str, REQUIRED, "rademacher | gaussian | shifted"),
        "d": (int, None, "embedding dimension (shifted: defaults to the certified minimum)"),
        "m": (int, REQUIRED, "number of features"),
        "delta": (float, None, "shifted: target self-cosine"),
        "eps": (float, None, "shifted: recovery tolerance"),
        "k": (int, None, "shifted: sparsity"),
    },
    "check": {
        "a": (str, REQUIRED, "representation matrix A"),
        "b": (str, REQUIRED, "probe matrix B"),
        "k": (int, REQUIRED, "sparsity"),
        "eps": (float, REQUIRED, "recovery tolerance"),
    },
    "scan": {
        "m": (int, REQUIRED, "number of features"),
        "k": (int, REQUIRED, "sparsity"),
        "eps": (float, REQUIRED, "recovery tolerance"),
        "trials": (int, 20, "random constructions per dimension"),
        "threshold": (float, 0.5, "success fraction required"),
        "dmin": (int, 1, "smallest dimension scanned"),
        "dmax": (int, REQUIRED, "largest dimension scanned"),
    },
    "interfere": {
        "a": (str, REQUIRED, "representation matrix A"),
        "b": (str, REQUIRED, "probe matrix B"),
        "tau": (float, REQUIRED, "edge threshold (strict)"),
        "r": (float, None, "independent-set size for the Turan edge floor"),
        "exact_alpha": (bool, False, "compute the exact independence number (m <= 24)"),
    },
    "geometry": {
        "a": (str, REQUIRED, "representation matrix A"),
        "b": (str, REQUIRED, "probe matrix B"),
        "delta": (float, None, "construction mode: target self-cosine"),
        "tol": (float, 0.0, "construction mode: slack"),
        "eps": (float, None, "norm-bounded mode: recovery tolerance"),
        "gamma": (float, 1.0, "norm-bounded mode: column norm bound"),
    },
    "threshold": {
        "a": (str, REQUIRED, "representation matrix A"),
        "b": (str, REQUIRED, "probe matrix B"),
        "k": (int, REQUIRED, "sparsity"),
        "sigma": (str, None, "activation: tanh | relu | identity"),
        "offset": (str, None, "file with m offsets (whitespace or JSON list)"),
    },
    "gap": {
        "m": (int, REQUIRED, "number of features"),
        "k": (int, REQUIRED, "sparsity"),
        "eps": (float, REQUIRED, "recovery tolerance"),
        "trials": (int, 20, "trials per dimension"),
        "d": (str, None, "comma-separated dimension ladder (default: powers of two up to m)"),
    },
}
_FORMATS = {
    "gen": ("text", "json"),
    "scan": ("csv", "json"),
    "gap": ("csv", "json"),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="superpose",
        description="Linear compressed sensing experiments.",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    for name, opts in _OPTS.items():
        p = sub.add_parser(name, epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
        for opt, (typ, default, help_) in opts.items():
            flag = "--" + opt.replace("_", "-")
            if typ is bool:
                p.add_argument(flag, dest=opt, action="store_true", default=argparse.SUPPRESS, help=help_)
            else:
                p.add_argument(flag, dest=opt, type=typ, default=argparse.SUPPRESS, help=help_)
        p.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="64-bit seed (default 0)")
        p.add_argument("--out", dest="out", default=argparse.SUPPRESS, help="output path (default stdout)")
        p.add_argument("--format", dest="format", default=argparse.SUPPRESS, help="output format")
        p.add_argument("--config", default=None, help="JSON file of parameters; flags override it")
        p.add_argument("--deterministic", action="store_true", help="omit the timestamp from metadata")
    return parser


def _load_config_file(path: str) -> dict:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise MatrixParseError(f"config {path}: {exc.msg}", exc.lineno) from None
    if not isinstance(obj, dict):
        raise MatrixParseError(f"config {path} must hold a JSON object")
    return obj


def parse_config(argv: list[str]) -> ExperimentConfig:
    """Turn command-line arguments into a validated :class:`ExperimentConfig`."""
    parser = build_parser()
    ns = vars(parser.parse_args(argv))
    command = ns.pop("command")
    if command is None:
        raise UsageError(parser.format_usage() + "superpose: error: a command is required")
    config_path = ns.pop("config")
    deterministic = ns.pop("deterministic")
    merged = {}
    if config_path:
        merged.update({k.replace("-", "_"): v for k, v in _load_config_file(config_path).items()})
        merged.pop("command", None)
    merged.update(ns)

    opts = _OPTS[command]
    known = set(opts) | {"seed", "out", "format"}
    unknown = sorted(set(merged) - known)
    if unknown:
        raise UsageError(f"unknown parameter(s) for {command}: {', '.join(unknown)}")
    params = {}
    for opt, (typ, default, _) in opts.items():
        if opt in merged:
            value = merged[opt]
            try:
                params[opt] = typ(value) if value is not None else None
            except (TypeError, ValueError):
                raise UsageError(f"--{opt.replace('_', '-')}: cannot interpret {value!r}") from None
        elif default is REQUIRED:
            raise UsageError(
                f"superpose {command}: error: missing required --{opt.replace('_', '-')} "
                f"(see 'superpose {command} --help')"
            )
        else:
            params[opt] = default
    formats = _FORMATS.get(command, ("json",))
    fmt = merged.get("format", formats[0])
    if fmt not in formats:
        raise UsageError(f"{command} supports --format {' | '.join(formats)}, got {fmt!r}")
    try:
        seed = int(merged.get("seed", 0))
    except (TypeError, ValueError):
        raise UsageError(f"--seed: cannot interpret {merged.get('seed')!r}") from None
    return ExperimentConfig(
        command=command,
        parameters=params,
        seed=seed,
        output_path=merged.get("out"),
        format=fmt,
        deterministic=deterministic,
    )


def _meta(config: ExperimentConfig, **extra) -> dict:
    meta = {"tool": "superpose", "version": __version__, "command": config.command, "seed": config.seed}
    meta.update(extra)
    if not config.deterministic:
        meta["timestamp"] = _dt.datetime.now(_dt.timezone.utc).isoformat()
    return meta


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _load_vector(path: str) -> np.ndarray:
    text = Path(path).read_text()
    try:
        if text.lstrip().startswith("["):
            values = json.loads(text)
        else:
            values = [float(t) for t in text.split()]
        vec = np.asarray(values, dtype=np.float64)
    except (ValueError, TypeError, json.JSONDecodeError) as exc:
        raise MatrixParseError(f"offset file {path}: {exc}") from None
    if vec.ndim != 1 or not np.all(np.isfinite(vec)):
        raise MatrixParseError(f"offset file {path} must hold a flat list of finite numbers")
    return vec


def _cmd_gen(config: ExperimentConfig, p: dict) -> tuple[str, str | None]:
    if not config.output_path:
        raise UsageError("gen requires --out")
    kind, m, seed = p["kind"], p["m"], config.seed
    dumps = dumps_json if config.format == "json" else dumps_text
    out = Path(config.output_path)
    if kind in ("rademacher", "gaussian"):
        if p["d"] is None:
            raise UsageError(f"gen --kind {kind} requires --d")
        build = rademacher_matrix if kind == "rademacher" else gaussian_unit_matrix
        files = {str(out): build(p["d"], m, seed)}
    elif kind == "shifted":
        if p["delta"] is None or p["eps"] is None or p["k"] is None:
            raise UsageError("gen --kind shifted requires --delta, --eps and --k")
        d = p["d"] if p["d"] is not None else shifted_pair_dimension(m, p["delta"], p["eps"], p["k"])
        A, B = shifted_pair(d, m, p["delta"], p["eps"], p["k"], seed)
        files = {f"{out}.A": A, f"{out}.B": B}
    else:
        raise UsageError(f"--kind must be rademacher, gaussian or shifted, got {kind!r}")
    for path, M in files.items():
        Path(path).write_text(dumps(M))
    first = next(iter(files.values()))
    summary = {
        "written": list(files),
        "rows": first.shape[0],
        "cols": first.shape[1],
        "meta": _meta(config, kind=kind),
    }
    return _json(summary), None


def _cmd_check(config, p):
    A, B = load_matrix(p["a"]), load_matrix(p["b"])
    report = worst_case_error(A, B, p["k"])
    out = report.to_dict()
    out["epsilon"] = p["eps"]
    out["recovered"] = report.max_error < p["eps"]
    out["meta"] = _meta(config)
    return _json(out), None


def _cmd_scan(config, p):
    result = min_dimension_scan(
        p["m"], p["k"], p["eps"], p["trials"], p["threshold"], p["dmin"], p["dmax"], config.seed
    )
    meta = _meta(config, **result.metadata())
    if config.format == "json":
        body = dict(result.metadata())
        body["per_d_success"] = {str(d): c for d, c in result.per_d_success.items()}
        body["meta"] = meta
        return _json(body), None
    return result.to_csv(), json.dumps(meta)


def _cmd_interfere(config, p):
    A, B = load_matrix(p["a"]), load_matrix(p["b"])
    C = gram(B, A)
    G = build_graph(C, p["tau"])
    row, count = max_row_interferers(C, p["tau"])
    out = {
        "m": G.m,
        "tau": G.tau,
        "edge_count": G.edge_count,
        "edges": [list(e) for e in G.sorted_edges()],
        "max_row": {"feature": row, "count": count},
        "greedy_independent_set": sorted(greedy_independent_set(G)),
        "r": p["r"],
        "turan_floor": turan_edge_floor(G.m, p["r"]) if p["r"] is not None else None,
    }
    if p["exact_alpha"]:
        out["independence_number"] = independence_number(G)
    out["meta"] = _meta(config)
    return _json(out), None


def _cmd_geometry(config, p):
    A, B = load_matrix(p["a"]), load_matrix(p["b"])
    if (p["delta"] is None) == (p["eps"] is None):
        raise UsageError("geometry needs exactly one of --delta (with --tol) or --eps (with --gamma)")
    if p["delta"] is not None:
        report = verify_construction_geometry(A, B, p["delta"], p["tol"])
    else:
        report = verify_norm_bounded_geometry(A, B, p["eps"], p["gamma"])
    out = report.to_dict()
    out["meta"] = _meta(config)
    return _json(out), None


def _cmd_threshold(config, p):
    A, B = load_matrix(p["a"]), load_matrix(p["b"])
    report = separation_margins(A, B, p["k"])
    out = report.to_dict()
    if p["sigma"] is not None or p["offset"] is not None:
        name = p["sigma"] or "identity"
        if name not in SIGMAS:
            raise UsageError(f"--sigma must be one of {', '.join(SIGMAS)}, got {name!r}")
        offset = _load_vector(p["offset"]) if p["offset"] else None
        if offset is not None and offset.shape[0] != A.shape[1]:
            raise ParameterError(f"offset has {offset.shape[0]} entries, expected m={A.shape[1]}")
        out["sigma"] = name
        out["sigma_separation"] = monotone_transform_separation(A, B, p["k"], SIGMAS[name], offset)
    out["meta"] = _meta(config, k_at_least_sqrt_m=p["k"] >= math.sqrt(A.shape[1]))
    return _json(out), None


def _cmd_gap(config, p):
    ladder = None
    if p["d"]:
        try:
            ladder = [int(t) for t in p["d"].split(",") if t.strip()]
        except ValueError:
            raise UsageError(f"--d must be a comma-separated list of integers, got {p['d']!r}") from None
    report = gap_experiment(p["m"], p["k"], p["eps"], p["trials"], config.seed, ladder)
    meta = _meta(config, m=p["m"], k=p["k"], epsilon=p["eps"], trials=p["trials"])
    if config.format == "json":
        body = {
            "rows": [{"d": r.d, "omp_success": r.omp_success, "linear_success": r.linear_success} for r in report.rows],
            "trials": report.trials,
            "meta": meta,
        }
        return _json(body), None
    return report.to_csv(), json.dumps(meta)


_HANDLERS = {
    "gen": _cmd_gen,
    "check": _cmd_check,
    "scan": _cmd_scan,
    "interfere": _cmd_interfere,
    "geometry": _cmd_geometry,
    "threshold": _cmd_threshold,
    "gap": _cmd_gap,
}


def _fail(code: int, kind: str, exc: Exception, stderr) -> int:
    print(f"superpose: {kind}: {exc}", file=stderr)
    return code


def run(config: ExperimentConfig, stdout=None, stderr=None) -> int:
    """Execute one configured command; returns the process exit status."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        body, meta_line = _HANDLERS[config.command](config, config.parameters)
        if config.output_path and config.command != "gen":
            Path(config.output_path).write_text(body)
        else:
            stdout.write(body)
        if meta_line is not None:
            print(meta_line, file=stderr)
    except UsageError as exc:
        return _fail(EXIT_USAGE, "usage error", exc, stderr)
    except MatrixParseError as exc:
        return _fail(EXIT_PARSE, "parse error", exc, stderr)
    except ParameterError as exc:
        return _fail(EXIT_USAGE, type(exc).__name__, exc, stderr)
    except ConstructionError as exc:
        return _fail(EXIT_RUNTIME, "construction failed", exc, stderr)
    except OSError as exc:
        return _fail(EXIT_RUNTIME, "I/O error", exc, stderr)
    except SuperposeError as exc:
        return _fail(EXIT_RUNTIME, type(exc).__name__, exc, stderr)
    return EXIT_OK


def main(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stderr = stderr or sys.stderr
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        config = parse_config(argv)
    except SystemExit as exc:
        # --help / --version
        return int(exc.code or 0)
    except UsageError as exc:
        print(str(exc), file=stderr)
        return EXIT_USAGE
    except MatrixParseError as exc:
        return _fail(EXIT_PARSE, "parse error", exc, stderr)
    except OSError as exc:
        return _fail(EXIT_RUNTIME, "I/O error", exc, stderr)
    return run(config, stdout=stdout, stderr=stderr)


if __name__ == "__main__":
    sys.exit(main())
