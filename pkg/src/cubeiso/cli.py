"""Command-line front end.

Every subcommand prints one report (JSON by default, CSV with ``--format csv``).
JSON reports have the fields ``schema_version``, ``command``, ``config`` and
``result``. Exit status: 0 ok, 1 a checked property failed, 2 bad arguments,
3 the computation was refused for exceeding its budget.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional

import numpy as np

from . import __version__
from .errors import ResourceRefusal, SideConditionError

SCHEMA_VERSION = 1
CACHE_ENV = "CUBEISO_CACHE_DIR"
CACHE_FILE = "search_cache.jsonl"
DEFAULT_SEED = 0

EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE, EXIT_REFUSED = 0, 1, 2, 3


class UsageError(ValueError):
    pass


def parse_dyadic(text: str, n: int) -> int:
    """Cardinality ``m`` for a measure given as ``m/2^n``, e.g. ``"1/4"`` or ``"0.25"``."""
    try:
        t = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"cannot parse measure {text!r}") from None
    m = t * (1 << n)
    if m.denominator != 1 or not 0 <= m <= 1 << n:
        raise UsageError(f"measure {text} is not dyadic at n={n}: it must equal m/2^{n} with 0 <= m <= 2^{n}")
    return int(m)


# -- output -------------------------------------------------------------------


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    return obj


def _flatten(prefix: str, obj: Any, out: dict) -> None:
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, out)
    elif isinstance(obj, list) and obj and all(isinstance(v, (dict, list)) for v in obj):
        for i, v in enumerate(obj):
            _flatten(f"{prefix}[{i}]", v, out)
    else:
        out[prefix] = json.dumps(obj) if isinstance(obj, list) else obj


def to_csv(result: Any) -> str:
    """Lists of flat dicts become tables; anything else becomes ``key,value`` rows."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if isinstance(result, list) and result and all(isinstance(r, dict) for r in result):
        rows = []
        for r in result:
            flat: dict = {}
            _flatten("", r, flat)
            rows.append(flat)
        header = list(dict.fromkeys(k for r in rows for k in r))
        writer.writerow(header)
        for r in rows:
            writer.writerow([r.get(k, "") for k in header])
    else:
        flat = {}
        _flatten("", result, flat)
        writer.writerow(["key", "value"])
        for k, v in flat.items():
            writer.writerow([k, v])
    return buf.getvalue()


def emit(args, result: Any, stream) -> None:
    result = _jsonable(result)
    if args.format is None:
        args.format = args.default_format
    if args.format == "csv":
        text = to_csv(result)
    else:
        config = {k: _jsonable(v) for k, v in sorted(vars(args).items()) if k not in ("func", "output", "default_format")}
        report = {"schema_version": SCHEMA_VERSION, "command": args.command, "config": config, "result": result}
        text = json.dumps(report, indent=2) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        stream.write(text)


# -- subcommands --------------------------------------------------------------


def _cache(args):
    from .extremal_search import SearchCache

    if args.no_cache:
        return None
    directory = args.cache_dir or os.environ.get(CACHE_ENV)
    return SearchCache(Path(directory) / CACHE_FILE) if directory else None


def cmd_harper(args):
    from .harper import harper_table

    rows = [{"n": r.n, "m": r.m, "t": str(r.t), "numerator": r.numerator, "value": str(r.exact)} for r in harper_table(args.n)]
    return rows, True


def cmd_minimize(args):
    from .extremal_search import min_moment
    from .harper import harper_min

    if (args.m is None) == (args.t is None):
        raise UsageError("give exactly one of --m and --t")
    m = args.m if args.m is not None else parse_dyadic(args.t, args.n)
    res = min_moment(
        args.n,
        m,
        args.beta,
        args.side,
        args.method,
        witness_cap=args.witness_cap,
        override_budget=args.override_budget,
        workers=args.workers,
        cache=_cache(args),
    )
    out = res.to_dict()
    ok = True
    if args.beta == 1 and args.side == "h":
        expected = harper_min(args.n, m).numerator
        out["harper_numerator"] = expected
        ok = res.min_value * (1 << args.n) == expected
    return out, ok


def _candidate(args):
    from . import certificates as cert

    family = args.candidate
    if family == "log-quadratic":
        return cert.log_quadratic_bound(cert.BETA0 if args.param is None else args.param)
    if family == "logarithmic":
        return cert.Logarithmic(args.beta if args.param is None else args.param, symmetric=args.symmetric)
    if family == "quadratic":
        return cert.Quadratic(cert.quadratic_constant(args.beta) if args.param is None else args.param)
    if family == "cubic":
        return cert.Cubic(0.5 if args.param is None else args.param)
    raise UsageError(f"unknown candidate {family!r}")


def cmd_certify(args):
    from . import certificates as cert

    if args.region == "custom":
        region = cert.Region("custom", term=args.term, x_span=args.x_span, y_lo=args.y_lo, y_hi=args.y_hi)
    else:
        region = args.region
    beta = cert.BETA0 if args.beta is None else args.beta
    args.beta = beta
    report = cert.certify_grid(_candidate(args), beta, args.resolution, region, workers=args.workers)
    ok = report.passed if args.expect == "pass" else report.violation
    return report.to_dict(), ok


def _function(args) -> np.ndarray:
    from . import boolean_fourier as bf
    from .cube_core import CubeSet

    if args.function.startswith("n="):
        return bf.sign_function(CubeSet.from_hex(args.function))
    return bf.corpus(args.function)


def cmd_fourier(args):
    from . import boolean_fourier as bf

    f = _function(args)
    stats = bf.spectral_stats(f)
    out = {
        "n": stats.n,
        "spectral": stats.to_dict(),
        "tail_at_d": stats.tail(args.d) if args.d is not None else None,
        "noise": bf.noise_stability_suite(f, args.p, 2.0, args.time),
    }
    if np.all(np.abs(f) == 1):
        out["fbound"] = bf.fbound_ratio(f, args.p).to_dict()
    return out, bool(out["noise"]["hypercontractive_ok"])


def cmd_talagrand(args):
    from . import boolean_fourier as bf

    f = _function(args)
    n = bf.dimension_of(f)
    if args.mc or n > bf.EXACT_TALAGRAND_MAX_N:
        value, se = bf.talagrand_Df_norm_mc(f, args.p, args.samples, args.seed)
        return {"n": n, "p": args.p, "mode": "monte_carlo", "value": value, "stderr": se, "samples": args.samples, "seed": args.seed}, True
    return {"n": n, "p": args.p, "mode": "exact", "value": bf.talagrand_Df_norm(f, args.p)}, True


def cmd_partition(args):
    from .appendix_partitions import ball_partition, separation_lower_bound_check
    from .extremal_search import min_partition_functional

    out: dict = {"n": args.n, "beta": args.beta, "K": args.K}
    ok = True
    if args.n <= 4:
        value, part = min_partition_functional(args.n, args.beta, args.K)
        out["minimum"] = value
        out["witness_labels"] = part.labels
        out["margin"] = value - 2 ** (args.n - 1)
        ok = out["margin"] >= -1e-12
    if args.n % 2:
        out["ball_partition"] = separation_lower_bound_check(ball_partition(args.n), args.beta, args.K).to_dict()
    if len(out) == 3:
        raise ResourceRefusal("partition minimum supports n <= 4; ball partitions need odd n")
    return out, ok


def cmd_appendix(args):
    from . import appendix_partitions as ap

    if args.table == "decay":
        rows = ap.decay_table(args.beta, range(2, args.max_n + 1, 2))
        return [r.to_dict() for r in rows], True
    return ap.ratio_table(args.beta, args.K, range(1, args.max_n + 1, 2)), True


def cmd_constants(args):
    from .certificates import reference_constants

    table = reference_constants()
    ok = all(v["match"] for v in table["printed"].values()) and all(table["comparisons"].values())
    return table, ok


def cmd_all_checks(args):
    from .acceptance import run_all

    results = run_all(echo=lambda line: print(line, file=sys.stderr))
    summary = [{"number": r.number, "name": r.name, "passed": r.passed} for r in results]
    if args.details:
        return [r.to_dict() for r in results], all(r.passed for r in results)
    return summary, all(r.passed for r in results)


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cubeiso", description="Boundary moments of subsets of the discrete cube.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), help="report format (json, or csv for appendix)")
    common.add_argument("--output", help="write the report here instead of stdout")
    parser.set_defaults(default_format="json")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("harper", parents=[common], help="exact minimum edge boundary for every cardinality")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_harper)

    p = sub.add_parser("minimize", parents=[common], help="minimum boundary moment at fixed cardinality")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int)
    p.add_argument("--t", help="dyadic measure m/2^n, e.g. 1/4")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--side", choices=("h", "h_complement", "w"), default="h")
    p.add_argument("--method", choices=("exhaustive", "symmetry_reduced"), default="exhaustive")
    p.add_argument("--witness-cap", type=int, default=16)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--override-budget", action="store_true")
    p.add_argument("--cache-dir", help=f"cache directory (default: ${CACHE_ENV})")
    p.add_argument("--no-cache", action="store_true")
    p.set_defaults(func=cmd_minimize)

    p = sub.add_parser("certify", parents=[common], help="grid check of the two-point condition")
    p.add_argument("--candidate", choices=("log-quadratic", "logarithmic", "quadratic", "cubic"), default="log-quadratic")
    p.add_argument("--param", type=float, help="beta, C or alpha of the candidate (family default otherwise)")
    p.add_argument("--symmetric", action="store_true", help="logarithmic candidate in min(t, 1-t)")
    p.add_argument("--beta", type=float, help="exponent (default log2(3/2))")
    p.add_argument("--resolution", type=int, default=1024)
    p.add_argument(
        "--region",
        choices=("full_triangle", "lower_half", "lower_half_swapped", "linear_gap", "power_gap", "custom"),
        default="full_triangle",
    )
    p.add_argument("--term", choices=("max", "power", "linear", "power_swapped"), default="max")
    p.add_argument("--x-span", choices=("triangle", "below_gap", "above_gap"), default="triangle")
    p.add_argument("--y-lo", type=float, default=0.0)
    p.add_argument("--y-hi", type=float, default=1.0)
    p.add_argument("--expect", choices=("pass", "violation"), default="pass")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("fourier", parents=[common], help="spectral statistics of a corpus function or set")
    p.add_argument("--function", required=True, help="corpus name (maj3, tribes4, ...) or a set as n=<n>:<hex>")
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--time", type=float, default=0.5, help="heat semigroup time")
    p.add_argument("--d", type=int)
    p.set_defaults(func=cmd_fourier)

    p = sub.add_parser("talagrand", parents=[common], help="the mixed norm E|sum x'_j D_j f(x)|^p")
    p.add_argument("--function", required=True)
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--mc", action="store_true", help="Monte Carlo even when the exact sum is feasible")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(func=cmd_talagrand)

    p = sub.add_parser("partition", parents=[common], help="separation functional of three-block partitions")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--beta", type=float, default=0.53)
    p.add_argument("--K", type=float, default=1.0)
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("appendix", parents=[common], help="Hamming-ball decay and wall-ratio tables")
    p.add_argument("--table", choices=("decay", "ratio"), default="decay")
    p.add_argument("--beta", type=float, default=0.4)
    p.add_argument("--K", type=float, default=1.0)
    p.add_argument("--max-n", type=int, default=24)
    p.set_defaults(func=cmd_appendix, default_format="csv")

    p = sub.add_parser("constants", parents=[common], help="numerical constants and their printed prefixes")
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("all-checks", parents=[common], help="run the full acceptance suite")
    p.add_argument("--details", action="store_true")
    p.set_defaults(func=cmd_all_checks)
    return parser


def main(argv: Optional[list[str]] = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result, ok = args.func(args)
    except (UsageError, SideConditionError, ValueError) as exc:
        print(f"cubeiso {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceRefusal as exc:
        print(f"cubeiso {args.command}: refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    emit(args, result, stdout)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
