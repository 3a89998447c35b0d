"""Command-line front end.

Subcommands cover the library surface: window construction, exponential
sums, exact counts, bound verification sweeps, and distribution stats.
Every run produces a ReportEnvelope whose config echo replays the run
byte for byte; floating output uses repr so reruns diff clean.

Exit codes: 0 success, 2 validation error, 3 guard or table limit,
4 engine disagreement.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time

import numpy as np

from . import __version__, analysis, cache, counting, expsums
from .analysis import BOUND_IDS
from .counting import ENGINES, FAMILIES, CountQuery
from .errors import (
    EngineMismatchError,
    FactcongError,
    GuardExceededError,
    ParameterError,
    TableTooLargeError,
)
from .field import PrimeContext, primes_between

__all__ = ["main", "build_parser", "config_to_argv"]

TOOL = "factcong"
CACHE_ENV = "FACTCONG_CACHE_DIR"
FORMATS = ("plain", "json", "csv", "tsv")

# Families whose convolution route works in the multiplicative domain.
_DLOG_FAMILIES = frozenset({"F", "I", "T", "Q", "R"})

# Fixed column order shared by verify and sweep tables.
VERIFY_COLUMNS = (
    "theorem",
    "p",
    "ell",
    "k",
    "r",
    "s",
    "lam",
    "K",
    "M",
    "L",
    "N",
    "S",
    "T",
    "lhs",
    "rhs",
    "ratio",
)


class CommandOutput:
    """What a handler hands back: table rows plus a plain rendering."""

    def __init__(self, results, plain, columns=None, default_format="plain"):
        self.results = results
        self.plain = plain
        self.columns = columns
        self.default_format = default_format


# ---------------------------------------------------------------------------
# argument parsing


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _nonnegative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be a nonnegative integer")
    return value


def parse_signs(text: str) -> tuple[int, ...]:
    """Sign pattern, written compactly ("+-+") or as a list ("1,-1,1")."""
    text = text.strip()
    if not text:
        raise ParameterError("empty sign pattern")
    if "," in text:
        try:
            signs = tuple(int(tok) for tok in text.split(","))
        except ValueError as exc:
            raise ParameterError(f"bad sign list {text!r}") from exc
    else:
        table = {"+": 1, "-": -1}
        try:
            signs = tuple(table[ch] for ch in text)
        except KeyError as exc:
            raise ParameterError(f"bad sign character in {text!r}") from exc
    if any(s not in (-1, 1) for s in signs):
        raise ParameterError("signs must be +1 or -1")
    return signs


def parse_primes(text: str) -> list[int]:
    """Prime list from "A..B" (sieved range, endpoints need not be prime)
    or an explicit comma list."""
    text = text.strip()
    if ".." in text:
        lo_text, hi_text = text.split("..", 1)
        try:
            lo, hi = int(lo_text), int(hi_text)
        except ValueError as exc:
            raise ParameterError(f"bad prime range {text!r}") from exc
        primes = primes_between(lo, hi)
        if not primes:
            raise ParameterError(f"no primes in [{lo}, {hi}]")
        return primes
    try:
        primes = sorted({int(tok) for tok in text.split(",")})
    except ValueError as exc:
        raise ParameterError(f"bad prime list {text!r}") from exc
    return primes


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=FORMATS, default=None,
                        help="output format (default depends on the command)")
    parser.add_argument("--out", default=None, metavar="FILE",
                        help="write output to FILE instead of stdout")
    parser.add_argument("--cache-dir", default=None, metavar="DIR",
                        help=f"cache directory (default ${CACHE_ENV})")
    parser.add_argument("--threads", type=_positive, default=1)
    parser.add_argument("--seed", type=_nonnegative, default=0,
                        help="seed for sampled spot checks")


def _add_n_window(parser, with_defaults=True):
    parser.add_argument("--L", type=_nonnegative, default=0 if with_defaults else None,
                        help="offset of the main window (default 0)")
    parser.add_argument("--N", type=_positive, default=None,
                        help="length of the main window (default p-1-L)")


def _add_m_window(parser):
    parser.add_argument("--K", type=_nonnegative, default=0,
                        help="offset of the second window (default 0)")
    parser.add_argument("--M", type=_positive, default=None,
                        help="length of the second window (default p-1-K)")


def _add_t_window(parser):
    parser.add_argument("--S", type=_nonnegative, default=0,
                        help="offset of the third window (default 0)")
    parser.add_argument("--T", type=_positive, default=None,
                        help="length of the third window (default p-1-S)")


def _add_multiplicities(parser):
    parser.add_argument("--ell", type=_positive, default=None)
    parser.add_argument("--k", type=_positive, default=None)
    parser.add_argument("--r", type=_positive, default=None)
    parser.add_argument("--s", type=_nonnegative, default=None)
    parser.add_argument("--lambda", dest="lam", type=int, default=None,
                        help="target residue")
    parser.add_argument("--signs", type=parse_signs, default=None,
                        help='sign pattern, e.g. "+-" or "1,-1"')


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog=TOOL,
        description="Exponential sums and exact counts for factorial "
        "congruences modulo a prime.",
    )
    top.add_argument("--version", action="version", version=f"{TOOL} {__version__}")
    sub = top.add_subparsers(dest="command", required=True)

    fac = sub.add_parser("factorials", help="factorial window residues")
    fac.add_argument("--p", type=_positive, required=True)
    _add_n_window(fac)
    _add_common(fac)

    exp = sub.add_parser("expsum", help="exponential and character sums")
    expsub = exp.add_subparsers(dest="kind", required=True)

    single = expsub.add_parser("single", help="one additive sum over the window")
    single.add_argument("--p", type=_positive, required=True)
    single.add_argument("--a", type=int, required=True, help="frequency")
    _add_n_window(single)
    _add_common(single)

    batch = expsub.add_parser("batch", help="all frequencies at once")
    batch.add_argument("--p", type=_positive, required=True)
    _add_n_window(batch)
    _add_common(batch)

    double = expsub.add_parser("double", help="pair-product sum over two windows")
    double.add_argument("--p", type=_positive, required=True)
    double.add_argument("--a", type=int, required=True)
    _add_n_window(double)
    _add_m_window(double)
    _add_common(double)

    char = expsub.add_parser("char", help="multiplicative character sum")
    char.add_argument("--p", type=_positive, required=True)
    group = char.add_mutually_exclusive_group(required=True)
    group.add_argument("--j", type=_nonnegative, default=None,
                       help="character index in [0, p-1)")
    group.add_argument("--quadratic", action="store_true",
                       help="use the quadratic character, j=(p-1)/2")
    _add_n_window(char)
    _add_common(char)

    cnt = sub.add_parser("count", help="exact solution count for one family")
    cnt.add_argument("family", choices=FAMILIES)
    cnt.add_argument("--p", type=_positive, required=True)
    _add_n_window(cnt)
    _add_m_window(cnt)
    _add_t_window(cnt)
    _add_multiplicities(cnt)
    cnt.add_argument("--engine", choices=ENGINES, default="auto")
    cnt.add_argument("--profile", action="store_true",
                     help="emit the full count-by-residue table")
    _add_common(cnt)

    ver = sub.add_parser("verify", help="sweep one bound across primes")
    ver.add_argument("theorem", choices=BOUND_IDS, metavar="BOUND",
                     help=f"one of {', '.join(BOUND_IDS)}")
    ver.add_argument("--primes", required=True, type=parse_primes,
                     help='range "A..B" or comma list')
    _add_n_window(ver)
    _add_m_window(ver)
    _add_t_window(ver)
    _add_multiplicities(ver)
    ver.add_argument("--engine", choices=ENGINES, default="auto")
    _add_common(ver)

    swp = sub.add_parser("sweep", help="verify several bounds in one table")
    swp.add_argument("--bounds", required=True,
                     help=f"comma list from {', '.join(BOUND_IDS)}")
    swp.add_argument("--primes", required=True, type=parse_primes)
    _add_n_window(swp)
    _add_m_window(swp)
    _add_t_window(swp)
    _add_multiplicities(swp)
    swp.add_argument("--engine", choices=ENGINES, default="auto")
    _add_common(swp)

    st = sub.add_parser("stats", help="value distribution and discrepancy")
    st.add_argument("--p", type=_positive, required=True)
    _add_n_window(st)
    _add_m_window(st)
    st.add_argument("--H", type=_positive, default=None,
                    help="spectral cutoff; enables the discrepancy report")
    _add_common(st)

    return top


# ---------------------------------------------------------------------------
# config echo


def config_to_argv(config: dict) -> list[str]:
    """Rebuild an argv that replays this run (excluding --out/--cache-dir)."""
    argv = list(config["_argv_head"])
    for key, value in config.items():
        if key.startswith("_") or value is None:
            continue
        flag = "--" + key.replace("_", "-")
        if key == "lam":
            flag = "--lambda"
        if isinstance(value, bool):
            if value:
                argv.append(flag)
            continue
        if key == "signs":
            argv.extend([flag, ",".join(str(s) for s in value)])
            continue
        if key == "primes":
            argv.extend([flag, ",".join(str(p) for p in value)])
            continue
        argv.extend([flag, str(value)])
    return argv


def _echo_config(ns: argparse.Namespace) -> dict:
    head = [ns.command]
    for attr in ("kind", "family", "theorem"):
        if getattr(ns, attr, None):
            head.append(getattr(ns, attr))
    skip = {"command", "kind", "family", "theorem", "out", "cache_dir", "func"}
    config: dict = {"_argv_head": head}
    for key, value in sorted(vars(ns).items()):
        if key in skip or key.startswith("_"):
            continue
        config[key] = value
    return config


# ---------------------------------------------------------------------------
# shared helpers


def format_complex(z: complex) -> str:
    return f"{z.real:g}{z.imag:+g}i"


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _json_default(value):
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    return str(value)


def _resolve_cache_dir(ns) -> str | None:
    if ns.cache_dir is not None:
        return ns.cache_dir
    return os.environ.get(CACHE_ENV) or None


def _context(ns, warnings: list[str], with_dlog: bool) -> PrimeContext:
    ctx = PrimeContext.create(ns.p)
    if with_dlog:
        ctx, warning = cache.get_or_build_dlog(_resolve_cache_dir(ns), ctx)
        if warning:
            warnings.append(warning)
    return ctx


def _window(ns, ctx, warnings, L_attr="L", N_attr="N"):
    L = getattr(ns, L_attr) or 0
    N = getattr(ns, N_attr)
    if N is None:
        N = ctx.p - 1 - L
    window, warning = cache.get_or_build_window(
        _resolve_cache_dir(ns), ctx, L, N
    )
    if warning:
        warnings.append(warning)
    return window


# ---------------------------------------------------------------------------
# command handlers


def _cmd_factorials(ns, warnings) -> CommandOutput:
    ctx = _context(ns, warnings, with_dlog=False)
    window = _window(ns, ctx, warnings)
    rows = [
        {"n": window.L + i + 1, "value": int(v)}
        for i, v in enumerate(window.values)
    ]
    plain = " ".join(str(int(v)) for v in window.values)
    return CommandOutput(rows, plain, columns=("n", "value"))


def _cmd_expsum(ns, warnings) -> CommandOutput:
    needs_dlog = ns.kind in ("double", "char")
    ctx = _context(ns, warnings, with_dlog=needs_dlog)
    window = _window(ns, ctx, warnings)
    if ns.kind == "single":
        sv = expsums.single_sum(window, ns.a)
        rows = [{
            "a": sv.a,
            "re": sv.value.real,
            "im": sv.value.imag,
            "abs": abs(sv.value),
            "abs_error": sv.abs_error,
        }]
        return CommandOutput(rows, format_complex(sv.value),
                             columns=("a", "re", "im", "abs", "abs_error"))
    if ns.kind == "batch":
        spectrum = expsums.batch_single_sums(window)
        rows = [
            {"a": a, "re": re, "im": im, "abs": mag}
            for a, re, im, mag in spectrum.to_rows()
        ]
        plain = "\n".join(
            f"{row['a']} {format_complex(complex(row['re'], row['im']))}"
            for row in rows
        )
        return CommandOutput(rows, plain, columns=("a", "re", "im", "abs"),
                             default_format="csv")
    if ns.kind == "double":
        wm = _window(ns, ctx, warnings, "K", "M")
        sv = expsums.double_sum(wm, window, ns.a)
        rows = [{
            "a": sv.a,
            "re": sv.value.real,
            "im": sv.value.imag,
            "abs": abs(sv.value),
            "abs_error": sv.abs_error,
        }]
        return CommandOutput(rows, format_complex(sv.value),
                             columns=("a", "re", "im", "abs", "abs_error"))
    j = (ctx.p - 1) // 2 if ns.quadratic else ns.j
    sv = expsums.character_sum(window, j)
    rows = [{
        "j": j,
        "re": sv.value.real,
        "im": sv.value.imag,
        "abs": abs(sv.value),
        "abs_error": sv.abs_error,
    }]
    return CommandOutput(rows, format_complex(sv.value),
                         columns=("j", "re", "im", "abs", "abs_error"))


def _count_query(ns, ctx) -> CountQuery:
    return CountQuery(
        family=ns.family,
        ctx=ctx,
        ell=ns.ell if ns.ell is not None else 1,
        k=ns.k if ns.k is not None else 1,
        r=ns.r if ns.r is not None else 1,
        lam=ns.lam if ns.lam is not None else (1 if ns.family == "R" else 0),
        signs=ns.signs or (),
        L=ns.L,
        N=ns.N,
        K=ns.K,
        M=ns.M,
        S=ns.S,
        T=ns.T,
    )


def _cmd_count(ns, warnings) -> CommandOutput:
    ctx = _context(ns, warnings, with_dlog=ns.family in _DLOG_FAMILIES)
    query = _count_query(ns, ctx)
    if ns.profile:
        profile = counting.count_profile(query)
        rows = [
            {"lam": lam, "count": int(c)} for lam, c in enumerate(profile)
        ]
        plain = "\n".join(f"{r['lam']} {r['count']}" for r in rows)
        return CommandOutput(rows, plain, columns=("lam", "count"),
                             default_format="csv")
    result = counting.count(query, engine=ns.engine)
    dropped = result.details.get("dropped_zero_mass")
    if dropped:
        warnings.append(
            f"{int(dropped)} tuples with a zero bracket product cannot "
            f"reach a nonzero residue and were excluded structurally"
        )
    q = result.query
    rows = [{
        "family": q.family,
        "p": ctx.p,
        "ell": q.ell,
        "k": q.k,
        "r": q.r,
        "lam": q.lam,
        "K": q.K, "M": q.M, "L": q.L, "N": q.N, "S": q.S, "T": q.T,
        "count": int(result.count),
        "engine": result.engine,
        "seconds": result.seconds,
    }]
    return CommandOutput(rows, str(int(result.count)),
                         columns=tuple(rows[0].keys()))


def _sweep_params(ns) -> dict:
    return {
        key: getattr(ns, key)
        for key in ("ell", "k", "r", "s", "lam", "signs", "L", "N", "K", "M", "S", "T")
        if getattr(ns, key, None) is not None
    }


def _report_rows(reports) -> list[dict]:
    rows = []
    for rep in reports:
        row = {"theorem": rep.bound_id, "p": rep.p}
        for key in ("ell", "k", "r", "s", "lam", "K", "M", "L", "N", "S", "T"):
            value = rep.params.get(key)
            row[key] = None if value is None else int(value)
        row["lhs"] = rep.lhs
        row["rhs"] = rep.rhs
        row["ratio"] = rep.ratio
        rows.append(row)
    return rows


def _run_sweeps(ns, warnings, bound_ids) -> CommandOutput:
    cache_dir = _resolve_cache_dir(ns)

    def factory(p: int, with_dlog: bool) -> PrimeContext:
        ctx = PrimeContext.create(p)
        if with_dlog:
            ctx, warning = cache.get_or_build_dlog(cache_dir, ctx)
            if warning:
                warnings.append(warning)
        return ctx

    params = _sweep_params(ns)
    rows: list[dict] = []
    series: dict[str, list] = {}
    for bound_id in bound_ids:
        result = analysis.verify_sweep(
            bound_id,
            ns.primes,
            params,
            engine=ns.engine,
            threads=ns.threads,
            seed=ns.seed,
            context_factory=factory,
        )
        for p, reason in result.skipped:
            warnings.append(f"{bound_id} p={p} skipped: {reason}")
        rows.extend(_report_rows(result.reports))
        series[bound_id] = [[p, ratio] for p, ratio in result.series()]
    out = CommandOutput(rows, _table_text(VERIFY_COLUMNS, rows, " "),
                        columns=VERIFY_COLUMNS, default_format="csv")
    out.series = series
    return out


def _cmd_verify(ns, warnings) -> CommandOutput:
    return _run_sweeps(ns, warnings, [ns.theorem])


def _cmd_sweep(ns, warnings) -> CommandOutput:
    bound_ids = [tok.strip() for tok in ns.bounds.split(",") if tok.strip()]
    unknown = [b for b in bound_ids if b not in BOUND_IDS]
    if unknown:
        raise ParameterError(f"unknown bound ids {unknown}")
    if not bound_ids:
        raise ParameterError("--bounds needs at least one bound id")
    return _run_sweeps(ns, warnings, bound_ids)


def _cmd_stats(ns, warnings) -> CommandOutput:
    ctx = _context(ns, warnings, with_dlog=ns.H is not None)
    window = _window(ns, ctx, warnings)
    stats = analysis.distinct_stats(window)
    row = {
        "p": stats.p,
        "L": stats.L,
        "N": stats.N,
        "distinct_count": stats.distinct_count,
        "distinct_fraction": stats.distinct_fraction,
        "missed_fraction": stats.missed_fraction,
        "reference_distinct_fraction": stats.reference_distinct_fraction,
    }
    if ns.H is not None:
        wm = _window(ns, ctx, warnings, "K", "M")
        report = analysis.discrepancy_estimate(wm, window, H=ns.H)
        row.update({
            "M": report.M,
            "H": report.H,
            "discrepancy_estimate": report.estimate,
            "direct_discrepancy": report.direct,
        })
        if report.direct is None:
            warnings.append(
                "pair count exceeds the direct-discrepancy guard; "
                "only the spectral estimate is reported"
            )
    plain = "\n".join(f"{key} {_cell(value)}" for key, value in row.items())
    return CommandOutput([row], plain, columns=tuple(row.keys()))


_HANDLERS = {
    "factorials": _cmd_factorials,
    "expsum": _cmd_expsum,
    "count": _cmd_count,
    "verify": _cmd_verify,
    "sweep": _cmd_sweep,
    "stats": _cmd_stats,
}


# ---------------------------------------------------------------------------
# rendering


def _table_text(columns, rows, sep: str) -> str:
    lines = [sep.join(columns)]
    for row in rows:
        lines.append(sep.join(_cell(row.get(col)) for col in columns))
    return "\n".join(lines)


def _render_delimited(output: CommandOutput, delimiter: str) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
    columns = output.columns or sorted(
        {key for row in output.results for key in row}
    )
    writer.writerow(columns)
    for row in output.results:
        writer.writerow([_cell(row.get(col)) for col in columns])
    return buf.getvalue().rstrip("\n")


def render(envelope: dict, output: CommandOutput, fmt: str) -> str:
    if fmt == "plain":
        return output.plain
    if fmt == "json":
        return json.dumps(envelope, indent=2, default=_json_default)
    return _render_delimited(output, "," if fmt == "csv" else "\t")


def run(ns: argparse.Namespace) -> tuple[dict, CommandOutput]:
    """Dispatch one parsed command; returns (envelope, output)."""
    warnings: list[str] = []
    started = time.perf_counter()
    output = _HANDLERS[ns.command](ns, warnings)
    seconds = time.perf_counter() - started
    config = _echo_config(ns)
    envelope = {
        "tool": TOOL,
        "version": __version__,
        "command": " ".join(config["_argv_head"]),
        "config": {k: v for k, v in config.items() if not k.startswith("_")},
        "argv": config_to_argv(config),
        "results": output.results,
        "warnings": warnings,
        "timing_seconds": round(seconds, 6),
    }
    if getattr(output, "series", None):
        envelope["series"] = output.series
    return envelope, output


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        envelope, output = run(ns)
    except EngineMismatchError as exc:
        print(f"{TOOL}: engine mismatch: {exc}", file=sys.stderr)
        return 4
    except (TableTooLargeError, GuardExceededError) as exc:
        print(f"{TOOL}: guard exceeded: {exc}", file=sys.stderr)
        return 3
    except (ParameterError, FactcongError) as exc:
        print(f"{TOOL}: {exc}", file=sys.stderr)
        return 2
    fmt = ns.format or output.default_format
    text = render(envelope, output, fmt)
    if fmt != "json":
        for warning in envelope["warnings"]:
            print(f"{TOOL}: warning: {warning}", file=sys.stderr)
    if ns.out:
        with open(ns.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
