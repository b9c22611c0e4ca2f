"""Command-line harness: ``pitmaneff {table,pitman,hellinger,power,ere,probe}``.

Every result is written as comma-separated text preceded by ``#`` manifest
lines (or as a Markdown report with ``--format md``). Exit codes: 0 success,
1 a table cell outside tolerance, 2 usage or domain error.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import shlex
import sys
import warnings

from .cache import ResultsCache
from .dist_core import NULL, Alternative, hellinger, hellinger_product
from .empirical_eff import N_MAX, SampleSizeNotReached, convergence_probe, matched_ere
from .pitman import PATH_NAMES, PathError, builtin_path, path_slopes, pitman_path
from .quadrature import QuadratureError
from .tables import load_table, manifest_lines, run_table, to_markdown, write_csv
from .test_engine import CVKind, McConfig, TestId, power_at

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def parse_alt(text: str) -> Alternative:
    """``"p,q,eps"`` or ``"null"``."""
    if text.strip().lower() == "null":
        return NULL
    try:
        p, q, eps = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected p,q,eps or 'null', got {text!r}") from None
    return Alternative.from_pqe(p, q, eps)


def _common(parser: argparse.ArgumentParser, mc: bool = True):
    g = parser.add_argument_group("output")
    g.add_argument("--out", help="write to this file instead of stdout")
    g.add_argument("--format", choices=("csv", "md"), default="csv")
    if not mc:
        return
    g = parser.add_argument_group("Monte Carlo")
    g.add_argument("--seed", type=int, default=McConfig.seed)
    g.add_argument("--reps", type=int, default=McConfig.reps)
    g.add_argument("--alpha", type=float, help=f"test level (default {McConfig.alpha}, "
                   "or the table's own level)")
    g.add_argument("--cv-rule", choices=[k.value for k in CVKind], default=CVKind.FORMULA_T.value)
    g.add_argument("--cal-reps", type=int, default=McConfig.cal_reps,
                   help="null replications for --cv-rule mc")
    g.add_argument("--threads", type=int, default=1)
    g.add_argument("--cache", help="append-only results cache file")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pitmaneff", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("table", help="reproduce one of the published tables")
    p.add_argument("table_id", type=int, choices=range(1, 8), metavar="TABLE_ID")
    p.add_argument("--rows", nargs="+", help="only these row ids")
    p.add_argument("--skip-heavy", action="store_true",
                   help="skip rows marked heavy (searches beyond n = 15000)")
    p.add_argument("--full-reps", action="store_true",
                   help="ignore reduced per-row replication counts")
    _common(p)

    p = sub.add_parser("pitman", help="Pitman efficiency along a path")
    p.add_argument("path", choices=PATH_NAMES)
    p.add_argument("--p", type=float)
    p.add_argument("--q", type=float)
    _common(p, mc=False)

    p = sub.add_parser("hellinger", help="Hellinger distance between two alternatives")
    p.add_argument("a", type=parse_alt, help="p,q,eps")
    p.add_argument("b", type=parse_alt, nargs="?", default=NULL, help="p,q,eps (default: null)")
    p.add_argument("--n", type=int, nargs="*", default=[], help="also report n-fold products")
    _common(p, mc=False)

    p = sub.add_parser("power", help="simulated power of V and T")
    p.add_argument("alt", type=parse_alt, help="p,q,eps or null")
    p.add_argument("n", type=int, nargs="+")
    p.add_argument("--test", choices=("V", "T", "both"), default="both")
    _common(p)

    p = sub.add_parser("ere", help="power-matched empirical relative efficiency")
    p.add_argument("alt", type=parse_alt, help="p,q,eps")
    p.add_argument("anchor_n", type=int)
    p.add_argument("--anchor-test", choices=("V", "T"), default="V")
    p.add_argument("--n-max", type=int, default=N_MAX)
    _common(p)

    p = sub.add_parser("probe", help="s * sqrt(N(s)) along a path")
    p.add_argument("path", choices=PATH_NAMES)
    p.add_argument("s", type=float, nargs="+", help="decreasing path parameters")
    p.add_argument("--p", type=float)
    p.add_argument("--q", type=float)
    p.add_argument("--test", choices=("V", "T"), default="V")
    p.add_argument("--beta", type=float, default=0.5, help="target power")
    p.add_argument("--n-max", type=int, default=N_MAX)
    _common(p)
    return ap


def _config(args) -> McConfig:
    return McConfig(
        reps=args.reps,
        seed=args.seed,
        cv_kind=args.cv_rule,
        alpha=McConfig.alpha if args.alpha is None else args.alpha,
        cal_reps=args.cal_reps,
        threads_hint=args.threads,
    )


def _path(args):
    params = {k: v for k in ("p", "q") if (v := getattr(args, k)) is not None}
    try:
        return builtin_path(args.path, **params)
    except (KeyError, TypeError) as exc:
        raise UsageError(f"path {args.path}: {exc}") from None


def _records(records: list[dict], manifest: list[str], fmt: str) -> str:
    if fmt == "md":
        cols = list(records[0]) if records else []
        out = [f"<!-- {m[2:]} -->" for m in manifest] + [""]
        out.append("| " + " | ".join(cols) + " |")
        out.append("|" + "---|" * len(cols))
        for r in records:
            out.append("| " + " | ".join(_md(r[c]) for c in cols) + " |")
        return "\n".join(out) + "\n"
    buf = io.StringIO()
    buf.writelines(m + "\n" for m in manifest)
    if records:
        w = csv.DictWriter(buf, list(records[0]), lineterminator="\n")
        w.writeheader()
        for r in records:
            w.writerow({k: repr(v) if isinstance(v, float) else ("" if v is None else v)
                        for k, v in r.items()})
    return buf.getvalue()


def _md(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return "inf" if math.isinf(v) else f"{v:.4g}"
    return str(v)


def _manifest(args, argv, cfg: McConfig | None) -> list[str]:
    command = " ".join(shlex.quote(a) for a in argv)
    if cfg is not None:
        return manifest_lines(command, cfg)
    lines = manifest_lines(command, McConfig())
    return [ln for ln in lines if not ln.startswith("# seed=")]


def cmd_table(args, argv) -> tuple[str, int]:
    cfg = _config(args)
    cache = ResultsCache(args.cache) if args.cache else None
    spec = load_table(args.table_id)

    def progress(res):
        status = "ok" if res.passed else "FAIL"
        print(f"table {spec.table_id} row {res.row.row_id}: {status}", file=sys.stderr)

    results = run_table(
        args.table_id,
        cfg,
        rows=args.rows,
        alpha=args.alpha,
        include_heavy=not args.skip_heavy,
        full_reps=args.full_reps,
        cache=cache,
        progress=progress,
    )
    manifest = _manifest(args, argv, cfg)
    text = to_markdown(results, manifest) if args.format == "md" else write_csv(results, manifest)
    failed = [r for r in results if not r.passed]
    for r in failed:
        for f in r.failures:
            print(f"  row {r.row.row_id}: {f}", file=sys.stderr)
    return text, EXIT_FAIL if failed else EXIT_OK


def cmd_pitman(args, argv) -> tuple[str, int]:
    path = _path(args)
    res = pitman_path(path)
    sv, st = path_slopes(path, TestId.V), path_slopes(path, TestId.T)
    closed = path.closed_form_efficiency
    rec = {
        "path": repr(path),
        "mu_slope_V": sv.mu_slope,
        "mu_slope_T": st.mu_slope,
        "c_V": res.c_V,
        "c_T": res.c_T,
        "efficiency": res.efficiency,
        "closed_form": closed,
        "abs_diff": None if closed is None else abs(res.efficiency - closed),
    }
    return _records([rec], _manifest(args, argv, None), args.format), EXIT_OK


def cmd_hellinger(args, argv) -> tuple[str, int]:
    h = hellinger(args.a, args.b)
    recs = [{"a": str(args.a), "b": str(args.b), "n": 1, "hellinger": h}]
    for n in args.n:
        recs.append({"a": str(args.a), "b": str(args.b), "n": n,
                     "hellinger": hellinger_product(h, n)})
    return _records(recs, _manifest(args, argv, None), args.format), EXIT_OK


def cmd_power(args, argv) -> tuple[str, int]:
    cfg = _config(args)
    tests = (TestId.V, TestId.T) if args.test == "both" else (TestId(args.test),)
    res = power_at(args.alt, args.n, cfg, tests=tests)
    recs = [
        {"test": t.value, "alt": str(args.alt), "n": n, "power": e.power, "se": e.se,
         "rejections": e.rejections, "reps": e.reps}
        for t in tests
        for n, e in zip(args.n, res[t])
    ]
    return _records(recs, _manifest(args, argv, cfg), args.format), EXIT_OK


def cmd_ere(args, argv) -> tuple[str, int]:
    cfg = _config(args)
    cache = ResultsCache(args.cache) if args.cache else None
    rep = matched_ere(args.alt, cfg.alpha, args.anchor_n, cfg,
                      anchor_test=TestId(args.anchor_test), n_max=args.n_max, cache=cache)
    rec = {
        "alt": str(rep.alt),
        "anchor_test": rep.anchor_test.value,
        "n_V": rep.n_V,
        "n_T": rep.n_T,
        "power_V": rep.power_V.power,
        "power_T": rep.power_T.power,
        "ere": rep.ere,
        "pitman_linear": rep.pitman_linear_value,
        "hellinger": rep.hellinger_from_null,
    }
    return _records([rec], _manifest(args, argv, cfg), args.format), EXIT_OK


def cmd_probe(args, argv) -> tuple[str, int]:
    cfg = _config(args)
    cache = ResultsCache(args.cache) if args.cache else None
    res = convergence_probe(_path(args), TestId(args.test), cfg.alpha, args.beta, args.s, cfg,
                            n_max=args.n_max, cache=cache)
    recs = [{"s": pt.s, "n": pt.n, "s_sqrt_n": pt.scaled, "limit": res.limit}
            for pt in res.points]
    return _records(recs, _manifest(args, argv, cfg), args.format), EXIT_OK


COMMANDS = {
    "table": cmd_table,
    "pitman": cmd_pitman,
    "hellinger": cmd_hellinger,
    "power": cmd_power,
    "ere": cmd_ere,
    "probe": cmd_probe,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            text, code = COMMANDS[args.command](args, argv)
    except (UsageError, PathError, ValueError, KeyError, QuadratureError,
            SampleSizeNotReached) as exc:
        print(f"pitmaneff {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
