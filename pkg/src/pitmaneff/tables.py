"""Reproduction of the published power/efficiency tables.

Row configurations and the published values live in ``data/tables.json``;
this module runs the simulations for a table, compares every printed cell
and writes the result as CSV (full precision) or Markdown (rounded the way
the tables print).
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from importlib import resources
from typing import Iterable

from . import __version__
from .cache import ResultsCache
from .dist_core import NULL, Alternative, hellinger
from .empirical_eff import SampleSizeNotReached, cached_power, matched_ere
from .pitman import builtin_path, pitman_linear, pitman_path
from .test_engine import McConfig, PowerEstimate, TestId, power_at

__all__ = [
    "TableRow",
    "TableSpec",
    "RowResult",
    "TOLERANCES",
    "load_table",
    "load_hellinger_spots",
    "run_table",
    "run_row",
    "manifest_lines",
    "write_csv",
    "read_csv",
    "to_markdown",
]

TOLERANCES = {
    "power": 0.015,  # absolute, on a probability
    "ere_rel": 0.10,
    "hellinger": 0.002,
    # printed parameters are themselves rounded (e.g. 0.6667, 0.9333)
    "pitman": 0.0025,
}

EXPECTED_KEYS = (
    "power_V_anchor",
    "power_T_anchor",
    "power_V_other",
    "power_T_other",
    "ere",
    "pitman_linear",
    "pitman_path",
    "hellinger",
)


@dataclass(frozen=True)
class TableRow:
    table_id: int
    row_id: str
    path: str
    path_params: tuple
    s: float
    p: float
    q: float
    eps: float
    anchor_test: TestId
    n_anchor: int
    n_other: int
    kind: str
    reps: int | None
    heavy: bool
    expected: dict = field(compare=True, hash=False)
    provenance: str = ""

    @property
    def alt(self) -> Alternative:
        return Alternative.from_pqe(self.p, self.q, self.eps)

    def make_path(self):
        return builtin_path(self.path, **dict(self.path_params))


@dataclass(frozen=True)
class TableSpec:
    table_id: int
    caption: str
    alpha: float
    reps: int
    rows: tuple


def _data() -> dict:
    text = resources.files("pitmaneff").joinpath("data/tables.json").read_text("utf-8")
    return json.loads(text)


def _norm_expected(raw: dict) -> dict:
    return {k: raw.get(k) for k in EXPECTED_KEYS}


def load_table(table_id: int) -> TableSpec:
    tables = _data()["tables"]
    key = str(int(table_id))
    if key not in tables:
        raise KeyError(f"no table {table_id}; available: {', '.join(sorted(tables))}")
    t = tables[key]
    rows = tuple(
        TableRow(
            table_id=int(table_id),
            row_id=r["row_id"],
            path=r["path"],
            path_params=tuple(sorted((k, float(v)) for k, v in r["path_params"].items())),
            s=float(r["s"]),
            p=float(r["p"]),
            q=float(r["q"]),
            eps=float(r["eps"]),
            anchor_test=TestId(r["anchor_test"]),
            n_anchor=int(r["n_anchor"]),
            n_other=int(r["n_other"]),
            kind=r["kind"],
            reps=None if r["reps"] is None else int(r["reps"]),
            heavy=bool(r["heavy"]),
            expected=_norm_expected(r["expected"]),
            provenance=r["provenance"],
        )
        for r in t["rows"]
    )
    return TableSpec(int(table_id), t["caption"], float(t["alpha"]), int(t["reps"]), rows)


def load_hellinger_spots() -> list[dict]:
    return _data()["hellinger_spots"]


@dataclass
class RowResult:
    row: TableRow
    reps: int
    hellinger: float
    powers: dict
    n_V: int | None = None
    n_T: int | None = None
    power_V_matched: PowerEstimate | None = None
    power_T_matched: PowerEstimate | None = None
    ere: float = math.nan
    ere_bound: str = ""
    pitman_linear: float = math.nan
    pitman_path: float | None = None
    deltas: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def _as_float(v) -> float:
    return math.inf if v == "inf" else float(v)


def _check(res: RowResult):
    exp = res.row.expected
    tol = TOLERANCES
    for key in ("power_V_anchor", "power_T_anchor", "power_V_other", "power_T_other"):
        d = res.powers[key].power - exp[key] / 100.0
        res.deltas[key] = d
        if abs(d) > tol["power"]:
            res.failures.append(f"{key}: {res.powers[key].power:.4f} vs {exp[key]}%")
    if exp["hellinger"] is not None:
        d = res.hellinger - exp["hellinger"]
        res.deltas["hellinger"] = d
        if abs(d) > tol["hellinger"]:
            res.failures.append(f"hellinger: {res.hellinger:.4f} vs {exp['hellinger']}")
    for key, got in (("pitman_linear", res.pitman_linear), ("pitman_path", res.pitman_path)):
        want = exp[key]
        if want is None:
            continue
        want = _as_float(want)
        if math.isinf(want) or math.isinf(got):
            ok = got == want
            res.deltas[key] = 0.0 if ok else math.inf
        else:
            res.deltas[key] = got - want
            ok = abs(got - want) <= tol["pitman"]
        if not ok:
            res.failures.append(f"{key}: {got:.4f} vs {want}")
    want = exp["ere"]
    if isinstance(want, str):
        # bound rows: the searched test is still short of the target at n_other
        op, bound = want[0], float(want[1:])
        if not res.ere_bound:
            res.failures.append(f"ere: no bound established (expected {want})")
        else:
            implied = float(res.ere_bound[1:])
            ok = implied <= bound if op == "<" else implied >= bound
            res.deltas["ere"] = implied - bound
            if not (ok and res.ere_bound[0] == op):
                res.failures.append(f"ere: {res.ere_bound} does not imply {want}")
    else:
        d = (res.ere - want) / want if math.isfinite(res.ere) else math.inf
        res.deltas["ere"] = d
        if not abs(d) <= tol["ere_rel"]:
            res.failures.append(f"ere: {res.ere:.4f} vs {want}")


def run_row(
    row: TableRow,
    alpha: float,
    cfg: McConfig,
    *,
    full_reps: bool = False,
    cache: ResultsCache | None = None,
    n_max_factor: int = 4,
) -> RowResult:
    reps = cfg.reps if (full_reps or row.reps is None) else min(row.reps, cfg.reps)
    cfg = replace(cfg, reps=reps, alpha=alpha)
    alt = row.alt
    ns = [row.n_anchor, row.n_other]
    # one pass gives both tests at both sample sizes; seed the cache with it
    est = {}
    missing = [
        (t, n) for t in TestId for n in ns
        if cache is None or cache.get(t, alt, n, cfg) is None
    ]
    if missing:
        fresh = power_at(alt, ns, cfg)
        for t in TestId:
            for n, e in zip(ns, fresh[t]):
                est[(t, n)] = e
                if cache is not None:
                    cache.put(t, alt, n, e.rejections, cfg)
    else:
        for t in TestId:
            for n in ns:
                est[(t, n)] = cached_power(t, alt, n, cfg, cache)
    powers = {
        "power_V_anchor": est[(TestId.V, row.n_anchor)],
        "power_T_anchor": est[(TestId.T, row.n_anchor)],
        "power_V_other": est[(TestId.V, row.n_other)],
        "power_T_other": est[(TestId.T, row.n_other)],
    }
    res = RowResult(row, reps, hellinger(alt, NULL), powers)
    try:
        res.pitman_linear = pitman_linear(row.p, row.q)
    except ValueError:
        res.pitman_linear = math.nan
    path = row.make_path()
    if row.expected["pitman_path"] is not None:
        res.pitman_path = pitman_path(path).efficiency

    if row.kind == "bound":
        other = TestId.T if row.anchor_test is TestId.V else TestId.V
        target = est[(row.anchor_test, row.n_anchor)].power
        reached = est[(other, row.n_other)].power >= target - 0.005
        if not reached:
            if row.anchor_test is TestId.V:
                res.ere_bound = f"<{row.n_anchor / row.n_other!r}"
            else:
                res.ere_bound = f">{row.n_other / row.n_anchor!r}"
    else:
        try:
            rep = matched_ere(
                alt,
                alpha,
                row.n_anchor,
                cfg,
                anchor_test=row.anchor_test,
                n_max=n_max_factor * max(ns),
                cache=cache,
                with_hellinger=False,
            )
        except (SampleSizeNotReached, ValueError) as exc:
            res.failures.append(f"search failed: {exc}")
        else:
            res.n_V, res.n_T = rep.n_V, rep.n_T
            res.power_V_matched, res.power_T_matched = rep.power_V, rep.power_T
            res.ere = rep.ere
    _check(res)
    return res


def run_table(
    table_id: int,
    cfg: McConfig,
    *,
    rows: Iterable[str] | None = None,
    alpha: float | None = None,
    include_heavy: bool = True,
    full_reps: bool = False,
    cache: ResultsCache | None = None,
    progress=None,
) -> list[RowResult]:
    """Run the rows of one table; ``alpha`` defaults to the table's level."""
    spec = load_table(table_id)
    wanted = None if rows is None else set(rows)
    if wanted is not None:
        unknown = wanted - {r.row_id for r in spec.rows}
        if unknown:
            raise KeyError(f"table {table_id} has no rows {sorted(unknown)}")
    out = []
    for row in spec.rows:
        if wanted is not None and row.row_id not in wanted:
            continue
        if row.heavy and not include_heavy:
            continue
        res = run_row(row, spec.alpha if alpha is None else alpha, cfg,
                      full_reps=full_reps, cache=cache)
        if progress is not None:
            progress(res)
        out.append(res)
    return out


# -- output ------------------------------------------------------------------

CONFIG_COLUMNS = [
    "table", "row_id", "provenance", "path", "path_params", "s", "p", "q", "eps",
    "anchor_test", "n_anchor", "n_other", "kind", "row_reps", "heavy",
] + [f"printed_{k}" for k in EXPECTED_KEYS]

RESULT_COLUMNS = [
    "reps", "hellinger",
    "power_V_anchor", "power_T_anchor", "power_V_other", "power_T_other",
    "n_V", "n_T", "power_V_matched", "power_T_matched",
    "ere", "ere_bound", "pitman_linear", "pitman_path",
] + [f"delta_{k}" for k in EXPECTED_KEYS if k not in ("ere",)] + ["delta_ere", "pass", "failures"]


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, PowerEstimate):
        return repr(v.power)
    return str(v)


def _params_str(params: tuple) -> str:
    return ";".join(f"{k}={v!r}" for k, v in params)


def _parse_params(text: str) -> tuple:
    if not text:
        return ()
    return tuple((k, float(v)) for k, v in (item.split("=") for item in text.split(";")))


def manifest_lines(command: str, cfg: McConfig, timestamp: str | None = None) -> list[str]:
    """Comment lines embedded at the top of every result file."""
    ts = timestamp or datetime.now(timezone.utc).isoformat(timespec="seconds")
    return [
        f"# pitmaneff {__version__}",
        f"# command: {command}",
        f"# seed={cfg.seed} reps={cfg.reps} batch={cfg.batch} cv_rule={cfg.cv_kind.value} "
        f"alpha={cfg.alpha!r} cal_reps={cfg.cal_reps} threads_hint={cfg.threads_hint}",
        f"# timestamp: {ts}",
    ]


def _row_cells(res: RowResult) -> dict:
    r = res.row
    cells = {
        "table": r.table_id, "row_id": r.row_id, "provenance": r.provenance, "path": r.path,
        "path_params": _params_str(r.path_params), "s": r.s, "p": r.p, "q": r.q, "eps": r.eps,
        "anchor_test": r.anchor_test.value, "n_anchor": r.n_anchor, "n_other": r.n_other,
        "kind": r.kind, "row_reps": r.reps, "heavy": r.heavy,
    }
    for k in EXPECTED_KEYS:
        v = r.expected[k]
        cells[f"printed_{k}"] = v if not isinstance(v, (int, float)) or isinstance(v, bool) else float(v)
    cells.update(
        reps=res.reps, hellinger=res.hellinger, **res.powers,
        n_V=res.n_V, n_T=res.n_T, power_V_matched=res.power_V_matched,
        power_T_matched=res.power_T_matched, ere=res.ere, ere_bound=res.ere_bound,
        pitman_linear=res.pitman_linear, pitman_path=res.pitman_path,
        **{f"delta_{k}": res.deltas.get(k) for k in EXPECTED_KEYS},
        failures=" | ".join(res.failures),
    )
    cells["pass"] = res.passed
    return cells


def write_csv(results: list[RowResult], manifest: list[str]) -> str:
    buf = io.StringIO()
    for line in manifest:
        buf.write(line + "\n")
    w = csv.DictWriter(buf, CONFIG_COLUMNS + RESULT_COLUMNS, lineterminator="\n")
    w.writeheader()
    for res in results:
        w.writerow({k: _fmt(v) for k, v in _row_cells(res).items()})
    return buf.getvalue()


def _parse_expected(text: str):
    if text == "":
        return None
    if text == "inf" or text[0] in "<>":
        return text
    return float(text)


def read_csv(text: str) -> tuple[list[str], list[dict]]:
    """Split a result file into manifest lines and rows.

    Each row dict carries the parsed ``TableRow`` under ``"spec_row"``.
    """
    lines = text.splitlines(keepends=True)
    manifest = [ln.rstrip("\n") for ln in lines if ln.startswith("#")]
    body = "".join(ln for ln in lines if not ln.startswith("#"))
    rows = []
    for rec in csv.DictReader(io.StringIO(body)):
        expected = {k: _parse_expected(rec[f"printed_{k}"]) for k in EXPECTED_KEYS}
        rec["spec_row"] = TableRow(
            table_id=int(rec["table"]),
            row_id=rec["row_id"],
            path=rec["path"],
            path_params=_parse_params(rec["path_params"]),
            s=float(rec["s"]),
            p=float(rec["p"]),
            q=float(rec["q"]),
            eps=float(rec["eps"]),
            anchor_test=TestId(rec["anchor_test"]),
            n_anchor=int(rec["n_anchor"]),
            n_other=int(rec["n_other"]),
            kind=rec["kind"],
            reps=int(rec["row_reps"]) if rec["row_reps"] else None,
            heavy=rec["heavy"] == "1",
            expected=expected,
            provenance=rec["provenance"],
        )
        rows.append(rec)
    return manifest, rows


def _pct(e: PowerEstimate | None) -> str:
    return "" if e is None else str(round(100 * e.power))


def _d3(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return "inf" if math.isinf(x) else f"{x:.3f}"


def to_markdown(results: list[RowResult], manifest: list[str]) -> str:
    out = [f"<!-- {line[2:]} -->" for line in manifest]
    out.append("")
    out.append("| row | p | q | eps | H | n | V | T | ERE | E^P (linear) | e^P (path) | printed ERE | ok |")
    out.append("|---|---|---|---|---|---|---|---|---|---|---|---|---|")
    for res in results:
        r = res.row
        ere = res.ere_bound or _d3(res.ere)
        out.append(
            f"| {r.row_id} | {r.p:g} | {r.q:g} | {r.eps:g} | {res.hellinger:.3f} | {r.n_anchor} "
            f"| {_pct(res.powers['power_V_anchor'])} | {_pct(res.powers['power_T_anchor'])} "
            f"| | | | | |"
        )
        n_match = res.n_T if r.anchor_test is TestId.V else res.n_V
        out.append(
            f"| | | | | | {r.n_other} | {_pct(res.powers['power_V_other'])} "
            f"| {_pct(res.powers['power_T_other'])} | {ere} | {_d3(res.pitman_linear)} "
            f"| {_d3(res.pitman_path)} | {r.expected['ere']} | {'yes' if res.passed else 'NO'} |"
        )
        if n_match is not None:
            matched = res.power_T_matched if r.anchor_test is TestId.V else res.power_V_matched
            out.append(f"| | | | | | matched n={n_match} | | {_pct(matched)} | | | | | |")
    out.append("")
    return "\n".join(out)
