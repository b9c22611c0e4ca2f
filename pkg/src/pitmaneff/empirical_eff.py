"""Empirical relative efficiency from Monte Carlo sample-size searches."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .cache import ResultsCache
from .dist_core import NULL, Alternative, hellinger
from .pitman import Path, PathError, path_slopes, pitman_linear, pitman_path
from .test_engine import (
    FORMULA_T_RANGE,
    CVKind,
    McConfig,
    PowerEstimate,
    TestId,
    power_mc,
    power_scan,
)

__all__ = [
    "TOL_MATCH",
    "N_MAX",
    "SampleSizeResult",
    "SampleSizeNotReached",
    "EfficiencyReport",
    "ProbePoint",
    "ProbeResult",
    "min_sample_size",
    "matched_ere",
    "convergence_probe",
    "cached_power",
]

TOL_MATCH = 0.005
N_MAX = 1_000_000


class SampleSizeNotReached(RuntimeError):
    def __init__(self, test: TestId, target: float, best_n: int, best_power: float, bracket):
        super().__init__(
            f"test {TestId(test).value} did not reach power {target:.4f} for n <= {bracket[1]}; "
            f"best {best_power:.4f} at n={best_n}"
        )
        self.best_n = best_n
        self.best_power = best_power
        self.bracket = bracket


@dataclass(frozen=True)
class SampleSizeResult:
    n: int
    achieved_power: PowerEstimate
    bracket: tuple[int, int]
    evaluations: int


@dataclass(frozen=True)
class EfficiencyReport:
    alt: Alternative
    alpha: float
    n_V: int
    n_T: int
    power_V: PowerEstimate
    power_T: PowerEstimate
    ere: float
    pitman_linear_value: float
    pitman_path_value: float | None = None
    hellinger_from_null: float | None = None
    anchor_test: TestId = TestId.V


def cached_power(
    test: TestId, alt: Alternative, n: int, cfg: McConfig, cache: ResultsCache | None = None
) -> PowerEstimate:
    """``power_mc`` that consults and fills an optional results cache."""
    if cache is not None:
        k = cache.get(test, alt, n, cfg)
        if k is not None:
            return PowerEstimate.from_count(k, cfg.reps)
    est = power_mc(test, alt, n, cfg)
    if cache is not None:
        cache.put(test, alt, n, est.rejections, cfg)
    return est


def min_sample_size(
    test: TestId,
    alt: Alternative,
    alpha: float,
    target_power: float,
    cfg: McConfig,
    *,
    tol: float = TOL_MATCH,
    n_min: int = 2,
    n_max: int = N_MAX,
    cache: ResultsCache | None = None,
) -> SampleSizeResult:
    """Smallest ``n`` whose simulated power reaches ``target_power - tol``.

    All sample sizes ``n_min, n_min + 1, ...`` are examined in a single
    simulation pass (each replication's sample of size ``n`` extends its
    sample of size ``n - 1``), stopping at the first hit.

    Raises
    ------
    SampleSizeNotReached
        If no ``n <= n_max`` reaches the target.
    """
    test = TestId(test)
    if not 0 < alpha < target_power < 1:
        raise ValueError(f"need 0 < alpha < target_power < 1, got {alpha}, {target_power}")
    if alt.is_null:
        raise ValueError("the null hypothesis has no finite sample size for power > alpha")
    cfg = cfg.with_alpha(alpha)
    n_min = max(2, int(n_min))
    goal = target_power - tol
    evaluations = 0
    best_n, best_k = n_min, -1
    start = n_min

    if cache is not None:
        n = n_min
        while n <= n_max:
            k = cache.get(test, alt, n, cfg)
            if k is None:
                break
            evaluations += 1
            if k > best_k:
                best_n, best_k = n, k
            if k / cfg.reps >= goal:
                return _result(test, n, k, cfg, n_min, evaluations)
            n += 1
        start = n

    if start <= n_max:
        # the stream is only a function of n, so a partially cached prefix is
        # recomputed rather than resumed mid-stream
        for ns, counts in power_scan(test, alt, cfg, n_max, n_min=n_min):
            if cache is not None:
                cache.put_many(test, alt, ns, counts, cfg)
            fresh = ns >= start
            evaluations += int(fresh.sum())
            i_best = int(np.argmax(counts))
            if counts[i_best] > best_k:
                best_n, best_k = int(ns[i_best]), int(counts[i_best])
            hits = np.flatnonzero(counts / cfg.reps >= goal)
            if hits.size:
                i = hits[0]
                return _result(test, int(ns[i]), int(counts[i]), cfg, n_min, evaluations)

    raise SampleSizeNotReached(test, target_power, best_n, best_k / cfg.reps, (n_min, n_max))


def _result(test, n, k, cfg, n_min, evaluations) -> SampleSizeResult:
    if cfg.rule(test).kind is CVKind.FORMULA_T and not (
        FORMULA_T_RANGE[0] <= n <= FORMULA_T_RANGE[1]
    ):
        warnings.warn(
            f"sample size {n} is outside the validated range of the corrected T formula",
            RuntimeWarning,
            stacklevel=3,
        )
    return SampleSizeResult(
        n, PowerEstimate.from_count(k, cfg.reps), (max(n_min, n - 1), n), evaluations
    )


def _safe_pitman_linear(alt: Alternative) -> float:
    try:
        return pitman_linear(alt.p, alt.q)
    except PathError:
        return math.nan


def matched_ere(
    alt: Alternative,
    alpha: float,
    anchor_n: int,
    cfg: McConfig,
    *,
    anchor_test: TestId = TestId.V,
    path: Path | None = None,
    tol: float = TOL_MATCH,
    n_max: int = N_MAX,
    cache: ResultsCache | None = None,
    with_hellinger: bool = True,
) -> EfficiencyReport:
    """Power-matched relative efficiency ``n_V / n_T`` at one alternative.

    The anchor test's power at ``anchor_n`` sets the target; the other test's
    minimal sample size reaching that target (within ``tol``) is searched.
    """
    anchor_test = TestId(anchor_test)
    other = TestId.T if anchor_test is TestId.V else TestId.V
    cfg = cfg.with_alpha(alpha)
    anchor = cached_power(anchor_test, alt, anchor_n, cfg, cache)
    if not alpha < anchor.power < 1:
        raise ValueError(
            f"anchor power {anchor.power:.4f} at n={anchor_n} is not in (alpha, 1); "
            "choose another anchor sample size"
        )
    found = min_sample_size(
        other, alt, alpha, anchor.power, cfg, tol=tol, n_max=n_max, cache=cache
    )
    if anchor_test is TestId.V:
        n_v, n_t, p_v, p_t = anchor_n, found.n, anchor, found.achieved_power
    else:
        n_v, n_t, p_v, p_t = found.n, anchor_n, found.achieved_power, anchor
    return EfficiencyReport(
        alt=alt,
        alpha=alpha,
        n_V=n_v,
        n_T=n_t,
        power_V=p_v,
        power_T=p_t,
        ere=n_v / n_t,
        pitman_linear_value=_safe_pitman_linear(alt),
        pitman_path_value=None if path is None else pitman_path(path).efficiency,
        hellinger_from_null=hellinger(alt, NULL) if with_hellinger else None,
        anchor_test=anchor_test,
    )


@dataclass(frozen=True)
class ProbePoint:
    s: float
    n: int | None
    scaled: float  # s * sqrt(n)


@dataclass(frozen=True)
class ProbeResult:
    points: list[ProbePoint]
    limit: float


def convergence_probe(
    path: Path,
    test: TestId,
    alpha: float,
    beta_power: float,
    s_grid,
    cfg: McConfig,
    *,
    tol: float = TOL_MATCH,
    n_max: int = N_MAX,
    cache: ResultsCache | None = None,
) -> ProbeResult:
    """``s * sqrt(N(s))`` along a path next to its small-``s`` limit.

    The limit is ``(z_alpha - z_beta) / sqrt(c)`` where ``c`` is the test's
    squared slope-to-scale ratio on the path and
    ``z_beta = Phi^{-1}(1 - beta_power)``.
    """
    test = TestId(test)
    s_grid = [float(s) for s in s_grid]
    if any(b >= a for a, b in zip(s_grid, s_grid[1:])) or min(s_grid) <= 0:
        raise ValueError("s_grid must be positive and strictly decreasing")
    slope, sigma0, _ = path_slopes(path, test)
    c = (slope / sigma0) ** 2
    if c <= 0:
        raise PathError(f"test {test.value} has zero slope on {path!r}")
    limit = (norm.isf(alpha) - norm.isf(beta_power)) / math.sqrt(c)
    points = []
    for s in s_grid:
        try:
            res = min_sample_size(
                test, path.eval(s), alpha, beta_power, cfg, tol=tol, n_max=n_max, cache=cache
            )
        except SampleSizeNotReached as exc:
            warnings.warn(f"s={s:g}: {exc}", RuntimeWarning, stacklevel=2)
            points.append(ProbePoint(s, None, math.nan))
            continue
        points.append(ProbePoint(s, res.n, s * math.sqrt(res.n)))
    return ProbeResult(points, limit)
