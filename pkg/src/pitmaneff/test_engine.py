"""Mean (V) and second-moment (T) uniformity tests and their Monte Carlo power.

Simulation layout
-----------------
Replications are split into batches of ``McConfig.batch`` rows.  Each batch
draws its observations in column chunks of ``CHUNK`` values; the chunk
``(batch b, chunk c)`` is filled from its own generator seeded with
``SeedSequence(seed, spawn_key=(purpose, b, c))``.  A replication's sample of
size ``n`` is therefore the first ``n`` values of one fixed stream, so

* results do not depend on how batches are scheduled over threads, and
* the power at every ``n`` up to ``n_max`` comes out of a single pass
  (common random numbers across sample sizes).
"""

from __future__ import annotations

import enum
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np
from scipy.stats import norm

from .dist_core import NULL, Alternative, draw

__all__ = [
    "CHUNK",
    "TestId",
    "CVKind",
    "CriticalValueRule",
    "McConfig",
    "PowerEstimate",
    "SIGMA0",
    "stat_V",
    "stat_T",
    "formula_t_standardized",
    "critical_value",
    "thresholds",
    "calibrate",
    "power_mc",
    "power_at",
    "power_scan",
]

CHUNK = 128

_POWER = 0
_CALIBRATION = 1

FORMULA_T_RANGE = (40, 30000)


class TestId(str, enum.Enum):
    __test__ = False

    V = "V"
    T = "T"


SIGMA0 = {TestId.V: 1 / math.sqrt(12.0), TestId.T: 2 / math.sqrt(45.0)}


class CVKind(str, enum.Enum):
    """How the rejection threshold is obtained.

    ``FORMULA_T`` is the empirical correction for the T test, applied to the
    statistic standardised by its null scale. ``NORMAL`` uses the normal
    quantile times the null scale. ``MC`` calibrates the threshold by
    simulating the null.
    """

    FORMULA_T = "paper"
    NORMAL = "normal"
    MC = "mc"


@dataclass(frozen=True)
class CriticalValueRule:
    kind: CVKind
    alpha: float = 0.05
    reps: int = 100_000

    def __post_init__(self):
        object.__setattr__(self, "kind", CVKind(self.kind))
        if not 0 < self.alpha < 1:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.kind is CVKind.MC and self.reps < 10_000:
            raise ValueError("Monte Carlo calibration needs at least 10 000 replications")


@dataclass(frozen=True)
class McConfig:
    """Everything that determines a Monte Carlo result.

    ``cv_kind="paper"`` means the T test uses the corrected formula and the V
    test the normal approximation (no formula exists for V).
    """

    reps: int = 100_000
    seed: int = 20_190_611
    batch: int = 4096
    threads_hint: int = 1
    cv_kind: CVKind = CVKind.FORMULA_T
    alpha: float = 0.05
    cal_reps: int = 100_000

    def __post_init__(self):
        object.__setattr__(self, "cv_kind", CVKind(self.cv_kind))
        if self.reps < 1:
            raise ValueError("reps must be at least 1")
        if self.batch < 1:
            raise ValueError("batch must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned value")
        if not 0 < self.alpha < 1:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")

    def rule(self, test: TestId) -> CriticalValueRule:
        kind = self.cv_kind
        if kind is CVKind.FORMULA_T and TestId(test) is TestId.V:
            kind = CVKind.NORMAL
        return CriticalValueRule(kind, self.alpha, self.cal_reps)

    def with_alpha(self, alpha: float) -> "McConfig":
        return self if alpha == self.alpha else replace(self, alpha=alpha)


@dataclass(frozen=True)
class PowerEstimate:
    power: float
    se: float
    reps: int
    rejections: int

    @classmethod
    def from_count(cls, rejections: int, reps: int) -> "PowerEstimate":
        p = rejections / reps
        return cls(p, math.sqrt(p * (1 - p) / reps), reps, int(rejections))


def stat_V(x) -> float:
    """``sqrt(n) * (mean(x) - 1/2)``."""
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        raise ValueError("empty sample")
    n = x.shape[-1]
    return np.sqrt(n) * (x.mean(axis=-1) - 0.5)


def stat_T(x) -> float:
    """``(sum(x**2) - n/3) / sqrt(n)``."""
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        raise ValueError("empty sample")
    n = x.shape[-1]
    return (np.sum(x * x, axis=-1) - n / 3.0) / np.sqrt(n)


def formula_t_standardized(n):
    """Corrected standardised 5% threshold for T: 1.6445 + 0.1/(sqrt(n+25) - 5)."""
    n = np.asarray(n, dtype=float)
    return 1.6445 + 0.1 / (np.sqrt(n + 25.0) - 5.0)


def thresholds(rule: CriticalValueRule, test: TestId, ns, seed: int = 0, batch: int = 4096):
    """Raw-statistic thresholds at each sample size in ``ns`` (no range warnings)."""
    test = TestId(test)
    ns = np.asarray(ns, dtype=np.int64)
    if rule.kind is CVKind.FORMULA_T:
        if test is not TestId.T:
            raise ValueError("the corrected formula is defined for the T test only")
        if rule.alpha != 0.05:
            raise ValueError("the corrected formula is calibrated for alpha = 0.05 only")
        return SIGMA0[test] * formula_t_standardized(ns)
    if rule.kind is CVKind.NORMAL:
        return np.full(ns.shape, SIGMA0[test] * norm.isf(rule.alpha))
    return calibrate(test, rule.alpha, rule.reps, seed, tuple(int(n) for n in ns), batch)


def critical_value(rule: CriticalValueRule, test: TestId, n: int, seed: int = 0) -> float:
    """Rejection threshold for the raw statistic of ``test`` at sample size ``n``."""
    if n < 2:
        raise ValueError("critical values need n >= 2")
    if rule.kind is CVKind.FORMULA_T and not (
        FORMULA_T_RANGE[0] <= n <= FORMULA_T_RANGE[1]
    ):
        warnings.warn(
            f"corrected T formula used at n={n}, outside its validated range "
            f"{FORMULA_T_RANGE}",
            RuntimeWarning,
            stacklevel=2,
        )
    return float(thresholds(rule, test, [n], seed)[0])


# -- simulation core ---------------------------------------------------------


def _generator(seed: int, purpose: int, batch: int, chunk: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(purpose, batch, chunk))
    return np.random.Generator(np.random.PCG64(ss))


def _batch_sizes(reps: int, batch: int) -> list[int]:
    full, rest = divmod(reps, batch)
    return [batch] * full + ([rest] if rest else [])


def _stat_stream(
    alt: Alternative,
    tests: Sequence[TestId],
    reps: int,
    batch: int,
    seed: int,
    purpose: int,
    ns: np.ndarray | None,
    threads: int = 1,
    n_max: int | None = None,
) -> Iterator[tuple[np.ndarray, dict]]:
    """Yield ``(ns_in_chunk, {test: [stats per batch]})`` chunk by chunk.

    ``ns`` must be sorted, unique and >= 1; ``ns=None`` means every n from 1
    to ``n_max``. Each stats array has shape ``(batch_size, len(ns_in_chunk))``.
    """
    sizes = _batch_sizes(reps, batch)
    need_t = TestId.T in tests
    need_v = TestId.V in tests
    carry1 = [np.zeros(b) for b in sizes]
    carry2 = [np.zeros(b) for b in sizes]
    if ns is not None:
        n_max = int(ns[-1])
    pool = ThreadPoolExecutor(threads) if threads > 1 and len(sizes) > 1 else None
    try:
        for c in range(-(-n_max // CHUNK)):
            lo = c * CHUNK
            if ns is None:
                sel = np.arange(lo + 1, min(lo + CHUNK, n_max) + 1, dtype=np.int64)
            else:
                sel = ns[(ns > lo) & (ns <= lo + CHUNK)]
            cols = sel - lo - 1
            root_n = np.sqrt(sel)

            def work(i: int):
                x = draw(alt, (sizes[i], CHUNK), _generator(seed, purpose, i, c))
                out = {}
                if need_v:
                    s1 = np.cumsum(x, axis=1)
                    s1 += carry1[i][:, None]
                    carry1[i] = s1[:, -1].copy()
                    out[TestId.V] = (s1[:, cols] - 0.5 * sel) / root_n
                if need_t:
                    s2 = np.cumsum(x * x, axis=1)
                    s2 += carry2[i][:, None]
                    carry2[i] = s2[:, -1].copy()
                    out[TestId.T] = (s2[:, cols] - sel / 3.0) / root_n
                return out

            if pool is None:
                parts = [work(i) for i in range(len(sizes))]
            else:
                parts = list(pool.map(work, range(len(sizes))))
            if sel.size:
                yield sel, {t: [p[t] for p in parts] for t in tests}
    finally:
        if pool is not None:
            pool.shutdown()


def _order_stat_index(alpha: float, reps: int) -> int:
    # threshold = k-th smallest with k = ceil((1 - alpha) * reps); P(stat > it) <= alpha
    return min(reps - 1, max(0, math.ceil((1 - alpha) * reps) - 1))


@lru_cache(maxsize=256)
def calibrate(test: TestId, alpha: float, reps: int, seed: int, ns: tuple, batch: int = 4096):
    """Empirical ``(1 - alpha)`` null quantiles of ``test`` at each ``n`` in ``ns``.

    Uses its own substreams (independent of the power streams with the same
    seed). Memory is ``reps * len(ns)`` doubles.
    """
    test = TestId(test)
    ns_sorted = np.unique(np.asarray(ns, dtype=np.int64))
    if ns_sorted[0] < 2:
        raise ValueError("critical values need n >= 2")
    k = _order_stat_index(alpha, reps)
    found = {}
    for sel, stats in _stat_stream(NULL, (test,), reps, batch, seed, _CALIBRATION, ns_sorted):
        block = np.concatenate(stats[test], axis=0)
        q = np.partition(block, k, axis=0)[k]
        found.update(zip(sel.tolist(), q.tolist()))
    return np.array([found[int(n)] for n in ns])


class _DenseCalibration:
    """Null quantiles at every n, extended lazily chunk by chunk (scan mode)."""

    def __init__(self, test: TestId, alpha: float, reps: int, seed: int, batch: int):
        self._k = _order_stat_index(alpha, reps)
        self._test = test
        self._stream = _stat_stream(
            NULL, (test,), reps, batch, seed, _CALIBRATION, None, n_max=2**62
        )
        self.values = np.empty(0)

    def upto(self, n: int) -> np.ndarray:
        while self.values.size < n:
            sel, stats = next(self._stream)
            block = np.concatenate(stats[self._test], axis=0)
            q = np.partition(block, self._k, axis=0)[self._k]
            self.values = np.concatenate([self.values, q])
        return self.values


def _threshold_fn(cfg: McConfig, test: TestId, dense: bool):
    rule = cfg.rule(test)
    if rule.kind is CVKind.MC and dense:
        cal = _DenseCalibration(test, rule.alpha, rule.reps, cfg.seed, cfg.batch)
        return lambda sel: cal.upto(int(sel[-1]))[sel - 1]
    return lambda sel: thresholds(rule, test, sel, cfg.seed, cfg.batch)


def power_at(alt: Alternative, ns: Sequence[int], cfg: McConfig, tests=(TestId.V, TestId.T)):
    """Power of each test at each sample size, from one simulation pass.

    Returns ``{test: [PowerEstimate per n in ns order]}``.
    """
    tests = tuple(TestId(t) for t in tests)
    ns_list = [int(n) for n in ns]
    if min(ns_list) < 2:
        raise ValueError("sample sizes must be at least 2")
    uniq = np.unique(np.asarray(ns_list, dtype=np.int64))
    thr = {t: dict(zip(uniq.tolist(), np.asarray(_threshold_fn(cfg, t, False)(uniq)).tolist()))
           for t in tests}
    counts = {t: {} for t in tests}
    for sel, stats in _stat_stream(alt, tests, cfg.reps, cfg.batch, cfg.seed, _POWER, uniq,
                                   cfg.threads_hint):
        for t in tests:
            th = np.array([thr[t][n] for n in sel.tolist()])
            total = sum(np.count_nonzero(s > th, axis=0) for s in stats[t])
            counts[t].update(zip(sel.tolist(), np.asarray(total).tolist()))
    return {t: [PowerEstimate.from_count(counts[t][n], cfg.reps) for n in ns_list] for t in tests}


def power_mc(test: TestId, alt: Alternative, n: int, cfg: McConfig) -> PowerEstimate:
    """Fraction of ``cfg.reps`` samples of size ``n`` from ``alt`` rejected by ``test``."""
    if n < 2:
        raise ValueError("sample size must be at least 2")
    return power_at(alt, [n], cfg, tests=(test,))[TestId(test)][0]


def power_scan(
    test: TestId, alt: Alternative, cfg: McConfig, n_max: int, n_min: int = 2
) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Yield ``(ns, rejection_counts)`` for consecutive sample sizes, chunk by chunk.

    The counts at ``n`` are identical to ``power_mc(test, alt, n, cfg)``.
    Consumers may stop iterating at any time.
    """
    test = TestId(test)
    n_min = max(n_min, 2)
    thr = _threshold_fn(cfg, test, True)
    for sel, stats in _stat_stream(alt, (test,), cfg.reps, cfg.batch, cfg.seed, _POWER, None,
                                   cfg.threads_hint, n_max=n_max):
        keep = sel >= n_min
        if not keep.any():
            continue
        sel = sel[keep]
        stats = {test: [s[:, keep] for s in stats[test]]}
        th = thr(sel)
        total = sum(np.count_nonzero(s > th, axis=0) for s in stats[test])
        yield sel, np.asarray(total)
