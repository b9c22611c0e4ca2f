"""Append-only text cache of Monte Carlo rejection counts.

One record per line::

    test,eps,p,q,n,alpha,cv_rule,reps,seed,batch,cal_reps,rejections

Floats are written with ``repr`` so keys round-trip exactly. A truncated
last line (interrupted write) is ignored on load.
"""

from __future__ import annotations

import os
import threading
from pathlib import Path

from .dist_core import Alternative
from .test_engine import McConfig, TestId

__all__ = ["ResultsCache"]

HEADER = "test,eps,p,q,n,alpha,cv_rule,reps,seed,batch,cal_reps,rejections"


def _key(test: TestId, alt: Alternative, n: int, cfg: McConfig) -> tuple:
    return (
        TestId(test).value,
        repr(float(alt.eps)),
        repr(float(alt.p)),
        repr(float(alt.q)),
        str(int(n)),
        repr(float(cfg.alpha)),
        cfg.cv_kind.value,
        str(cfg.reps),
        str(cfg.seed),
        str(cfg.batch),
        str(cfg.cal_reps),
    )


class ResultsCache:
    """Rejection counts keyed by everything that determines them.

    ``path=None`` keeps the records in memory only.
    """

    def __init__(self, path: str | os.PathLike | None = None):
        self.path = None if path is None else Path(path)
        self._lock = threading.Lock()
        self._data: dict[tuple, int] = {}
        if self.path is not None and self.path.exists():
            self._load()

    def _load(self):
        with open(self.path, encoding="utf-8") as fh:
            for line in fh:
                if not line.endswith("\n") or line.startswith("test,"):
                    continue
                fields = line.rstrip("\n").split(",")
                if len(fields) != 12:
                    continue
                self._data[tuple(fields[:11])] = int(fields[11])

    def get(self, test: TestId, alt: Alternative, n: int, cfg: McConfig) -> int | None:
        return self._data.get(_key(test, alt, n, cfg))

    def put_many(self, test: TestId, alt: Alternative, ns, counts, cfg: McConfig):
        rows = []
        with self._lock:
            for n, k in zip(ns, counts):
                key = _key(test, alt, int(n), cfg)
                if key not in self._data:
                    self._data[key] = int(k)
                    rows.append(",".join(key) + f",{int(k)}\n")
            if not rows or self.path is None:
                return
            new = not self.path.exists() or self.path.stat().st_size == 0
            with open(self.path, "a", encoding="utf-8") as fh:
                if new:
                    fh.write(HEADER + "\n")
                fh.writelines(rows)

    def put(self, test: TestId, alt: Alternative, n: int, count: int, cfg: McConfig):
        self.put_many(test, alt, [n], [count], cfg)

    def __len__(self):
        return len(self._data)
