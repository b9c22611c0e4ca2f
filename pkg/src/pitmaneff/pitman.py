"""Pitman efficiency of the T test relative to the V test.

For a path ``s -> P(s)`` starting at the uniform null, each test has a
centring ``mu(s)`` (the mean of the per-observation score minus its null
value) and a scale ``sigma(s)``. The Pitman efficiency is
``c_T / c_V`` with ``c = (mu'(0) / sigma(0))**2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

from .dist_core import Alternative, BetaParams, mixture_moment, tau
from .test_engine import TestId

__all__ = [
    "Path",
    "PitmanResult",
    "Slopes",
    "PathError",
    "mu_sigma",
    "pitman_linear",
    "path_slopes",
    "pitman_path",
    "builtin_path",
    "PATH_NAMES",
]


class PathError(ValueError):
    """A path that violates the hypotheses of the efficiency computation."""


def mu_sigma(test: TestId, alt: Alternative) -> tuple[float, float]:
    """Centring and scale of ``test`` under ``alt`` (per observation)."""
    test = TestId(test)
    if test is TestId.V:
        m1, m2 = mixture_moment(alt, 1), mixture_moment(alt, 2)
        mu = m1 - 0.5
        var = m2 - m1 * m1
    else:
        m2, m4 = mixture_moment(alt, 2), mixture_moment(alt, 4)
        mu = m2 - 1.0 / 3.0
        var = m4 - m2 * m2
    if not var > 0:
        raise ValueError(f"degenerate scale for test {test.value} under {alt}")
    return mu, math.sqrt(var)


def pitman_linear(p: float, q: float) -> float:
    """Pitman efficiency of T w.r.t. V along the contamination segment to Beta(p, q).

    Equals ``5 tau^2 / (12 (p - q)^2 (p + q + 1)^2)``; infinite when
    ``p == q < 1``.
    """
    if p <= 0 or q <= 0:
        raise ValueError("beta shapes must be positive")
    if p == 1 and q == 1:
        raise PathError("Beta(1, 1) is the null itself: there is no path")
    if p < q:
        raise PathError(f"need p >= q, got ({p}, {q})")
    t = tau(p, q)
    if t < 0:
        raise PathError(f"tau({p}, {q}) = {t:.6g} < 0: T is not consistent on this path")
    if p == q:
        return math.inf
    return 5 * t * t / (12 * (p - q) ** 2 * (p + q + 1) ** 2)


@dataclass(frozen=True)
class Path:
    """Curve ``s -> (p(s), q(s), eps(s))`` on [0, 1] anchored at the null."""

    name: str
    coords: Callable[[float], tuple[float, float, float]]
    params: dict = field(default_factory=dict)
    closed_form_efficiency: float | None = None

    def eval(self, s: float) -> Alternative:
        if not 0 <= s <= 1:
            raise ValueError(f"path parameter must lie in [0, 1], got {s}")
        p, q, eps = self.coords(s)
        return Alternative(eps, BetaParams(p, q))

    def __call__(self, s: float) -> Alternative:
        return self.eval(s)

    def __repr__(self):
        args = ", ".join(f"{k}={v:g}" for k, v in self.params.items())
        return f"Path({self.name}{'(' + args + ')' if args else ''})"


class Slopes(NamedTuple):
    mu_slope: float
    sigma0: float
    error: float


@dataclass(frozen=True)
class PitmanResult:
    c_T: float
    c_V: float
    efficiency: float


def _mu_along(path: Path, test: TestId) -> Callable[[float], float]:
    return lambda s: mu_sigma(test, path.eval(s))[0]


def path_slopes(path: Path, test: TestId, h: float = 1e-3, tol: float = 1e-8) -> Slopes:
    """Right-hand derivative of ``mu`` at ``s = 0`` and the null scale.

    Forward differences at ``h, h/2, h/4`` combined by two Richardson
    steps (error ``O(h^3)``). The reported error is the change made by the
    second step.
    """
    test = TestId(test)
    mu = _mu_along(path, test)
    mu0, sigma0 = mu_sigma(test, path.eval(0.0))
    if abs(mu0) > 1e-14:
        raise PathError(f"{path!r} does not start at the null (mu(0) = {mu0:g})")
    d = [(mu(h / 2**k) - mu0) / (h / 2**k) for k in range(3)]
    r1 = [2 * d[1] - d[0], 2 * d[2] - d[1]]
    slope = (4 * r1[1] - r1[0]) / 3
    err = abs(slope - r1[1])
    if slope < -max(tol, 10 * err):
        raise PathError(
            f"negative slope {slope:.3g} of mu for test {test.value} on {path!r}"
        )
    return Slopes(max(slope, 0.0), sigma0, err)


def pitman_path(path: Path) -> PitmanResult:
    """Efficiency ``c_T / c_V`` from numerically differentiated centrings."""
    sv = path_slopes(path, TestId.V)
    st = path_slopes(path, TestId.T)
    c_v = (sv.mu_slope / sv.sigma0) ** 2
    c_t = (st.mu_slope / st.sigma0) ** 2
    # slopes below the differentiation error are treated as zero
    if sv.mu_slope <= 10 * sv.error + 1e-12:
        c_v = 0.0
    if st.mu_slope <= 10 * st.error + 1e-12:
        c_t = 0.0
    if c_v == 0 and c_t == 0:
        raise PathError(f"both slopes vanish on {path!r}")
    eff = math.inf if c_v == 0 else c_t / c_v
    return PitmanResult(c_t, c_v, eff)


# -- catalogue ---------------------------------------------------------------

_FIVE_12 = 5 / 12
_EIGHTY_27 = 80 / 27
_FIVE_3 = 5 / 3

_FIXED = {
    "gamma2": (lambda s: (1 + 2 * s + s * s, 1 + s + s * s, 1.0), _FIVE_12),
    "gamma3": (lambda s: (1 - s / 2 + s * s / 2, 1 - 2 * s / 3, 1.0), _EIGHTY_27),
    "gamma4": (lambda s: (1 + s, 1 + 0.5 * s - 1.18 * s * s, 1.0), _FIVE_12),
    "gamma5": (lambda s: (1 - s / 2, 1 - 2 * s / 3, 1.0), _EIGHTY_27),
    "gamma6": (lambda s: (1 - s + 1.1 * s * s, 1 - 2 * s + 2 * s * s, 1.0), _FIVE_3),
    "gamma7": (lambda s: (1 + 0.2 * s - 0.1 * s * s, 1 + 0.1 * s - 0.1 * s * s, 1.0), _FIVE_12),
    "gamma8": (lambda s: (2 + s, 1 + s, s), 15 / 16),
    "ell": (lambda s: (1 + 2 * s, 1 + s, 1.0), _FIVE_12),
    "m": (lambda s: (1 - 0.25 * s, 1 - 0.5 * s, 1.0), _FIVE_3),
}

PATH_NAMES = ("linear", "gamma1", *_FIXED)


def _linear(p: float, q: float) -> Path:
    pitman_linear(p, q)  # validates (p, q)
    return Path(
        "linear",
        lambda s: (p, q, s),
        {"p": p, "q": q},
        pitman_linear(p, q),
    )


def _gamma1(p: float, q: float) -> Path:
    if not (p >= q > 0):
        raise PathError(f"gamma1 needs p >= q > 0, got ({p}, {q})")
    if not tau(p, q) > 0:
        raise PathError(f"gamma1 needs tau(p, q) > 0, got {tau(p, q):g}")
    if not q < 3 + math.sqrt(8):
        raise PathError(f"gamma1 needs q < 3 + sqrt(8), got {q}")
    return Path(
        "gamma1",
        lambda s: (1 - s + p * s, 1 - s - q * s + 2 * q * s * s, 1.0),
        {"p": p, "q": q},
        5 * (4 * p + 5 * q + 1) ** 2 / (108 * (p + q) ** 2),
    )


def builtin_path(name: str, **params: float) -> Path:
    """Look up a named path.

    ``linear`` and ``gamma1`` take ``p`` and ``q``; the others take no
    parameters.
    """
    if name == "linear":
        return _linear(float(params["p"]), float(params["q"]))
    if name == "gamma1":
        return _gamma1(float(params.get("p", 6.0)), float(params.get("q", 4.0)))
    if name not in _FIXED:
        raise KeyError(f"unknown path {name!r}; choose from {', '.join(PATH_NAMES)}")
    if params:
        raise TypeError(f"path {name!r} takes no parameters")
    coords, eff = _FIXED[name]
    return Path(name, coords, {}, eff)
