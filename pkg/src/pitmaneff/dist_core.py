"""Beta distributions, uniform/beta contamination mixtures and their distances.

Every alternative considered here has the form
``(1 - eps) * Uniform(0, 1) + eps * Beta(p, q)``; the uniform null is
``eps = 0`` (or ``p = q = 1``).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import betaln

from .quadrature import QuadratureError, tanh_sinh

__all__ = [
    "BetaParams",
    "Alternative",
    "NULL",
    "ThetaWarning",
    "QuadratureError",
    "tau",
    "beta_mean",
    "beta_m2",
    "beta_m4",
    "mixture_moment",
    "density",
    "sample",
    "draw",
    "hellinger",
    "hellinger_product",
]

UNIFORM_MOMENTS = {1: 1.0 / 2.0, 2: 1.0 / 3.0, 4: 1.0 / 5.0}


class ThetaWarning(UserWarning):
    """An alternative with a beta component outside ``p >= q, tau(p, q) >= 0``."""


def tau(p: float, q: float) -> float:
    """Sign-determining polynomial of ``E X^2 - 1/3`` under Beta(p, q)."""
    return 2 * p * p - 2 * p * q - q * q + 2 * p - q


@dataclass(frozen=True)
class BetaParams:
    p: float
    q: float

    def __post_init__(self):
        if not (math.isfinite(self.p) and math.isfinite(self.q)):
            raise ValueError(f"beta shapes must be finite, got ({self.p}, {self.q})")
        if self.p <= 0 or self.q <= 0:
            raise ValueError(f"beta shapes must be positive, got ({self.p}, {self.q})")

    def in_theta(self) -> bool:
        return self.p >= self.q and tau(self.p, self.q) >= 0

    @property
    def is_uniform(self) -> bool:
        return self.p == 1 and self.q == 1


@dataclass(frozen=True)
class Alternative:
    """Contamination mixture ``(1 - eps) U(0,1) + eps Beta(p, q)``."""

    eps: float
    beta: BetaParams = field(default_factory=lambda: BetaParams(1.0, 1.0))

    def __post_init__(self):
        if not 0.0 <= self.eps <= 1.0:
            raise ValueError(f"eps must lie in [0, 1], got {self.eps}")
        if self.eps > 0 and not self.beta.in_theta():
            warnings.warn(
                f"Beta({self.beta.p:g}, {self.beta.q:g}) lies outside "
                "{p >= q, tau >= 0}; the T test is not consistent here",
                ThetaWarning,
                stacklevel=3,
            )

    @classmethod
    def from_pqe(cls, p: float, q: float, eps: float) -> "Alternative":
        return cls(float(eps), BetaParams(float(p), float(q)))

    @property
    def is_null(self) -> bool:
        return self.eps == 0 or self.beta.is_uniform

    @property
    def p(self) -> float:
        return self.beta.p

    @property
    def q(self) -> float:
        return self.beta.q

    def __str__(self):
        return f"(p={self.p:g}, q={self.q:g}, eps={self.eps:g})"


NULL = Alternative(0.0)


def beta_mean(b: BetaParams) -> float:
    return b.p / (b.p + b.q)


def beta_m2(b: BetaParams) -> float:
    p, q = b.p, b.q
    return p * (p + 1) / ((p + q) * (p + q + 1))


def beta_m4(b: BetaParams) -> float:
    p, q = b.p, b.q
    s = p + q
    return p * (p + 1) * (p + 2) * (p + 3) / (s * (s + 1) * (s + 2) * (s + 3))


_BETA_MOMENTS = {1: beta_mean, 2: beta_m2, 4: beta_m4}


def mixture_moment(a: Alternative, k: int) -> float:
    """Raw moment ``E X^k`` of the mixture for ``k`` in {1, 2, 4}."""
    if k not in _BETA_MOMENTS:
        raise ValueError(f"moment order must be 1, 2 or 4, got {k}")
    return (1 - a.eps) * UNIFORM_MOMENTS[k] + a.eps * _BETA_MOMENTS[k](a.beta)


def _beta_pdf(b: BetaParams, x, xc):
    # log form keeps x**(p-1) finite for x ~ 1e-275
    with np.errstate(divide="ignore"):
        logf = (b.p - 1) * np.log(x) + (b.q - 1) * np.log(xc) - betaln(b.p, b.q)
    return np.exp(logf)


def _density(a: Alternative, x, xc):
    if a.eps == 0:
        return np.ones_like(x)
    return (1 - a.eps) + a.eps * _beta_pdf(a.beta, x, xc)


def density(a: Alternative, x):
    """Mixture density at ``x``; ``x`` must lie in the open interval (0, 1)."""
    xa = np.asarray(x, dtype=float)
    if np.any((xa <= 0) | (xa >= 1)) or np.any(np.isnan(xa)):
        raise ValueError("density is only defined on the open interval (0, 1)")
    out = _density(a, xa, 1.0 - xa)
    return float(out) if out.ndim == 0 else out


def draw(a: Alternative, shape, rng: np.random.Generator) -> np.ndarray:
    """Draw an array of i.i.d. values from ``a``.

    The consumption pattern of ``rng`` depends only on ``a`` and ``shape``:
    one uniform array for the component labels (skipped when eps is 0 or 1),
    one uniform array for the uniform component, then two gamma arrays for
    the beta draws.
    """
    if a.is_null:
        return rng.random(shape)
    if a.eps == 1:
        return _beta_draw(a.beta, shape, rng)
    is_beta = rng.random(shape) < a.eps
    x = rng.random(shape)
    k = int(is_beta.sum())
    if k:
        x[is_beta] = _beta_draw(a.beta, k, rng)
    return x


def _beta_draw(b: BetaParams, size, rng: np.random.Generator) -> np.ndarray:
    g1 = rng.standard_gamma(b.p, size)
    g2 = rng.standard_gamma(b.q, size)
    g1 /= g1 + g2
    return g1


def sample(a: Alternative, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` i.i.d. draws from ``a`` using the caller's generator."""
    if n < 1:
        raise ValueError("sample size must be at least 1")
    return draw(a, n, rng)


def hellinger(a: Alternative, b: Alternative, tol: float = 1e-8) -> float:
    """Hellinger distance ``sqrt(int (sqrt f_a - sqrt f_b)^2)``, in [0, sqrt(2)].

    The squared-difference form is integrated directly instead of
    ``2 - 2 * affinity`` so that small distances do not suffer cancellation.
    """
    if a == b:
        return 0.0

    def integrand(x, xc):
        d = np.sqrt(_density(a, x, xc)) - np.sqrt(_density(b, x, xc))
        return d * d

    res = tanh_sinh(integrand, tol=tol)
    h2 = min(max(res.value, 0.0), 2.0)
    return math.sqrt(h2)


def hellinger_product(h: float, n: int) -> float:
    """Hellinger distance between ``n``-fold products given the marginal one."""
    if not 0 <= h <= math.sqrt(2) + 1e-12:
        raise ValueError(f"Hellinger distance must lie in [0, sqrt(2)], got {h}")
    if n < 1:
        raise ValueError("n must be at least 1")
    affinity = max(1.0 - h * h / 2.0, 0.0)
    return math.sqrt(max(2.0 - 2.0 * affinity**n, 0.0))
