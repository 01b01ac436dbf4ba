"""Gamma distribution primitives and the shape functions of the model family.

The public functions take a :class:`GammaParams`; the underscore helpers are
vectorised over ``shape`` and used on the hot paths of the model code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import optimize, special

from .errors import DomainError, ParameterDomainError

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class GammaParams:
    """Shape/scale pair of a gamma distribution.

    ``shape == 0`` is accepted and means the point mass at zero (the
    distribution of an increment over an empty interval). It is valid for
    :func:`gamma_cdf`, :func:`gamma_quantile` and :func:`sample_gamma` only.
    """

    shape: float
    scale: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.shape) and self.shape >= 0.0):
            raise ParameterDomainError(f"gamma shape must be finite and >= 0, got {self.shape!r}")
        if not (math.isfinite(self.scale) and self.scale > 0.0):
            raise ParameterDomainError(f"gamma scale must be finite and > 0, got {self.scale!r}")

    @property
    def mean(self) -> float:
        return self.shape * self.scale

    @property
    def var(self) -> float:
        return self.shape * self.scale**2


def _nonneg(x, what="x"):
    x = np.asarray(x, dtype=float)
    if np.any(np.isnan(x)) or np.any(x < 0):
        raise DomainError(f"{what} must be >= 0")
    return x


# -- vectorised helpers -----------------------------------------------------


def _logpdf(x, shape, scale=1.0):
    """log density; ``-inf`` outside the support. ``shape`` must be > 0."""
    x = np.asarray(x, dtype=float)
    shape = np.asarray(shape, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = x / scale
        out = special.xlogy(shape - 1.0, z) - z - special.gammaln(shape) - np.log(scale)
    return np.where(x > 0, out, np.where((x == 0) & (shape == 1.0), -np.log(scale), -np.inf))


def _cdf(x, shape, scale=1.0):
    """Regularised lower incomplete gamma P(shape, x/scale); shape 0 is a step at 0."""
    x = np.asarray(x, dtype=float)
    shape = np.asarray(shape, dtype=float)
    z = np.maximum(x, 0.0) / scale
    safe = np.where(shape > 0, shape, 1.0)
    out = special.gammainc(safe, z)
    return np.where(shape > 0, out, np.where(x >= 0, 1.0, 0.0))


def _sf(x, shape, scale=1.0):
    x = np.asarray(x, dtype=float)
    shape = np.asarray(shape, dtype=float)
    z = np.maximum(x, 0.0) / scale
    safe = np.where(shape > 0, shape, 1.0)
    out = special.gammaincc(safe, z)
    return np.where(shape > 0, out, np.where(x >= 0, 0.0, 1.0))


def integrated_cdf(z, shape):
    """``E[(z - G)^+] = int_0^z P(shape, u) du`` for a unit-scale gamma ``G``.

    Zero for ``z <= 0``. Closed form ``z P(a, z) - a P(a+1, z)``.
    """
    z = np.maximum(np.asarray(z, dtype=float), 0.0)
    if shape <= 0:
        return z
    return z * special.gammainc(shape, z) - shape * special.gammainc(shape + 1.0, z)


def _quantile(q, shape, scale=1.0):
    return special.gammaincinv(shape, q) * scale


# -- public operations ------------------------------------------------------


def gamma_pdf(x: ArrayLike, p: GammaParams) -> ArrayLike:
    """Gamma density ``x^(a-1) exp(-x/b) / (b^a Gamma(a))``."""
    if p.shape == 0:
        raise ParameterDomainError("gamma_pdf is undefined for the degenerate shape 0")
    x = _nonneg(x)
    out = np.exp(_logpdf(x, p.shape, p.scale))
    if p.shape < 1:
        out = np.where(x == 0, np.inf, out)
    return out[()] if out.ndim == 0 else out


def gamma_cdf(x: ArrayLike, p: GammaParams) -> ArrayLike:
    x = _nonneg(x)
    out = _cdf(x, p.shape, p.scale)
    return out[()] if np.ndim(out) == 0 else out


def gamma_quantile(q: ArrayLike, p: GammaParams, tol: float = 1e-10) -> ArrayLike:
    """Inverse CDF.

    Starts from ``scipy.special.gammaincinv`` and falls back to a bracketed
    Brent search on :func:`gamma_cdf` wherever the CDF residual exceeds ``tol``.
    """
    q = np.asarray(q, dtype=float)
    if np.any(~((q > 0) & (q < 1))):
        raise DomainError("quantile level must lie in the open interval (0, 1)")
    if p.shape == 0:
        out = np.zeros_like(q)
        return out[()] if out.ndim == 0 else out
    x = np.atleast_1d(_quantile(q, p.shape, p.scale)).astype(float)
    qs = np.atleast_1d(q)
    resid = np.abs(_cdf(x, p.shape, p.scale) - qs)
    for i in np.flatnonzero(~(resid <= tol)):
        x[i] = _bracketed_quantile(qs[i], p, tol)
    return x.reshape(q.shape)[()] if q.ndim == 0 else x.reshape(q.shape)


def _bracketed_quantile(q: float, p: GammaParams, tol: float) -> float:
    mean, sd = p.mean, math.sqrt(p.var)
    lo, hi = 0.0, mean + 4.0 * sd + p.scale
    while _cdf(hi, p.shape, p.scale) < q:
        hi *= 2.0
    f = lambda v: float(_cdf(v, p.shape, p.scale)) - q  # noqa: E731
    return optimize.brentq(f, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)


def sample_gamma(p: GammaParams, rng: np.random.Generator, size=None):
    """Draw from the gamma law with numpy's Marsaglia-Tsang sampler.

    The degenerate ``shape == 0`` law returns exact zeros.
    """
    if p.shape == 0:
        return 0.0 if size is None else np.zeros(size)
    return rng.gamma(p.shape, p.scale, size=size)


# -- shape functions --------------------------------------------------------


def _check_positive(**kw):
    for name, v in kw.items():
        if not (math.isfinite(v) and v > 0):
            raise ParameterDomainError(f"{name} must be finite and > 0, got {v!r}")


@dataclass(frozen=True)
class Linear:
    """Stationary shape ``rate * t``."""

    rate: float

    def __post_init__(self):
        _check_positive(rate=self.rate)

    def __call__(self, t):
        return self.rate * np.asarray(t, dtype=float)

    def inverse(self, a):
        return np.asarray(a, dtype=float) / self.rate

    @property
    def limit(self) -> float:
        return math.inf


@dataclass(frozen=True)
class WeibullBounded:
    """Bounded shape ``(x_lim/beta) (1 - exp[-(t/theta3)^theta2])``."""

    x_lim: float
    beta: float
    theta2: float
    theta3: float

    def __post_init__(self):
        _check_positive(x_lim=self.x_lim, beta=self.beta, theta2=self.theta2, theta3=self.theta3)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return -self.limit * np.expm1(-((t / self.theta3) ** self.theta2))

    def inverse(self, a):
        a = np.asarray(a, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.theta3 * (-np.log1p(-a / self.limit)) ** (1.0 / self.theta2)

    @property
    def limit(self) -> float:
        return self.x_lim / self.beta


@dataclass(frozen=True)
class PowerLaw:
    """Shape ``(t/theta1)^theta2``."""

    theta1: float
    theta2: float

    def __post_init__(self):
        _check_positive(theta1=self.theta1, theta2=self.theta2)

    def __call__(self, t):
        return (np.asarray(t, dtype=float) / self.theta1) ** self.theta2

    def inverse(self, a):
        return self.theta1 * np.asarray(a, dtype=float) ** (1.0 / self.theta2)

    @property
    def limit(self) -> float:
        return math.inf


ShapeFunction = Union[Linear, WeibullBounded, PowerLaw]


def shape_eval(f: ShapeFunction, t: ArrayLike) -> ArrayLike:
    t = _nonneg(t, "t")
    out = f(t)
    return out[()] if np.ndim(out) == 0 else out
