"""Bounded gamma-process deterioration models.

Eight variants share one interface.  ``BNGP`` is a conventional gamma process
with a bounded (Weibull-type) shape function and scale ``theta1``.  The seven
transformed variants push a unit-scale gamma *kernel* ``G(t)`` through a
bounded, strictly increasing map ``T``, so ``X(t) = T(G(t))`` never leaves
``[0, x_lim)``.

Units
-----
All densities, moments, survival and remaining-life functions work in
*degradation* units: the process starts at 0 and increases towards ``x_lim``.
A model with ``Orientation.DECREASING`` describes a condition index
``C = x_lim - D``; use :meth:`ModelSpec.to_degradation` and
:meth:`ModelSpec.from_degradation` at the boundary.  Only :func:`transform`,
:func:`inverse_transform` and :func:`simulate_paths` speak the model's own
orientation.

For BNGP the "kernel" is ``X / theta1``, which is again a unit-scale gamma
process, so survival, remaining life and the policy recursions treat all
eight variants identically in kernel space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np
from scipy import integrate

from . import kernel as gk
from .errors import DomainError, InputError, ParameterDomainError, UnsupportedOperationError


class Variant(str, Enum):
    BNGP = "BNGP"
    BTGP = "BTGP"
    BTGP1 = "BTGP1"
    BTGP2 = "BTGP2"
    BTGP3 = "BTGP3"
    BTGP4 = "BTGP4"
    BTGP5 = "BTGP5"
    BTGP6 = "BTGP6"

    @property
    def n_params(self) -> int:
        return 4 if self in _FOUR_PARAM else 3

    @property
    def transformed(self) -> bool:
        return self is not Variant.BNGP

    @property
    def family(self) -> str:
        """Variants sharing a transform shape; BTGP4-6 extend BTGP1-3."""
        return _FAMILY[self]


_FOUR_PARAM = frozenset({Variant.BTGP4, Variant.BTGP5, Variant.BTGP6})
_FAMILY = {
    Variant.BNGP: "BNGP",
    Variant.BTGP: "BTGP",
    Variant.BTGP1: "exponential",
    Variant.BTGP4: "exponential",
    Variant.BTGP2: "rational",
    Variant.BTGP5: "rational",
    Variant.BTGP3: "arctan",
    Variant.BTGP6: "arctan",
}
VARIANT_ORDER = tuple(Variant)


class Orientation(str, Enum):
    INCREASING = "increasing"
    DECREASING = "decreasing"


@dataclass(frozen=True)
class ModelSpec:
    """One member of the model family with fixed parameters.

    ``theta`` holds ``(theta1, theta2, theta3[, theta4])``.  ``x_lim`` is the
    known bound and is never estimated.
    """

    variant: Variant
    theta: tuple
    x_lim: float = 100.0
    orientation: Orientation = Orientation.INCREASING
    shape_function: gk.ShapeFunction = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        object.__setattr__(self, "orientation", Orientation(self.orientation))
        theta = tuple(float(v) for v in self.theta)
        object.__setattr__(self, "theta", theta)
        if len(theta) != self.variant.n_params:
            raise ParameterDomainError(
                f"{self.variant.value} takes {self.variant.n_params} parameters, got {len(theta)}"
            )
        for i, v in enumerate(theta, start=1):
            if not (math.isfinite(v) and v > 0):
                raise ParameterDomainError(f"theta{i} must be finite and > 0, got {v!r}")
        if not (math.isfinite(self.x_lim) and self.x_lim > 0):
            raise ParameterDomainError(f"x_lim must be finite and > 0, got {self.x_lim!r}")
        object.__setattr__(self, "x_lim", float(self.x_lim))
        object.__setattr__(self, "shape_function", _make_shape(self))

    @property
    def n_params(self) -> int:
        return self.variant.n_params

    @property
    def kernel_scale(self) -> float:
        return self.theta[0] if self.variant is Variant.BNGP else 1.0

    def alpha(self, t):
        """Shape function of the underlying gamma process."""
        return self.shape_function(t)

    def with_theta(self, theta) -> "ModelSpec":
        return ModelSpec(self.variant, tuple(theta), self.x_lim, self.orientation)

    def to_degradation(self, value):
        value = np.asarray(value, dtype=float)
        out = self.x_lim - value if self.orientation is Orientation.DECREASING else value
        return out[()] if out.ndim == 0 else out

    # the map is an involution
    from_degradation = to_degradation

    def as_dict(self) -> dict:
        return {
            "variant": self.variant.value,
            "theta": list(self.theta),
            "x_lim": self.x_lim,
            "orientation": self.orientation.value,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ModelSpec":
        return cls(Variant(d["variant"]), tuple(d["theta"]), d.get("x_lim", 100.0),
                   Orientation(d.get("orientation", "increasing")))


def _make_shape(m: ModelSpec) -> gk.ShapeFunction:
    th = m.theta
    if m.variant is Variant.BNGP:
        return gk.WeibullBounded(m.x_lim, th[0], th[1], th[2])
    if m.variant is Variant.BTGP:
        return gk.Linear(th[0])
    return gk.PowerLaw(th[0], th[1])


# -- transforms (degradation units) -----------------------------------------
#
# Each entry: forward T(g), inverse G(x), log G'(x).  theta3 is always the
# kernel scale inside the transform; theta4 (if any) is the outer exponent.

_HALF_PI = 0.5 * math.pi


def _fwd_btgp(g, xl, th):
    return -xl * np.expm1(-((g / th[2]) ** th[1]))


def _inv_btgp(x, xl, th):
    return th[2] * (-np.log1p(-x / xl)) ** (1.0 / th[1])


def _ldinv_btgp(x, xl, th):
    L = -np.log1p(-x / xl)
    return math.log(th[2] / th[1]) - np.log(xl - x) + (1.0 / th[1] - 1.0) * np.log(L)


def _fwd_1(g, xl, th):
    return -xl * np.expm1(-g / th[2])


def _inv_1(x, xl, th):
    return -th[2] * np.log1p(-x / xl)


def _ldinv_1(x, xl, th):
    return math.log(th[2]) - np.log(xl - x)


def _fwd_2(g, xl, th):
    u = g / th[2]
    return xl * u / (1.0 + u)


def _inv_2(x, xl, th):
    return th[2] * x / (xl - x)


def _ldinv_2(x, xl, th):
    return math.log(th[2] * xl) - 2.0 * np.log(xl - x)


def _fwd_3(g, xl, th):
    return xl * np.arctan(g / th[2]) / _HALF_PI


def _inv_3(x, xl, th):
    return th[2] * np.tan(_HALF_PI * x / xl)


def _ldinv_3(x, xl, th):
    return math.log(th[2] * _HALF_PI / xl) - 2.0 * np.log(np.cos(_HALF_PI * x / xl))


def _fwd_4(g, xl, th):
    return xl * (-np.expm1(-g / th[2])) ** th[3]


def _inv_4(x, xl, th):
    w = (x / xl) ** (1.0 / th[3])
    return -th[2] * np.log1p(-w)


def _ldinv_4(x, xl, th):
    w = (x / xl) ** (1.0 / th[3])
    return math.log(th[2] / th[3]) - np.log1p(-w) + np.log(w) - np.log(x)


def _fwd_5(g, xl, th):
    v = (g / th[2]) ** th[3]
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(v > 1.0, xl / (1.0 + 1.0 / v), xl * v / (1.0 + v))


def _inv_5(x, xl, th):
    return th[2] * (x / (xl - x)) ** (1.0 / th[3])


def _ldinv_5(x, xl, th):
    v = x / (xl - x)
    return (math.log(th[2] * xl / th[3]) + (1.0 / th[3] - 1.0) * np.log(v)
            - 2.0 * np.log(xl - x))


def _fwd_6(g, xl, th):
    return xl * (np.arctan(g / th[2]) / _HALF_PI) ** th[3]


def _inv_6(x, xl, th):
    w = (x / xl) ** (1.0 / th[3])
    return th[2] * np.tan(_HALF_PI * w)


def _ldinv_6(x, xl, th):
    w = (x / xl) ** (1.0 / th[3])
    return (math.log(th[2] * _HALF_PI / th[3]) - 2.0 * np.log(np.cos(_HALF_PI * w))
            + np.log(w) - np.log(x))


# Complement forms ``x_lim - T(g)`` and their inverses, evaluated without
# cancellation; used for the decreasing orientation.


def _cmp_btgp(g, xl, th):
    return xl * np.exp(-((g / th[2]) ** th[1]))


def _icmp_btgp(c, xl, th):
    return th[2] * (math.log(xl) - np.log(c)) ** (1.0 / th[1])


def _cmp_1(g, xl, th):
    return xl * np.exp(-g / th[2])


def _icmp_1(c, xl, th):
    return th[2] * (math.log(xl) - np.log(c))


def _cmp_2(g, xl, th):
    return xl / (1.0 + g / th[2])


def _icmp_2(c, xl, th):
    return th[2] * (xl - c) / c


def _cmp_3(g, xl, th):
    return xl * np.arctan2(th[2], g) / _HALF_PI


def _icmp_3(c, xl, th):
    return th[2] / np.tan(_HALF_PI * c / xl)


def _cmp_4(g, xl, th):
    return -xl * np.expm1(th[3] * np.log1p(-np.exp(-g / th[2])))


def _icmp_4(c, xl, th):
    return -th[2] * np.log(-np.expm1(np.log1p(-c / xl) / th[3]))


def _cmp_5(g, xl, th):
    return xl / (1.0 + (g / th[2]) ** th[3])


def _icmp_5(c, xl, th):
    return th[2] * ((xl - c) / c) ** (1.0 / th[3])


def _cmp_6(g, xl, th):
    return -xl * np.expm1(th[3] * np.log1p(-np.arctan2(th[2], g) / _HALF_PI))


def _icmp_6(c, xl, th):
    return th[2] / np.tan(-_HALF_PI * np.expm1(np.log1p(-c / xl) / th[3]))


# forward, inverse, log|inverse'|, complement, inverse of complement
_TRANSFORMS: dict[Variant, tuple[Callable, ...]] = {
    Variant.BTGP: (_fwd_btgp, _inv_btgp, _ldinv_btgp, _cmp_btgp, _icmp_btgp),
    Variant.BTGP1: (_fwd_1, _inv_1, _ldinv_1, _cmp_1, _icmp_1),
    Variant.BTGP2: (_fwd_2, _inv_2, _ldinv_2, _cmp_2, _icmp_2),
    Variant.BTGP3: (_fwd_3, _inv_3, _ldinv_3, _cmp_3, _icmp_3),
    Variant.BTGP4: (_fwd_4, _inv_4, _ldinv_4, _cmp_4, _icmp_4),
    Variant.BTGP5: (_fwd_5, _inv_5, _ldinv_5, _cmp_5, _icmp_5),
    Variant.BTGP6: (_fwd_6, _inv_6, _ldinv_6, _cmp_6, _icmp_6),
}


def to_kernel(m: ModelSpec, x):
    """Degradation level -> kernel value (``x/theta1`` for BNGP)."""
    x = np.asarray(x, dtype=float)
    if m.variant is Variant.BNGP:
        return x / m.theta[0]
    with np.errstate(divide="ignore", invalid="ignore"):
        g = _TRANSFORMS[m.variant][1](x, m.x_lim, m.theta)
    return np.where(x >= m.x_lim, np.inf, np.where(x <= 0, 0.0, g))


def from_kernel(m: ModelSpec, g):
    """Kernel value -> degradation level (``theta1 * g`` for BNGP)."""
    g = np.asarray(g, dtype=float)
    if m.variant is Variant.BNGP:
        return m.theta[0] * g
    with np.errstate(over="ignore"):
        x = _TRANSFORMS[m.variant][0](g, m.x_lim, m.theta)
    return np.clip(x, 0.0, m.x_lim)


def log_abs_jacobian(m: ModelSpec, x):
    """``log |dG/dx|`` for a transformed variant, in degradation units."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return _TRANSFORMS[m.variant][2](x, m.x_lim, m.theta)


def _require_transformed(m: ModelSpec, op: str):
    if m.variant is Variant.BNGP:
        raise UnsupportedOperationError(f"{op} is not defined for BNGP (no state transform)")


def _ret(a):
    a = np.asarray(a)
    return a[()] if a.ndim == 0 else a


def transform(m: ModelSpec, g):
    """Map kernel value(s) ``g >= 0`` to the observable level in the model's orientation."""
    _require_transformed(m, "transform")
    g = np.asarray(g, dtype=float)
    if np.any(~(g >= 0)):
        raise DomainError("kernel value must be >= 0")
    return _ret(_observe(m, g))


def inverse_transform(m: ModelSpec, x):
    """Inverse of :func:`transform`; ``x`` is in the model's orientation."""
    _require_transformed(m, "inverse_transform")
    x = np.asarray(x, dtype=float)
    if m.orientation is Orientation.DECREASING:
        if np.any(~((x > 0) & (x <= m.x_lim))):
            raise DomainError(f"condition outside the invertible range (0, {m.x_lim}]")
        with np.errstate(divide="ignore"):
            g = _TRANSFORMS[m.variant][4](x, m.x_lim, m.theta)
        return _ret(np.where(x >= m.x_lim, 0.0, g))
    if np.any(~((x >= 0) & (x < m.x_lim))):
        raise DomainError(f"level outside the invertible range [0, {m.x_lim})")
    return _ret(to_kernel(m, x))


def _observe(m: ModelSpec, g):
    """Kernel value(s) -> level in the model's orientation."""
    if m.orientation is Orientation.DECREASING and m.variant is not Variant.BNGP:
        with np.errstate(over="ignore", divide="ignore"):
            c = _TRANSFORMS[m.variant][3](np.asarray(g, dtype=float), m.x_lim, m.theta)
        return np.clip(c, 0.0, m.x_lim)
    return m.from_degradation(from_kernel(m, g))


# -- densities --------------------------------------------------------------


def marginal_pdf(m: ModelSpec, t: float, x):
    """Density of the degradation level ``X(t)`` at ``x``."""
    if not t > 0:
        raise DomainError("t must be > 0")
    x = np.asarray(x, dtype=float)
    a = float(m.alpha(t))
    if m.variant is Variant.BNGP:
        if np.any(x < 0):
            raise DomainError("x must be >= 0")
        return _ret(np.exp(gk._logpdf(x, a, m.theta[0])))
    if np.any((x < 0) | (x > m.x_lim)):
        raise DomainError(f"x must lie in [0, {m.x_lim}]")
    inside = (x > 0) & (x < m.x_lim)
    xs = np.where(inside, x, 0.5 * m.x_lim)
    logf = gk._logpdf(to_kernel(m, xs), a) + log_abs_jacobian(m, xs)
    return _ret(np.where(inside, np.exp(logf), 0.0))


def increment_pdf(m: ModelSpec, t: float, dt: float, x_t: float, dx):
    """Density of ``X(t+dt) - X(t)`` at ``dx`` given ``X(t) = x_t``."""
    if not dt > 0:
        raise DomainError("dt must be > 0")
    if not t >= 0:
        raise DomainError("t must be >= 0")
    dx = np.asarray(dx, dtype=float)
    da = float(m.alpha(t + dt) - m.alpha(t))
    if m.variant is Variant.BNGP:
        if np.any(dx <= 0):
            raise DomainError("increment must be > 0")
        return _ret(np.exp(gk._logpdf(dx, da, m.theta[0])))
    if not 0 <= x_t < m.x_lim:
        raise DomainError(f"x_t must lie in [0, {m.x_lim})")
    if np.any((dx <= 0) | (dx >= m.x_lim - x_t)):
        raise DomainError(f"increment must lie in (0, {m.x_lim - x_t})")
    x1 = x_t + dx
    dg = to_kernel(m, x1) - to_kernel(m, x_t)
    return _ret(np.exp(gk._logpdf(dg, da) + log_abs_jacobian(m, x1)))


# -- moments ----------------------------------------------------------------

# The quantile function has logarithmic singularities at u = 0 and u = 1, so a
# single Gauss-Legendre panel converges slowly.  Eight panels (32 nodes each)
# shrinking geometrically toward both ends keep the node count at 256 while
# confining the singular behaviour to panels of negligible probability mass.
_PANEL_EDGES = np.array([0.0, 1e-6, 1e-3, 0.05, 0.5, 0.95, 1 - 1e-3, 1 - 1e-6, 1.0])


def _composite_rule(edges, per_panel: int = 32):
    x, w = np.polynomial.legendre.leggauss(per_panel)
    lo, hi = edges[:-1, None], edges[1:, None]
    return ((lo + (hi - lo) * 0.5 * (x + 1.0)).ravel(),
            (0.5 * (hi - lo) * w).ravel())


_GL_U, _GL_W = _composite_rule(_PANEL_EDGES)


def kernel_moments(m: ModelSpec, a: float) -> tuple[float, float]:
    """Mean and variance of ``T(G)`` for ``G ~ Gamma(a, 1)`` (degradation units).

    Composite Gauss-Legendre on the probability scale: ``E[T(G)] = int_0^1 T(Q(u)) du``.
    """
    if a <= 0:
        return 0.0, 0.0
    x = from_kernel(m, gk._quantile(_GL_U, a))
    mean = float(_GL_W @ x)
    var = float(_GL_W @ (x - mean) ** 2)
    return mean, var


def mean_variance(m: ModelSpec, t: float) -> tuple[float, float]:
    """Mean and variance of the degradation level at time ``t``."""
    if not t >= 0:
        raise DomainError("t must be >= 0")
    a = float(m.alpha(t))
    if m.variant is Variant.BNGP:
        return m.theta[0] * a, m.theta[0] ** 2 * a
    return kernel_moments(m, a)


# -- lifetime ---------------------------------------------------------------


def _check_threshold(m: ModelSpec, xi: float):
    if not 0 < xi < m.x_lim:
        raise DomainError(f"failure threshold must lie in (0, {m.x_lim}) in degradation units")


def survival(m: ModelSpec, xi: float, t):
    """``Pr(X(t) < xi)``: survival of the first-passage time over ``xi``."""
    _check_threshold(m, xi)
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("t must be >= 0")
    return _ret(gk._cdf(float(to_kernel(m, xi)), m.alpha(t)))


@dataclass(frozen=True)
class RemainingLife:
    """Distribution of the residual time to cross ``xi`` from state ``(t0, x0)``.

    ``defect`` is ``Pr(never crossing)``; it is positive for BNGP because its
    shape function is bounded.  ``mean`` and ``variance`` describe the
    crossing time conditional on a crossing occurring; ``survival`` is the
    unconditional curve and levels off at ``defect``.
    """

    model: ModelSpec
    t0: float
    x0: float
    xi: float
    clock: str
    mean: float
    variance: float
    defect: float
    horizon: float

    def survival(self, s):
        s = np.asarray(s, dtype=float)
        if self.x0 >= self.xi:
            return _ret(np.where(s < 0, 1.0, 0.0))
        return _ret(_rl_survival(self.model, self.t0, self.x0, self.xi, self.clock, s))

    @property
    def sd(self) -> float:
        return math.sqrt(self.variance)


def _rl_survival(m, t0, x0, xi, clock, s):
    s = np.maximum(np.asarray(s, dtype=float), 0.0)
    gap = float(to_kernel(m, xi) - to_kernel(m, x0))
    if clock == "age":
        da = m.alpha(t0 + s) - m.alpha(t0)
    else:
        da = m.alpha(s)
    return gk._cdf(gap, da)


def remaining_life(m: ModelSpec, t0: float, x0: float, xi: float, clock: str = "age",
                   horizon: float | None = None) -> RemainingLife:
    """Remaining-life distribution given the current age ``t0`` and level ``x0``.

    ``clock="age"`` propagates the shape function from the current age, which
    is the Markov-consistent conditional law.  ``clock="restart"`` restarts
    the shape function at zero from the current level; the two agree for
    the stationary-kernel BTGP and differ for every age-dependent variant.
    """
    _check_threshold(m, xi)
    if clock not in ("age", "restart"):
        raise InputError("clock must be 'age' or 'restart'")
    if not (t0 >= 0 and x0 >= 0):
        raise DomainError("t0 and x0 must be >= 0")
    if x0 >= xi:
        return RemainingLife(m, t0, x0, xi, clock, 0.0, 0.0, 0.0, 0.0)
    if clock == "age":
        limit_shape = m.shape_function.limit - float(m.alpha(t0))
    else:
        limit_shape = m.shape_function.limit
    gap = float(to_kernel(m, xi) - to_kernel(m, x0))
    defect = float(gk._cdf(gap, limit_shape)) if math.isfinite(limit_shape) else 0.0
    if defect >= 1.0 - 1e-12:
        raise DomainError("threshold is unreachable from the current state")

    def S(s):
        """Survival of the crossing time conditional on crossing at all."""
        raw = float(_rl_survival(m, t0, x0, xi, clock, s))
        return max(raw - defect, 0.0) / (1.0 - defect)

    if horizon is None:
        horizon = 1.0
        while S(horizon) > 1e-13 and horizon < 1e5:
            horizon *= 2.0
    edges = np.unique(np.concatenate([[0.0], np.geomspace(1e-3, horizon, 60)]))
    mean = sum(integrate.quad(S, a, b, epsabs=1e-12, epsrel=1e-10, limit=200)[0]
               for a, b in zip(edges[:-1], edges[1:]))
    m2 = sum(integrate.quad(lambda s: 2.0 * s * S(s), a, b, epsabs=1e-12, epsrel=1e-10,
                            limit=200)[0] for a, b in zip(edges[:-1], edges[1:]))
    return RemainingLife(m, t0, x0, xi, clock, mean, max(m2 - mean**2, 0.0), defect, horizon)


# -- simulation -------------------------------------------------------------


def _as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def kernel_paths(m: ModelSpec, grid, n: int, rng) -> np.ndarray:
    """Cumulative unit-scale kernel values on ``grid`` (shape ``(n, len(grid))``)."""
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 1 or grid[0] != 0:
        raise InputError("time grid must be a 1-D vector starting at 0")
    if np.any(np.diff(grid) <= 0):
        raise InputError("time grid must be strictly ascending")
    if n < 1:
        raise InputError("n must be >= 1")
    rng = _as_rng(rng)
    da = np.diff(m.alpha(grid))
    out = np.zeros((n, grid.size))
    if grid.size > 1:
        inc = rng.standard_gamma(np.broadcast_to(np.maximum(da, 0.0), (n, da.size)))
        np.cumsum(inc, axis=1, out=out[:, 1:])
    return out


def simulate_paths(m: ModelSpec, grid, n: int, rng) -> np.ndarray:
    """Exact sample paths on ``grid`` in the model's orientation.

    Returns an ``(n, len(grid))`` array.  Kernel increments are drawn exactly
    between grid points, so there is no discretisation error at the nodes.
    """
    return _observe(m, kernel_paths(m, grid, n, rng))
