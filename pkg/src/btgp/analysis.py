"""Derived analytics: MUMV, sensitivity grids, predictive bands and mean matching.

MUMV is the mean level at the time the variance peaks.  For every
transformed variant the marginal law of ``X(t)`` depends on time only through
the kernel shape ``tau = alpha(t)``, so the variance maximum is located over
``tau`` and mapped back to calendar time with the inverse shape function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from . import kernel as gk
from .errors import DomainError, InputError, NoInteriorMaximumError, OptimizationError
from .models import (
    ModelSpec,
    Orientation,
    Variant,
    _require_transformed,
    from_kernel,
    kernel_moments,
    mean_variance,
)

# -- MUMV -------------------------------------------------------------------


@dataclass(frozen=True)
class MumvResult:
    tau_star: float
    t_star: float
    max_variance: float
    mumv: float

    def as_dict(self) -> dict:
        return {"tau_star": self.tau_star, "t_star": self.t_star,
                "max_variance": self.max_variance, "mumv": self.mumv}


def mumv(m: ModelSpec, tau_range=(1e-3, 1e3), n_grid: int = 200,
         xtol: float = 1e-10) -> MumvResult:
    """Mean at maximum variance.

    A coarse scan over ``n_grid`` log-spaced kernel shapes in ``tau_range``
    brackets the maximum, which is then refined by golden-section search on
    ``log(tau)``.  The mean is reported in the model's orientation.

    Raises
    ------
    NoInteriorMaximumError
        If the variance peaks at either end of the scanned range.
    """
    _require_transformed(m, "mumv")
    lo, hi = tau_range
    if not (0 < lo < hi) or n_grid < 3:
        raise InputError("tau_range must satisfy 0 < lo < hi and n_grid >= 3")
    z = np.linspace(math.log(lo), math.log(hi), n_grid)
    var = np.array([kernel_moments(m, math.exp(v))[1] for v in z])
    i = int(np.argmax(var))
    if i == 0 or i == n_grid - 1:
        raise NoInteriorMaximumError(
            f"variance is monotone over tau in [{lo}, {hi}]", argmax_tau=float(math.exp(z[i])))
    neg = lambda v: -kernel_moments(m, math.exp(v))[1]  # noqa: E731
    res = optimize.minimize_scalar(neg, bracket=(z[i - 1], z[i], z[i + 1]), method="golden",
                                   tol=xtol)
    zs = float(res.x) if -res.fun >= var[i] else float(z[i])
    tau = math.exp(zs)
    mean, v = kernel_moments(m, tau)
    t_star = float(m.shape_function.inverse(tau))
    return MumvResult(tau, t_star, v, float(m.from_degradation(mean)))


@dataclass(frozen=True)
class MumvGrid:
    """``values[i, j]`` is the MUMV at ``(theta2[i], theta3[j])``; NaN where flagged."""

    theta2: np.ndarray
    theta3: np.ndarray
    values: np.ndarray
    flagged: np.ndarray
    theta1: float

    def rows(self):
        for i, a in enumerate(self.theta2):
            for j, b in enumerate(self.theta3):
                yield float(a), float(b), float(self.values[i, j]), bool(self.flagged[i, j])


def mumv_grid(theta2_range=(0.1, 4.0), theta3_range=(1.0, 100.0), resolution=(40, 40),
              theta1: float = 1.0, x_lim: float = 100.0,
              orientation=Orientation.DECREASING, variant=Variant.BTGP) -> MumvGrid:
    """MUMV over a linear ``theta2 x theta3`` grid at fixed ``theta1``.

    Cells whose MUMV cannot be located hold NaN and are marked in ``flagged``.
    """
    if np.ndim(resolution) == 0:
        resolution = (int(resolution), int(resolution))
    n2, n3 = (int(r) for r in resolution)
    if n2 < 2 or n3 < 2:
        raise InputError("resolution must be >= 2 per axis")
    if not (0 < theta2_range[0] <= theta2_range[1] and 0 < theta3_range[0] <= theta3_range[1]):
        raise InputError("parameter ranges must be positive and ordered")
    variant = Variant(variant)
    if variant.n_params != 3:
        raise InputError("mumv_grid supports the three-parameter variants")
    t2 = np.linspace(*theta2_range, n2)
    t3 = np.linspace(*theta3_range, n3)
    vals = np.full((n2, n3), np.nan)
    flags = np.zeros((n2, n3), dtype=bool)
    for i, a in enumerate(t2):
        for j, b in enumerate(t3):
            spec = ModelSpec(variant, (theta1, a, b), x_lim, orientation)
            try:
                vals[i, j] = mumv(spec).mumv
            except (NoInteriorMaximumError, DomainError):
                flags[i, j] = True
    return MumvGrid(t2, t3, vals, flags, theta1)


# -- predictive bands -------------------------------------------------------


@dataclass(frozen=True)
class Band:
    """Per-time ``lower <= mean <= upper`` in the model's orientation."""

    t: np.ndarray
    lower: np.ndarray
    mean: np.ndarray
    upper: np.ndarray
    variance: np.ndarray
    levels: tuple

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower


def _degradation_quantile(m: ModelSpec, q: float, a: float) -> float:
    if a <= 0:
        return 0.0
    g = float(gk.gamma_quantile(q, gk.GammaParams(a)))
    return float(from_kernel(m, g))


def predictive_band(m: ModelSpec, grid, levels=(0.025, 0.975)) -> Band:
    """Quantile band of ``X(t)`` along ``grid``.

    Quantiles of a monotone map are the map of the quantiles, so the band
    endpoints are the transformed kernel quantiles (scaled gamma quantiles
    for BNGP).  For a decreasing model the upper degradation quantile becomes
    the lower condition bound.
    """
    lo_q, hi_q = levels
    if not 0 < lo_q < hi_q < 1:
        raise InputError("levels must satisfy 0 < lower < upper < 1")
    t = np.asarray(grid, dtype=float)
    if t.ndim != 1 or np.any(t < 0):
        raise DomainError("grid must be a 1-D vector of times >= 0")
    a = np.asarray(m.alpha(t), dtype=float)
    ql = np.array([_degradation_quantile(m, lo_q, v) for v in a])
    qh = np.array([_degradation_quantile(m, hi_q, v) for v in a])
    mv = np.array([mean_variance(m, v) for v in t]).reshape(-1, 2)
    mean, var = mv[:, 0], mv[:, 1]
    if m.orientation is Orientation.DECREASING:
        lower, upper = m.x_lim - qh, m.x_lim - ql
        mean = m.x_lim - mean
    else:
        lower, upper = ql, qh
    return Band(t, lower, mean, upper, var, (lo_q, hi_q))


# -- mean-matched BNGP ------------------------------------------------------


@dataclass(frozen=True)
class MatchedBNGP:
    spec: ModelSpec
    grid: np.ndarray
    rms_residual: float
    sup_residual: float
    variance_rms: float


def _time_to_fraction(m: ModelSpec, frac: float) -> float:
    target = frac * m.x_lim
    hi = 1.0
    while mean_variance(m, hi)[0] < target:
        hi *= 2.0
        if hi > 1e7:
            raise OptimizationError("reference mean never reaches the target fraction of x_lim")
    return optimize.brentq(lambda s: mean_variance(m, s)[0] - target, 0.0, hi, xtol=1e-8)


def matched_mean_bngp(reference: ModelSpec, grid=None, n_grid: int = 200,
                      reach: float = 0.99) -> MatchedBNGP:
    """BNGP whose mean curve is the least-squares match of ``reference``.

    The BNGP mean ``x_lim (1 - exp(-(t/theta3)^theta2))`` does not involve
    ``theta1``, so ``theta2`` and ``theta3`` come from the mean match and
    ``theta1`` (which scales the BNGP variance ``theta1 * mean``) is then the
    closed-form least-squares fit to the reference variance curve.  The
    default grid runs from 0 to the time the reference mean reaches ``reach``
    of ``x_lim``.
    """
    if reference.variant is not Variant.BTGP:
        raise InputError("reference must be a proposed-BTGP model")
    if grid is None:
        grid = np.linspace(0.0, _time_to_fraction(reference, reach), n_grid)
    grid = np.asarray(grid, dtype=float)
    mv = np.array([mean_variance(reference, s) for s in grid])
    ref_mean, ref_var = mv[:, 0], mv[:, 1]
    xl = reference.x_lim
    t_e = _time_to_fraction(reference, 1.0 - math.exp(-1.0))

    def bngp_mean(z):
        th2, th3 = np.exp(z)
        return -xl * np.expm1(-((grid / th3) ** th2))

    res = optimize.least_squares(lambda z: bngp_mean(z) - ref_mean, [0.0, math.log(t_e)],
                                 xtol=1e-12, ftol=1e-12, gtol=1e-12)
    if not res.success:
        raise OptimizationError("mean-curve least squares failed",
                                residual=float(np.sqrt(np.mean(res.fun**2))))
    th2, th3 = (float(v) for v in np.exp(res.x))
    mb = bngp_mean(res.x)
    th1 = float(ref_var @ mb / (mb @ mb))
    spec = ModelSpec(Variant.BNGP, (th1, th2, th3), xl, reference.orientation)
    resid = mb - ref_mean
    return MatchedBNGP(spec, grid, float(np.sqrt(np.mean(resid**2))),
                       float(np.max(np.abs(resid))),
                       float(np.sqrt(np.mean((th1 * mb - ref_var) ** 2))))
