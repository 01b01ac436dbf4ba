"""Age-based (ABR) and condition-based (CBR) replacement by renewal theory.

Thresholds are in degradation units throughout (failure when the degradation
reaches ``xi``; preventive replacement when an inspection finds it in
``[xi_R, xi)``).  Condition-index thresholds are converted by the caller,
e.g. BCI 40 on a 0-100 scale is degradation 60.

CBR convention: a failure that occurs inside ``((n-1) t_I, n t_I]`` is found
at inspection ``n`` and the cycle ends there, costing ``C_F + (n-1) C_I``; a
preventive replacement at inspection ``n`` costs ``C_R + n C_I``.  The cycle
length is ``n t_I`` in both cases.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize

from . import kernel as gk
from .errors import (
    DegeneratePolicyError,
    DomainError,
    InputError,
    OptimizationError,
    TruncationError,
)
from .models import ModelSpec, _as_rng, kernel_paths, survival, to_kernel

__all__ = [
    "CostConfig",
    "PolicyOptimum",
    "ABRPolicy",
    "CBRPolicy",
    "CBRProbabilities",
    "CBRSurface",
    "MonteCarloEstimate",
    "abr_rate",
    "optimize_abr",
    "cbr_probabilities",
    "cbr_rate",
    "cbr_surface",
    "optimize_cbr",
    "simulate_policy",
    "threshold_sweep",
]


@dataclass(frozen=True)
class CostConfig:
    c_inspect: float = 1.0
    c_preventive: float = 100.0
    c_failure: float = 500.0

    def __post_init__(self):
        for name in ("c_inspect", "c_preventive", "c_failure"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise InputError(f"{name} must be finite and >= 0, got {v!r}")
        if self.c_failure < self.c_preventive:
            warnings.warn("failure replacement is cheaper than preventive replacement",
                          stacklevel=3)

    def scaled(self, k: float) -> "CostConfig":
        return CostConfig(k * self.c_inspect, k * self.c_preventive, k * self.c_failure)

    def normalized(self) -> tuple["CostConfig", float]:
        """Costs divided by the largest one, and that divisor.

        Optimisers search on the normalised costs so that scaling every cost
        by the same factor leaves the returned decision variables unchanged.
        """
        unit = max(self.c_inspect, self.c_preventive, self.c_failure) or 1.0
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return CostConfig(self.c_inspect / unit, self.c_preventive / unit,
                              self.c_failure / unit), unit


@dataclass(frozen=True)
class ABRPolicy:
    t_R: float


@dataclass(frozen=True)
class CBRPolicy:
    t_I: float
    xi_R: float


@dataclass
class PolicyOptimum:
    """Optimised decision variables with the minimised long-run cost rate.

    ``search_trace`` holds the evaluated grid: ``t_R``/``rate`` for ABR,
    ``t_I``/``xi_R``/``rate`` (rate matrix indexed ``[t_I, xi_R]``) for CBR.
    """

    kind: str
    rate: float
    t_R: float | None = None
    t_I: float | None = None
    xi_R: float | None = None
    search_trace: dict = field(default_factory=dict, repr=False, compare=False)

    def as_dict(self) -> dict:
        out = {"kind": self.kind, "rate": self.rate}
        if self.kind == "ABR":
            out["t_R"] = self.t_R
        else:
            out.update(t_I=self.t_I, xi_R=self.xi_R)
        return out


def _check_xi(m: ModelSpec, xi: float):
    if not 0 < xi < m.x_lim:
        raise DomainError(f"failure threshold must lie in (0, {m.x_lim}) in degradation units")


# -- ABR --------------------------------------------------------------------


def _integrated_survival(m: ModelSpec, xi: float, t: float) -> float:
    f = lambda s: float(survival(m, xi, s))  # noqa: E731
    return integrate.quad(f, 0.0, t, epsabs=0.0, epsrel=1e-10, limit=200)[0]


def abr_rate(m: ModelSpec, xi: float, costs: CostConfig, t_R: float) -> float:
    """Long-run cost rate of replacing at age ``t_R`` or at failure."""
    _check_xi(m, xi)
    if not t_R > 0:
        raise DomainError("replacement age must be > 0")
    denom = _integrated_survival(m, xi, t_R)
    if denom < 1e-12:
        raise DegeneratePolicyError("expected cycle length is numerically zero", t_R=t_R)
    s = float(survival(m, xi, t_R))
    return (costs.c_preventive * s + costs.c_failure * (1.0 - s)) / denom


_GL8_X, _GL8_W = np.polynomial.legendre.leggauss(8)


def _cumulative_survival(m: ModelSpec, xi: float, grid: np.ndarray) -> np.ndarray:
    """``int_0^t S`` at every grid node (quad on the first cell, 8-point GL after)."""
    out = np.empty_like(grid)
    out[0] = _integrated_survival(m, xi, grid[0])
    a, b = grid[:-1], grid[1:]
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    pts = mid[:, None] + half[:, None] * _GL8_X[None, :]
    vals = survival(m, xi, pts.ravel()).reshape(pts.shape)
    out[1:] = out[0] + np.cumsum(half * (vals @ _GL8_W))
    return out


def optimize_abr(m: ModelSpec, xi: float, costs: CostConfig, t_min: float = 1.0,
                 t_max: float = 150.0, step: float = 0.1) -> PolicyOptimum:
    """Grid scan of the ABR rate followed by bounded refinement around the best node."""
    _check_xi(m, xi)
    if not (0 < t_min < t_max) or step <= 0:
        raise InputError("need 0 < t_min < t_max and step > 0")
    costs, unit = costs.normalized()
    n = int(round((t_max - t_min) / step))
    grid = t_min + step * np.arange(n + 1)
    denom = _cumulative_survival(m, xi, grid)
    s = survival(m, xi, grid)
    with np.errstate(divide="ignore", invalid="ignore"):
        rates = (costs.c_preventive * s + costs.c_failure * (1.0 - s)) / denom
    rates = np.where(denom > 1e-12, rates, np.nan)
    if not np.any(np.isfinite(rates)):
        raise OptimizationError("ABR objective is not finite anywhere on the grid")
    i = int(np.nanargmin(rates))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, n)]
    obj = lambda t: abr_rate(m, xi, costs, t)  # noqa: E731
    best_t = float(grid[i])
    if hi > lo:
        res = optimize.minimize_scalar(obj, bounds=(lo, hi), method="bounded",
                                       options={"xatol": 1e-6})
        if res.fun < obj(best_t):
            best_t = float(res.x)
    return PolicyOptimum("ABR", unit * obj(best_t), t_R=best_t,
                         search_trace={"t_R": grid, "rate": unit * rates})


# -- CBR --------------------------------------------------------------------


@dataclass(frozen=True)
class CBRProbabilities:
    """``p_R[n-1]``/``p_f[n-1]``: preventive/failure replacement at inspection ``n``."""

    p_R: np.ndarray
    p_f: np.ndarray
    residual: float

    @property
    def n(self) -> np.ndarray:
        return np.arange(1, self.p_R.size + 1)

    @property
    def total(self) -> float:
        return float(self.p_R.sum() + self.p_f.sum())

    def sums(self) -> tuple[float, float, float]:
        """(sum p_R, sum p_f, sum n (p_R + p_f))."""
        n = self.n
        return float(self.p_R.sum()), float(self.p_f.sum()), float(n @ (self.p_R + self.p_f))


def _cell_step(mass, a, h, N, kf, pts):
    """Propagate cell masses over one inspection interval.

    Each cell's mass is taken as uniform over the cell; the transition
    probabilities are then exact second differences of the integrated gamma
    CDF.  Returns (new cell masses, preventive mass, failure mass).
    """
    P = gk.integrated_cdf(pts, a)  # at (k-1) h, k = 0..N+1
    w = (P[2:] - 2.0 * P[1:-1] + P[:-2]) / h
    new = np.convolve(mass, w)[:N]
    s = h * np.arange(N)
    keep_f = (gk.integrated_cdf(kf - s, a) - gk.integrated_cdf(kf - s - h, a)) / h
    keep_r = (P[N + 1:1:-1] - P[N:0:-1]) / h
    fail = float(mass @ (1.0 - keep_f))
    pr = float(mass @ (keep_f - keep_r))
    return np.maximum(new, 0.0), max(pr, 0.0), max(fail, 0.0)


def _cbr_recursion(m: ModelSpec, kf: float, kr: float, t_I: float, n_cells: int,
                   tol: float, n_max: int) -> CBRProbabilities:
    N = n_cells
    h = kr / N
    edges = h * np.arange(N + 1)
    pts = h * np.arange(-1, N + 1)
    p_R, p_f = [], []
    mass = None
    cache_a, cache = None, None
    for n in range(1, n_max + 1):
        a = float(m.alpha(n * t_I) - m.alpha((n - 1) * t_I))
        if mass is None:
            F = gk._cdf(edges, a)
            mass = np.diff(F)
            Ff = float(gk._cdf(kf, a))
            p_f.append(1.0 - Ff)
            p_R.append(max(Ff - F[-1], 0.0) if kr < kf else 0.0)
        elif a <= 0.0:
            p_f.append(0.0)
            p_R.append(0.0)
        else:
            mass, pr, fail = _cell_step(mass, a, h, N, kf, pts)
            p_R.append(pr if kr < kf else 0.0)
            p_f.append(fail)
        residual = float(mass.sum())
        if residual < tol:
            break
    return CBRProbabilities(np.array(p_R), np.array(p_f), residual)


def _default_n_max(t_I: float) -> int:
    return max(200, int(math.ceil(3000.0 / t_I)))


def cbr_probabilities(m: ModelSpec, xi: float, xi_R: float, t_I: float,
                      n_max: int | None = None, n_cells: int = 400,
                      tol: float = 1e-6) -> CBRProbabilities:
    """Replacement probabilities per inspection by forward recursion on a state grid.

    The unreplaced state is tracked in kernel units on ``n_cells`` cells over
    ``[0, G(xi_R))``; mass crossing ``G(xi)`` is failure, mass landing in
    between is preventive replacement.  Stops once the unabsorbed mass drops
    below ``tol``; raises :class:`TruncationError` if ``n_max`` comes first.
    """
    _check_xi(m, xi)
    if not 0 < xi_R <= xi:
        raise DomainError("preventive threshold must satisfy 0 < xi_R <= xi (degradation units)")
    if not t_I > 0:
        raise DomainError("inspection interval must be > 0")
    cap = _default_n_max(t_I) if n_max is None else int(n_max)
    kf, kr = float(to_kernel(m, xi)), float(to_kernel(m, xi_R))
    res = _cbr_recursion(m, kf, kr, t_I, n_cells, tol, cap)
    if res.residual >= tol:
        raise TruncationError(
            f"unabsorbed mass {res.residual:.3g} after {res.p_R.size} inspections; raise n_max",
            residual=res.residual, n_max=cap)
    return res


def _cbr_rate_from_sums(sums, t_I: float, costs: CostConfig) -> float:
    pr, pf, en = sums
    num = costs.c_preventive * pr + costs.c_failure * pf + costs.c_inspect * (en - pf)
    return num / (t_I * en)


def cbr_rate(m: ModelSpec, xi: float, xi_R: float, t_I: float, costs: CostConfig,
             **kw) -> float:
    """Long-run cost rate of periodic inspection with preventive threshold ``xi_R``.

    Expected cycle cost over expected cycle length ``t_I * sum n (p_R + p_f)``.
    """
    probs = cbr_probabilities(m, xi, xi_R, t_I, **kw)
    return _cbr_rate_from_sums(probs.sums(), t_I, costs)


@dataclass
class CBRSurface:
    """Cost-free summaries of the CBR recursion on a ``(t_I, xi_R)`` grid.

    The rate is linear in the costs given ``(sum p_R, sum p_f, sum n p)``, so
    one surface serves every cost configuration.  Cells whose recursion was
    truncated hold NaN.
    """

    xi: float
    t_I: np.ndarray
    xi_R: np.ndarray
    pr: np.ndarray
    pf: np.ndarray
    en: np.ndarray

    def rates(self, costs: CostConfig) -> np.ndarray:
        num = (costs.c_preventive * self.pr + costs.c_failure * self.pf
               + costs.c_inspect * (self.en - self.pf))
        return num / (self.t_I[:, None] * self.en)


def _grid(lo, hi, step):
    n = int(round((hi - lo) / step))
    return lo + step * np.arange(n + 1)


def default_xi_R_grid(m: ModelSpec, xi: float) -> np.ndarray:
    """Integer degradation levels ``1 .. ceil(xi) - 1`` (integer condition steps)."""
    return np.arange(1.0, math.ceil(xi))


def cbr_surface(m: ModelSpec, xi: float, t_I_grid=None, xi_R_grid=None, n_cells: int = 400,
                tol: float = 1e-6) -> CBRSurface:
    _check_xi(m, xi)
    t_I_grid = _grid(0.5, 20.0, 0.1) if t_I_grid is None else np.asarray(t_I_grid, float)
    xi_R_grid = default_xi_R_grid(m, xi) if xi_R_grid is None else np.asarray(xi_R_grid, float)
    if t_I_grid.size == 0 or xi_R_grid.size == 0:
        raise InputError("CBR search grids must be nonempty")
    if np.any(t_I_grid <= 0) or np.any((xi_R_grid <= 0) | (xi_R_grid > xi)):
        raise DomainError("grid values outside the policy domain")
    shape = (t_I_grid.size, xi_R_grid.size)
    pr, pf, en = np.full(shape, np.nan), np.full(shape, np.nan), np.full(shape, np.nan)
    kf = float(to_kernel(m, xi))
    for j, xr in enumerate(xi_R_grid):
        kr = float(to_kernel(m, xr))
        for i, tI in enumerate(t_I_grid):
            res = _cbr_recursion(m, kf, kr, tI, n_cells, tol, _default_n_max(tI))
            if res.residual < tol:
                pr[i, j], pf[i, j], en[i, j] = res.sums()
    return CBRSurface(xi, t_I_grid, xi_R_grid, pr, pf, en)


def optimize_cbr(m: ModelSpec, xi: float, costs: CostConfig, t_I_grid=None, xi_R_grid=None,
                 surface: CBRSurface | None = None, refine: bool = True,
                 n_cells: int = 400) -> PolicyOptimum:
    """Exhaustive grid search over ``(t_I, xi_R)`` then refinement of ``t_I``.

    Ties go to the smaller ``t_I``, then the smaller (more cautious) ``xi_R``.
    Refinement is a bounded 1-D search on ``t_I`` at the best ``xi_R`` and its
    two grid neighbours.  Pass a precomputed ``surface`` to reuse the
    recursion across cost configurations.
    """
    if surface is None:
        surface = cbr_surface(m, xi, t_I_grid, xi_R_grid, n_cells=n_cells)
    costs, unit = costs.normalized()
    rates = surface.rates(costs)
    if not np.any(np.isfinite(rates)):
        raise OptimizationError("CBR objective is not finite anywhere on the grid")
    i, j = np.unravel_index(int(np.nanargmin(rates)), rates.shape)
    best = (float(rates[i, j]), float(surface.t_I[i]), float(surface.xi_R[j]))
    if refine:
        dt = np.diff(surface.t_I).min() if surface.t_I.size > 1 else 0.0
        for jj in range(max(j - 1, 0), min(j + 2, surface.xi_R.size)):
            col = rates[:, jj]
            if not np.any(np.isfinite(col)):
                continue
            ii = int(np.nanargmin(col))
            xr = float(surface.xi_R[jj])
            lo = max(float(surface.t_I[ii]) - dt, 1e-3)
            hi = float(surface.t_I[ii]) + dt
            if hi <= lo:
                continue
            obj = lambda t: _safe_cbr(m, xi, xr, t, costs, n_cells)  # noqa: E731
            res = optimize.minimize_scalar(obj, bounds=(lo, hi), method="bounded",
                                           options={"xatol": 1e-4})
            if res.fun < best[0] - 1e-12:
                best = (float(res.fun), float(res.x), xr)
    rate = unit * cbr_rate(m, xi, best[2], best[1], costs, n_cells=n_cells)
    return PolicyOptimum("CBR", rate, t_I=best[1], xi_R=best[2],
                         search_trace={"t_I": surface.t_I, "xi_R": surface.xi_R,
                                       "rate": unit * rates})


def _safe_cbr(m, xi, xr, t, costs, n_cells):
    try:
        return cbr_rate(m, xi, xr, t, costs, n_cells=n_cells)
    except TruncationError:
        return math.inf


# -- Monte Carlo oracle -----------------------------------------------------


@dataclass(frozen=True)
class MonteCarloEstimate:
    """Renewal-reward estimate ``sum cost / sum length`` with a delta-method s.e."""

    rate: float
    se: float
    n_cycles: int
    mean_cycle_length: float
    mean_cycle_cost: float
    counts: dict = field(default_factory=dict, repr=False)


def _ratio_estimate(cost, length, counts=None) -> MonteCarloEstimate:
    n = cost.size
    r = cost.sum() / length.sum()
    if n > 1:
        resid = cost - r * length
        se = math.sqrt(resid.var(ddof=1) / n) / length.mean()
    else:
        se = math.inf
    return MonteCarloEstimate(float(r), float(se), int(n), float(length.mean()),
                              float(cost.mean()), counts or {})


def simulate_policy(m: ModelSpec, policy: ABRPolicy | CBRPolicy, xi: float, costs: CostConfig,
                    n_cycles: int, rng, dt: float = 0.05, batch: int = 5000) -> MonteCarloEstimate:
    """Estimate a policy's long-run cost rate by simulating renewal cycles.

    ABR cycles are simulated on a time grid of step ``dt``; the failure time
    is the midpoint of the grid cell in which the path first reaches ``xi``.
    CBR cycles only need the state at inspection epochs and are exact.
    For CBR, ``counts`` holds per-inspection replacement frequencies.
    """
    _check_xi(m, xi)
    if n_cycles < 1:
        raise InputError("n_cycles must be >= 1")
    rng = _as_rng(rng)
    kf = float(to_kernel(m, xi))
    if isinstance(policy, ABRPolicy):
        return _simulate_abr(m, policy.t_R, kf, costs, n_cycles, rng, dt, batch)
    if isinstance(policy, CBRPolicy):
        if not 0 < policy.xi_R <= xi:
            raise DomainError("preventive threshold must satisfy 0 < xi_R <= xi")
        return _simulate_cbr(m, policy, kf, costs, n_cycles, rng)
    raise InputError(f"unknown policy {policy!r}")


def _simulate_abr(m, t_R, kf, costs, n_cycles, rng, dt, batch):
    if not t_R > 0:
        raise DomainError("replacement age must be > 0")
    grid = np.linspace(0.0, t_R, max(int(math.ceil(t_R / dt)), 1) + 1)
    cost = np.empty(n_cycles)
    length = np.empty(n_cycles)
    for start in range(0, n_cycles, batch):
        k = min(batch, n_cycles - start)
        g = kernel_paths(m, grid, k, rng)
        crossed = g >= kf
        failed = crossed[:, -1]
        idx = np.argmax(crossed, axis=1)
        t_fail = 0.5 * (grid[np.maximum(idx - 1, 0)] + grid[idx])
        cost[start:start + k] = np.where(failed, costs.c_failure, costs.c_preventive)
        length[start:start + k] = np.where(failed, t_fail, t_R)
    return _ratio_estimate(cost, length)


def _simulate_cbr(m, policy, kf, costs, n_cycles, rng):
    t_I = policy.t_I
    kr = float(to_kernel(m, policy.xi_R))
    g = np.zeros(n_cycles)
    active = np.arange(n_cycles)
    cost = np.empty(n_cycles)
    length = np.empty(n_cycles)
    n_pr, n_f = [], []
    n = 0
    while active.size:
        n += 1
        a = float(m.alpha(n * t_I) - m.alpha((n - 1) * t_I))
        if a > 0:
            g[active] += rng.standard_gamma(a, size=active.size)
        ga = g[active]
        fail = ga >= kf
        prev = (ga >= kr) & ~fail
        cost[active[fail]] = costs.c_failure + (n - 1) * costs.c_inspect
        cost[active[prev]] = costs.c_preventive + n * costs.c_inspect
        length[active[fail | prev]] = n * t_I
        n_f.append(int(fail.sum()))
        n_pr.append(int(prev.sum()))
        active = active[~(fail | prev)]
        if n > _default_n_max(t_I):
            raise TruncationError("simulated cycles did not renew within the horizon",
                                  remaining=int(active.size))
    counts = {"p_R": np.array(n_pr) / n_cycles, "p_f": np.array(n_f) / n_cycles}
    return _ratio_estimate(cost, length, counts)


# -- sensitivity ------------------------------------------------------------


def threshold_sweep(m: ModelSpec, costs: CostConfig, xi_values, kind: str = "ABR",
                    **grid_options) -> list[tuple[float, PolicyOptimum]]:
    """Optimal policy for each failure threshold (degradation units)."""
    kind = kind.upper()
    if kind not in ("ABR", "CBR"):
        raise InputError("kind must be 'ABR' or 'CBR'")
    rows = []
    for xi in xi_values:
        if kind == "ABR":
            rows.append((float(xi), optimize_abr(m, float(xi), costs, **grid_options)))
        else:
            rows.append((float(xi), optimize_cbr(m, float(xi), costs, **grid_options)))
    return rows
