"""Maximum-likelihood fitting, AIC model selection and the best-model census.

Inspection histories are stored on the user's scale (a condition index for
``Orientation.DECREASING`` models).  The likelihood converts each record to
degradation units and anchors every asset at ``(t=0, x=0)``.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import optimize
from scipy.stats import qmc

from . import kernel as gk
from .errors import CensusError, DataError, FitError, InputError, SelectionError
from .models import (
    VARIANT_ORDER,
    ModelSpec,
    Orientation,
    Variant,
    log_abs_jacobian,
    to_kernel,
)

# -- data -------------------------------------------------------------------


@dataclass(frozen=True)
class CleanseReport:
    dropped: tuple = ()
    merged: tuple = ()
    eligible: bool = True

    def as_dict(self) -> dict:
        return {"dropped": [list(r) for r in self.dropped],
                "merged": [list(r) for r in self.merged], "eligible": self.eligible}


@dataclass(frozen=True)
class AssetHistory:
    """Ordered ``(age, condition)`` inspection records of one asset."""

    asset_id: str
    records: tuple
    x_lim: float = 100.0
    report: CleanseReport | None = field(default=None, compare=False)

    def __post_init__(self):
        recs = tuple((float(a), float(c)) for a, c in self.records)
        object.__setattr__(self, "records", recs)
        object.__setattr__(self, "asset_id", str(self.asset_id))
        ages = [a for a, _ in recs]
        if recs and ages[0] < 0:
            raise DataError(f"asset {self.asset_id}: negative age", asset_id=self.asset_id)
        for k in range(1, len(recs)):
            if not ages[k] > ages[k - 1]:
                raise DataError(f"asset {self.asset_id}: ages must be strictly increasing "
                                f"(record {k})", asset_id=self.asset_id, record=k)
        for k, (_, c) in enumerate(recs):
            if not (0.0 <= c <= self.x_lim):
                raise DataError(f"asset {self.asset_id}: condition {c} outside [0, {self.x_lim}] "
                                f"(record {k})", asset_id=self.asset_id, record=k)

    @property
    def ages(self) -> np.ndarray:
        return np.array([a for a, _ in self.records])

    @property
    def conditions(self) -> np.ndarray:
        return np.array([c for _, c in self.records])

    def __len__(self) -> int:
        return len(self.records)


def cleanse(history: AssetHistory,
            orientation: Orientation = Orientation.DECREASING) -> AssetHistory:
    """Keep the longest monotone prefix of a raw history.

    Walking forward from the first record, a record that continues the
    deterioration is kept; one with an identical reading replaces its
    predecessor (the later timestamp survives); the first reversal ends the
    prefix and everything after it is dropped.  The returned history carries
    a :class:`CleanseReport`; it is ineligible if fewer than two records
    survive.
    """
    orientation = Orientation(orientation)
    sign = -1.0 if orientation is Orientation.DECREASING else 1.0
    kept: list[tuple[float, float]] = []
    dropped, merged = [], []
    recs = list(history.records)
    for k, (age, cond) in enumerate(recs):
        if not kept:
            kept.append((age, cond))
            continue
        step = sign * (cond - kept[-1][1])
        if step > 0:
            kept.append((age, cond))
        elif step == 0:
            merged.append((kept[-1][0], age, cond))
            kept[-1] = (age, cond)
        else:
            dropped.extend((a, c, "after reversal") for a, c in recs[k:])
            break
    report = CleanseReport(tuple(dropped), tuple(merged), len(kept) >= 2)
    return AssetHistory(history.asset_id, tuple(kept), history.x_lim, report)


# -- likelihood -------------------------------------------------------------


@dataclass(frozen=True)
class Increments:
    """Flattened increments of a set of histories in degradation units."""

    t0: np.ndarray
    t1: np.ndarray
    x0: np.ndarray
    x1: np.ndarray
    asset_index: np.ndarray
    prev: np.ndarray  # index into x1 of the previous reading, -1 for the anchor

    @property
    def n(self) -> int:
        return self.t0.size


def increments(m: ModelSpec, histories) -> Increments:
    t0, t1, x0, x1, idx, prev = [], [], [], [], [], []
    for i, h in enumerate(histories):
        if h.x_lim != m.x_lim:
            raise DataError(f"asset {h.asset_id}: x_lim {h.x_lim} differs from model {m.x_lim}",
                            asset_id=h.asset_id)
        prev_t, prev_x = 0.0, 0.0
        count = 0
        for k, (age, cond) in enumerate(h.records):
            d = float(m.to_degradation(cond))
            if d == 0.0 and prev_x == 0.0:
                # a pristine reading ties with the anchor: keep the later time
                prev_t = age
                continue
            if age <= prev_t:
                raise DataError(f"asset {h.asset_id}: nonzero degradation at age 0",
                                asset_id=h.asset_id, record=k)
            if not d > prev_x:
                raise DataError(
                    f"asset {h.asset_id}: non-positive increment at record {k} "
                    f"(age {age}); cleanse the history first",
                    asset_id=h.asset_id, record=k, age=age)
            if m.variant.transformed and d >= m.x_lim:
                raise DataError(f"asset {h.asset_id}: reading at the bound x_lim (record {k})",
                                asset_id=h.asset_id, record=k, age=age)
            t0.append(prev_t)
            t1.append(age)
            x0.append(prev_x)
            x1.append(d)
            idx.append(i)
            prev.append(len(x1) - 2 if count else -1)
            prev_t, prev_x = age, d
            count += 1
        if count == 0:
            raise DataError(f"asset {h.asset_id}: no usable increments", asset_id=h.asset_id)
    arr = lambda v: np.asarray(v, dtype=float)  # noqa: E731
    return Increments(arr(t0), arr(t1), arr(x0), arr(x1), np.asarray(idx, dtype=int),
                      np.asarray(prev, dtype=int))


def _loglik(m: ModelSpec, inc: Increments) -> float:
    da = m.alpha(inc.t1) - m.alpha(inc.t0)
    if m.variant is Variant.BNGP:
        ll = gk._logpdf(inc.x1 - inc.x0, da, m.theta[0])
    else:
        g1 = to_kernel(m, inc.x1)
        g0 = np.append(g1, 0.0)[inc.prev]
        ll = gk._logpdf(g1 - g0, da) + log_abs_jacobian(m, inc.x1)
    return float(np.sum(ll))


def log_likelihood(m: ModelSpec, histories) -> float:
    """Sum over assets and inspections of the log increment density."""
    return _loglik(m, increments(m, histories))


# -- fitting ----------------------------------------------------------------

# log-space boxes for Latin-hypercube starts
_START_BOX = {
    Variant.BNGP: [(0.05, 20.0), (0.3, 4.0), (5.0, 300.0)],
    Variant.BTGP: [(0.05, 20.0), (0.3, 4.0), (1.0, 1000.0)],
}
_POWER_BOX = [(0.05, 50.0), (0.3, 3.0), (0.1, 1000.0), (0.3, 3.0)]


def start_box(variant: Variant) -> list[tuple[float, float]]:
    variant = Variant(variant)
    return _START_BOX.get(variant, _POWER_BOX[: variant.n_params])


@dataclass(frozen=True)
class FitOptions:
    """Multi-start Nelder-Mead settings (search runs over ``log(theta)``).

    A run stops when the simplex diameter drops below ``xatol`` (``fatol`` is
    infinite by default, so only the diameter counts) or after ``max_iter``
    iterations.  ``agree_tol`` is the log-likelihood gap within which a
    second start must confirm the optimum for the fit to count as converged.
    """

    n_starts: int = 8
    max_iter: int = 2000
    xatol: float = 1e-8
    fatol: float = math.inf
    seed: int = 0
    orientation: Orientation = Orientation.INCREASING
    agree_tol: float = 1e-4
    hessian_step: float = 1e-4
    compute_se: bool = True


@dataclass(frozen=True)
class FittedModel:
    spec: ModelSpec
    loglik: float
    aic: float
    n_params: int
    converged: bool
    n_increments: int
    log_theta_se: tuple | None = None
    starts: tuple = field(default=(), repr=False)

    def as_dict(self) -> dict:
        return {
            "model": self.spec.as_dict(),
            "loglik": self.loglik,
            "aic": self.aic,
            "n_params": self.n_params,
            "converged": self.converged,
            "n_increments": self.n_increments,
            "log_theta_se": None if self.log_theta_se is None else list(self.log_theta_se),
            "log_theta_se_approximate": True,
        }


def aic(loglik: float, n_params: int) -> float:
    return 2.0 * n_params - 2.0 * loglik


def _starts(variant: Variant, n: int, seed: int) -> np.ndarray:
    box = np.log(np.array(start_box(variant)))
    u = qmc.LatinHypercube(d=variant.n_params, seed=seed).random(n)
    return box[:, 0] + u * (box[:, 1] - box[:, 0])


def _numerical_hessian(f, x, h):
    k = x.size
    H = np.empty((k, k))
    f0 = f(x)
    for i in range(k):
        ei = np.zeros(k)
        ei[i] = h
        H[i, i] = (f(x + ei) - 2.0 * f0 + f(x - ei)) / h**2
        for j in range(i + 1, k):
            ej = np.zeros(k)
            ej[j] = h
            H[i, j] = H[j, i] = (f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej)
                                 + f(x - ei - ej)) / (4.0 * h**2)
    return H


def fit_mle(variant, histories, x_lim: float = 100.0,
            options: FitOptions | None = None) -> FittedModel:
    """Maximise the likelihood over ``log(theta)`` from Latin-hypercube starts."""
    options = options or FitOptions()
    variant = Variant(variant)
    histories = list(histories)
    if not histories:
        raise InputError("no histories to fit")
    template = ModelSpec(variant, (1.0,) * variant.n_params, x_lim, options.orientation)
    inc = increments(template, histories)

    def nll(z):
        try:
            ll = _loglik(template.with_theta(np.exp(z)), inc)
        except (ValueError, FloatingPointError):
            return 1e300
        return -ll if math.isfinite(ll) else 1e300

    runs = []
    for z0 in _starts(variant, options.n_starts, options.seed):
        simplex = np.vstack([z0, z0 + 0.5 * np.eye(z0.size)])
        with np.errstate(all="ignore"):
            res = optimize.minimize(nll, z0, method="Nelder-Mead", options={
                "maxiter": options.max_iter, "xatol": options.xatol, "fatol": options.fatol,
                "initial_simplex": simplex})
        runs.append((float(res.fun), res.x, int(res.nit), bool(res.success)))
    finite = [r for r in runs if r[0] < 1e299]
    if not finite:
        raise FitError(f"{variant.value}: likelihood non-finite from every start",
                       variant=variant.value, starts=len(runs))
    best = min(finite, key=lambda r: r[0])
    others = [r for r in finite if r is not best]
    agree = (not others) or any(abs(r[0] - best[0]) <= options.agree_tol for r in others)
    converged = best[3] and agree
    spec = template.with_theta(np.exp(best[1]))
    ll = -best[0]
    se = None
    if options.compute_se:
        with np.errstate(all="ignore"):
            H = _numerical_hessian(nll, best[1], options.hessian_step)
        try:
            cov = np.linalg.inv(H)
            d = np.diag(cov)
            if np.all(np.isfinite(d)) and np.all(d > 0):
                se = tuple(float(v) for v in np.sqrt(d))
        except np.linalg.LinAlgError:
            pass
    starts = tuple((-r[0], r[2], r[3]) for r in runs)
    return FittedModel(spec, ll, aic(ll, variant.n_params), variant.n_params, converged,
                       inc.n, se, starts)


# -- model selection --------------------------------------------------------


def _rank_key(fm: FittedModel):
    return (fm.aic, fm.n_params, VARIANT_ORDER.index(fm.spec.variant))


def best_of(fits) -> FittedModel:
    """Minimum AIC; ties (within 1e-9) go to fewer parameters, then variant order."""
    fits = list(fits)
    low = min(f.aic for f in fits)
    tied = [f for f in fits if f.aic - low <= 1e-9]
    return min(tied, key=lambda f: (f.n_params, VARIANT_ORDER.index(f.spec.variant)))


def select_best_model(history: AssetHistory, candidates=VARIANT_ORDER,
                      options: FitOptions | None = None):
    """Fit every candidate to one history and pick the minimum-AIC model.

    Returns ``(best, table)`` where ``table`` maps variant name to
    ``{"aic", "loglik", "converged", "error"}``.
    """
    candidates = [Variant(c) for c in candidates]
    if not candidates:
        raise InputError("candidate list is empty")
    fits, table = [], {}
    for v in candidates:
        try:
            fm = fit_mle(v, [history], history.x_lim, options)
        except (FitError, DataError) as exc:
            table[v.value] = {"aic": None, "loglik": None, "converged": False,
                              "error": str(exc)}
            continue
        fits.append(fm)
        table[v.value] = {"aic": fm.aic, "loglik": fm.loglik, "converged": fm.converged,
                          "error": None, "theta": list(fm.spec.theta)}
    if not fits:
        raise SelectionError(f"asset {history.asset_id}: every candidate failed",
                             asset_id=history.asset_id)
    return best_of(fits), table


@dataclass
class CensusResult:
    counts: dict
    percentages: dict
    n_eligible: int
    winners: list
    ineligible: list

    def family_counts(self) -> dict:
        out: dict[str, int] = {}
        for v, c in self.counts.items():
            fam = Variant(v).family
            out[fam] = out.get(fam, 0) + c
        return out

    def as_dict(self) -> dict:
        return {"counts": self.counts, "percentages": self.percentages,
                "n_eligible": self.n_eligible,
                "winners": [{"asset_id": a, "variant": v} for a, v in self.winners],
                "ineligible": self.ineligible}


def _select_one(args):
    h, candidates, options = args
    try:
        best, _ = select_best_model(h, candidates, options)
    except SelectionError:
        return h.asset_id, None
    return h.asset_id, best.spec.variant.value


def census(histories, candidates=VARIANT_ORDER, options: FitOptions | None = None,
           min_records: int = 6, clean: bool = True, n_jobs: int = 1) -> CensusResult:
    """Share of histories for which each candidate has the lowest AIC.

    Histories are cleansed (unless ``clean`` is false) and kept only with at
    least ``min_records`` records.  Work is ordered by ``asset_id`` so the
    result does not depend on input order or on ``n_jobs``.
    """
    options = options or FitOptions(orientation=Orientation.DECREASING)
    candidates = [Variant(c) for c in candidates]
    eligible, ineligible = [], []
    for h in sorted(histories, key=lambda h: h.asset_id):
        hc = cleanse(h, options.orientation) if clean else h
        if len(hc) >= min_records and (hc.report is None or hc.report.eligible):
            eligible.append(hc)
        else:
            ineligible.append(h.asset_id)
    if not eligible:
        raise CensusError(f"no history has {min_records} or more usable records")
    jobs = [(h, candidates, options) for h in eligible]
    if n_jobs > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as ex:
            results = list(ex.map(_select_one, jobs))
    else:
        results = [_select_one(j) for j in jobs]
    winners = [(a, v) for a, v in results if v is not None]
    ineligible += [a for a, v in results if v is None]
    if not winners:
        raise CensusError("model selection failed for every eligible history")
    counts = {v.value: 0 for v in candidates}
    for _, v in winners:
        counts[v] += 1
    total = len(winners)
    pct = {k: 100.0 * c / total for k, c in counts.items()}
    return CensusResult(counts, pct, total, winners, ineligible)


def with_orientation(options: FitOptions | None, orientation) -> FitOptions:
    return replace(options or FitOptions(), orientation=Orientation(orientation))
