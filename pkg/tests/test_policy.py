from __future__ import annotations

import math
import warnings

import numpy as np
import pytest
from scipy import integrate

from btgp import kernel as gk
from btgp.errors import DegeneratePolicyError, DomainError, InputError, TruncationError
from btgp.models import ModelSpec, survival
from btgp.policy import (
    ABRPolicy,
    CBRPolicy,
    CostConfig,
    abr_rate,
    cbr_probabilities,
    cbr_rate,
    cbr_surface,
    optimize_abr,
    optimize_cbr,
    simulate_policy,
    threshold_sweep,
)

from .conftest import BNGP_BASE, BTGP_BASE, XI_DEG

BASE = CostConfig(1.0, 100.0, 500.0)
BTGP = ModelSpec("BTGP", BTGP_BASE)
BNGP = ModelSpec("BNGP", BNGP_BASE)
COARSE_T = np.arange(1.0, 30.01, 0.5)


def test_cost_config_rejects_negative():
    with pytest.raises(InputError):
        CostConfig(-1.0, 100.0, 500.0)


def test_cost_config_warns_when_failure_is_cheaper():
    with pytest.warns(UserWarning):
        CostConfig(1.0, 100.0, 50.0)


# -- ABR --------------------------------------------------------------------


def test_equal_costs_make_rate_nonincreasing():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        c = CostConfig(0.0, 100.0, 100.0)
    rates = [abr_rate(BTGP, XI_DEG, c, t) for t in np.linspace(5, 150, 60)]
    assert np.all(np.diff(rates) <= 1e-12)


def test_abr_closed_form_at_equal_costs():
    c = CostConfig(0.0, 100.0, 100.0)
    denom = integrate.quad(lambda s: float(survival(BNGP, XI_DEG, s)), 0, 50.0)[0]
    assert abr_rate(BNGP, XI_DEG, c, 50.0) == pytest.approx(100.0 / denom, rel=1e-8)


def test_abr_optimum_is_self_consistent():
    opt = optimize_abr(BTGP, XI_DEG, BASE)
    assert abs(opt.rate - abr_rate(BTGP, XI_DEG, BASE, opt.t_R)) <= 1e-9
    assert 1.0 <= opt.t_R <= 150.0
    assert opt.rate <= np.nanmin(opt.search_trace["rate"]) + 1e-12


def test_abr_cost_homogeneity():
    a = optimize_abr(BNGP, XI_DEG, BASE)
    b = optimize_abr(BNGP, XI_DEG, BASE.scaled(7.0))
    assert b.t_R == a.t_R
    assert b.rate == pytest.approx(7.0 * a.rate, rel=1e-12)


def test_abr_optimum_falls_as_failure_gets_dearer():
    ages = [optimize_abr(BNGP, XI_DEG, CostConfig(1.0, 100.0, 100.0 * r)).t_R for r in (2, 5, 10)]
    assert ages[0] > ages[1] > ages[2]


@pytest.mark.parametrize("m,t_R", [(BTGP, 59.2), (BNGP, 44.8), (BTGP, 80.0)])
def test_abr_matches_monte_carlo(m, t_R):
    est = simulate_policy(m, ABRPolicy(t_R), XI_DEG, BASE, 100_000, np.random.default_rng(17),
                          dt=0.02)
    assert abs(est.rate - abr_rate(m, XI_DEG, BASE, t_R)) < 3 * est.se


def test_abr_simulation_with_equal_costs():
    c = CostConfig(0.0, 100.0, 100.0)
    est = simulate_policy(BTGP, ABRPolicy(40.0), XI_DEG, c, 5000, np.random.default_rng(2))
    assert est.rate == pytest.approx(100.0 / est.mean_cycle_length, rel=1e-12)


def test_simulation_is_reproducible():
    a = simulate_policy(BTGP, ABRPolicy(50.0), XI_DEG, BASE, 2000, np.random.default_rng(5))
    b = simulate_policy(BTGP, ABRPolicy(50.0), XI_DEG, BASE, 2000, np.random.default_rng(5))
    assert a == b


def test_abr_degenerate_cycle():
    with pytest.raises(DegeneratePolicyError):
        abr_rate(BTGP, XI_DEG, BASE, 1e-15)


def test_abr_rejects_bad_inputs():
    with pytest.raises(DomainError):
        abr_rate(BTGP, XI_DEG, BASE, 0.0)
    with pytest.raises(DomainError):
        abr_rate(BTGP, 120.0, BASE, 10.0)
    with pytest.raises(InputError):
        optimize_abr(BTGP, XI_DEG, BASE, t_min=10.0, t_max=5.0)


# -- CBR probabilities ------------------------------------------------------


@pytest.mark.parametrize("m,t_I,xi_R", [(BTGP, 8.5, 54.0), (BNGP, 6.3, 53.0), (BTGP, 2.0, 40.0)])
def test_probability_closure(m, t_I, xi_R):
    p = cbr_probabilities(m, XI_DEG, xi_R, t_I)
    assert p.total == pytest.approx(1.0, abs=1e-6)
    assert np.all(p.p_R >= 0) and np.all(p.p_f >= 0)


def test_empty_preventive_window():
    p = cbr_probabilities(BTGP, XI_DEG, XI_DEG, 5.0)
    assert np.all(p.p_R == 0.0)
    assert p.p_f.sum() == pytest.approx(1.0, abs=1e-6)


def test_bngp_recursion_matches_convolution():
    m, t_I, xi_R = BNGP, 6.3, 53.0
    s = m.theta[0]
    kf, kr = XI_DEG / s, xi_R / s  # BNGP kernel units are degradation / theta1
    a = [float(m.alpha(n * t_I) - m.alpha((n - 1) * t_I)) for n in (1, 2, 3)]
    f = lambda x, k: math.exp(gk._logpdf(x, a[k]))  # noqa: E731
    F = lambda x, k: float(gk._cdf(max(x, 0.0), a[k]))  # noqa: E731
    opts = dict(epsabs=1e-12, epsrel=1e-10, limit=200)
    pf = [1 - F(kf, 0)]
    pr = [F(kf, 0) - F(kr, 0)]
    pf.append(integrate.quad(lambda x: f(x, 0) * (1 - F(kf - x, 1)), 0, kr, **opts)[0])
    pr.append(integrate.quad(lambda x: f(x, 0) * (F(kf - x, 1) - F(kr - x, 1)), 0, kr, **opts)[0])

    def two_step(y, g):
        # density of the state after two intervals at y, restricted to y < kr
        return integrate.quad(lambda x: f(x, 0) * f(y - x, 1), 0, y, **opts)[0] * g(y)

    pf.append(integrate.quad(lambda y: two_step(y, lambda v: 1 - F(kf - v, 2)), 0, kr,
                             epsabs=1e-10, limit=100)[0])
    pr.append(integrate.quad(lambda y: two_step(y, lambda v: F(kf - v, 2) - F(kr - v, 2)),
                             0, kr, epsabs=1e-10, limit=100)[0])
    p = cbr_probabilities(m, XI_DEG, xi_R, t_I)
    assert np.allclose(p.p_f[:3], pf, atol=1e-6)
    assert np.allclose(p.p_R[:3], pr, atol=1e-6)


@pytest.mark.parametrize("m,t_I,xi_R", [(BTGP, 8.5, 54.0), (BNGP, 6.3, 53.0)])
def test_probabilities_match_simulated_frequencies(m, t_I, xi_R):
    n = 10**6
    est = simulate_policy(m, CBRPolicy(t_I, xi_R), XI_DEG, BASE, n, np.random.default_rng(8))
    p = cbr_probabilities(m, XI_DEG, xi_R, t_I)
    for key, exact in (("p_R", p.p_R), ("p_f", p.p_f)):
        emp = est.counts[key]
        k = min(emp.size, exact.size)
        se = np.sqrt(exact[:k] * (1 - exact[:k]) / n)
        assert np.all(np.abs(emp[:k] - exact[:k]) <= 3 * se + 1e-7)


def test_truncation_error_when_n_max_too_small():
    with pytest.raises(TruncationError):
        cbr_probabilities(BTGP, XI_DEG, 50.0, 1.0, n_max=3)


def test_cbr_rejects_bad_thresholds():
    with pytest.raises(DomainError):
        cbr_probabilities(BTGP, XI_DEG, XI_DEG + 1, 5.0)
    with pytest.raises(DomainError):
        cbr_probabilities(BTGP, XI_DEG, 40.0, 0.0)


# -- CBR rate ---------------------------------------------------------------


@pytest.mark.parametrize("m,t_I,xi_R,costs", [
    (BTGP, 8.5, 54.0, BASE),
    (BNGP, 6.3, 53.0, BASE),
    (BTGP, 3.0, 30.0, CostConfig(5.0, 50.0, 1000.0)),
    (BNGP, 12.0, 58.0, CostConfig(0.0, 100.0, 200.0)),
])
def test_cbr_matches_monte_carlo(m, t_I, xi_R, costs):
    est = simulate_policy(m, CBRPolicy(t_I, xi_R), XI_DEG, costs, 100_000,
                          np.random.default_rng(31))
    assert abs(est.rate - cbr_rate(m, XI_DEG, xi_R, t_I, costs)) < 3 * est.se


def test_cbr_cost_homogeneity():
    a = cbr_rate(BTGP, XI_DEG, 54.0, 8.5, BASE)
    assert cbr_rate(BTGP, XI_DEG, 54.0, 8.5, BASE.scaled(3.0)) == pytest.approx(3 * a, rel=1e-12)


def test_failure_only_limit_of_frequent_inspection():
    c = CostConfig(0.0, 100.0, 500.0)
    rate = cbr_rate(BTGP, XI_DEG, XI_DEG, 0.1, c)
    mean_life = integrate.quad(lambda s: float(survival(BTGP, XI_DEG, s)), 0, np.inf,
                               limit=200)[0]
    assert rate == pytest.approx(500.0 / mean_life, rel=0.02)


@pytest.fixture(scope="module")
def small_surface():
    return cbr_surface(BTGP, XI_DEG, np.arange(4.0, 14.01, 1.0), np.arange(40.0, 60.0, 2.0))


def test_cbr_optimum_is_self_consistent(small_surface):
    opt = optimize_cbr(BTGP, XI_DEG, BASE, surface=small_surface)
    assert abs(opt.rate - cbr_rate(BTGP, XI_DEG, opt.xi_R, opt.t_I, BASE)) <= 1e-9
    assert opt.rate <= np.nanmin(opt.search_trace["rate"]) + 1e-12
    assert 3.0 <= opt.t_I <= 15.0 and opt.xi_R in small_surface.xi_R


def test_cbr_homogeneity_leaves_argmin_unchanged(small_surface):
    a = optimize_cbr(BTGP, XI_DEG, BASE, surface=small_surface, refine=False)
    b = optimize_cbr(BTGP, XI_DEG, BASE.scaled(4.0), surface=small_surface, refine=False)
    assert (a.t_I, a.xi_R) == (b.t_I, b.xi_R)
    assert b.rate == pytest.approx(4.0 * a.rate, rel=1e-12)


def test_surface_rates_match_direct_evaluation(small_surface):
    r = small_surface.rates(BASE)
    assert r[3, 4] == pytest.approx(
        cbr_rate(BTGP, XI_DEG, small_surface.xi_R[4], small_surface.t_I[3], BASE), rel=1e-12)


def test_cheaper_inspection_shortens_interval():
    surf = cbr_surface(BNGP, XI_DEG, np.arange(1.0, 12.01, 0.5), np.arange(40.0, 60.0, 2.0))
    t = [optimize_cbr(BNGP, XI_DEG, CostConfig(100.0 / r, 100.0, 500.0), surface=surf,
                      refine=False).t_I for r in (100, 200, 400)]
    assert t[0] > t[1] > t[2]


# -- sweeps -----------------------------------------------------------------


def test_single_threshold_sweep_is_one_optimisation():
    (xi, opt), = threshold_sweep(BTGP, BASE, [XI_DEG])
    assert xi == XI_DEG and opt == optimize_abr(BTGP, XI_DEG, BASE)


def test_abr_sweep_bngp_costlier_and_ages_fall_with_threshold():
    xis = [70.0, 60.0, 50.0, 40.0]
    bt = threshold_sweep(BTGP, BASE, xis)
    bn = threshold_sweep(BNGP, BASE, xis)
    for (_, a), (_, b) in zip(bt, bn):
        assert b.rate >= a.rate
    for rows in (bt, bn):
        ages = [o.t_R for _, o in rows]
        assert all(x > y for x, y in zip(ages, ages[1:]))


def test_sweep_rejects_unknown_kind():
    with pytest.raises(InputError):
        threshold_sweep(BTGP, BASE, [XI_DEG], kind="XYZ")


def _cbr_sweep(m, xis):
    return [o.t_I for _, o in threshold_sweep(
        m, BASE, xis, kind="CBR", t_I_grid=COARSE_T,
        xi_R_grid=np.arange(30.0, 70.0, 2.0), refine=False, n_cells=200)]


def test_btgp_cbr_interval_long_for_loose_thresholds():
    assert all(t > 10.0 for t in _cbr_sweep(BTGP, [70.0, 75.0]))


@pytest.mark.xfail(strict=True, reason="BNGP optimal interval grows past 6 yr below BCI 40; "
                   "analytic rates agree with simulation, so the claimed 4-6 yr band does "
                   "not follow from this model")
def test_bngp_cbr_interval_stays_short_for_loose_thresholds():
    assert all(4.0 <= t <= 6.0 for t in _cbr_sweep(BNGP, [70.0]))
