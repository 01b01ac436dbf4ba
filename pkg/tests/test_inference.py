from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import stats

from btgp.errors import CensusError, DataError, FitError, InputError, SelectionError
from btgp.inference import (
    AssetHistory,
    FitOptions,
    census,
    cleanse,
    fit_mle,
    increments,
    log_likelihood,
    select_best_model,
)
from btgp.kernel import GammaParams, gamma_pdf
from btgp.models import ModelSpec, Orientation, Variant

from .conftest import BTGP_BASE, simulate_histories

FAST = FitOptions(n_starts=3, xatol=1e-7)


@pytest.fixture(scope="module")
def btgp_data(btgp_base):
    return simulate_histories(btgp_base, 200, 8, seed=11)


@pytest.fixture(scope="module")
def btgp_fit(btgp_data):
    return fit_mle("BTGP", btgp_data, 100.0, FitOptions())


# -- histories and cleansing ------------------------------------------------


def test_history_rejects_unsorted_ages():
    with pytest.raises(DataError):
        AssetHistory("a", [(5.0, 1.0), (3.0, 2.0)])


def test_history_rejects_out_of_range_condition():
    with pytest.raises(DataError):
        AssetHistory("a", [(1.0, 101.0)])


def test_history_rejects_negative_age():
    with pytest.raises(DataError):
        AssetHistory("a", [(-1.0, 90.0)])


def test_cleanse_leaves_monotone_history_unchanged():
    h = AssetHistory("a", [(2.0, 95.0), (6.0, 90.0), (9.0, 81.5)])
    c = cleanse(h)
    assert c.records == h.records
    assert c.report.dropped == () and c.report.merged == () and c.report.eligible


def test_cleanse_drops_everything_after_first_reversal():
    h = AssetHistory("a", [(1.0, 100.0), (4.0, 92.0), (7.0, 95.0), (9.0, 90.0)])
    c = cleanse(h)
    assert [r[1] for r in c.records] == [100.0, 92.0]
    assert [d[:2] for d in c.report.dropped] == [(7.0, 95.0), (9.0, 90.0)]


def test_cleanse_merges_equal_readings_keeping_later_age():
    h = AssetHistory("a", [(2.0, 97.0), (5.0, 92.0), (7.0, 92.0), (10.0, 88.0)])
    c = cleanse(h)
    assert c.records == ((2.0, 97.0), (7.0, 92.0), (10.0, 88.0))
    assert c.report.merged == ((5.0, 7.0, 92.0),)


def test_cleanse_flags_single_record_ineligible():
    h = AssetHistory("a", [(2.0, 90.0), (5.0, 95.0)])
    assert not cleanse(h).report.eligible


def test_cleanse_respects_increasing_orientation():
    h = AssetHistory("a", [(1.0, 3.0), (2.0, 5.0), (3.0, 4.0)])
    assert len(cleanse(h, Orientation.INCREASING)) == 2


# -- likelihood -------------------------------------------------------------


def test_single_bngp_increment_is_gamma_density():
    m = ModelSpec("BNGP", (0.82, 0.83, 76.51))
    h = AssetHistory("a", [(12.0, 7.5)])
    expected = math.log(gamma_pdf(7.5, GammaParams(float(m.alpha(12.0)), 0.82)))
    assert log_likelihood(m, [h]) == pytest.approx(expected, rel=1e-12)


def test_change_of_variables_identity():
    th = BTGP_BASE
    m = ModelSpec("BTGP", th)
    h = AssetHistory("a", [(4.0, 8.0), (9.0, 15.5), (20.0, 31.0), (33.0, 52.0)])
    x = h.conditions
    g = th[2] * (-np.log1p(-x / 100.0)) ** (1.0 / th[1])
    dg = np.diff(np.r_[0.0, g])
    da = np.diff(np.r_[0.0, th[0] * h.ages])
    kernel_ll = np.sum(stats.gamma.logpdf(dg, da))
    # dG/dx for G(x) = th3 * (-log(1 - x/xl))^(1/th2)
    u = -np.log1p(-x / 100.0)
    jac = th[2] / th[1] * u ** (1.0 / th[1] - 1.0) / (100.0 - x)
    assert log_likelihood(m, [h]) == pytest.approx(kernel_ll + np.sum(np.log(jac)), rel=1e-9)


def test_true_parameters_beat_perturbed_parameters(btgp_base):
    wins = 0
    for rep in range(100):
        data = simulate_histories(btgp_base, 10, 8, seed=1000 + rep)
        perturbed = btgp_base.with_theta(np.array(BTGP_BASE) * 1.5)
        wins += log_likelihood(btgp_base, data) > log_likelihood(perturbed, data)
    assert wins >= 95


def test_likelihood_invariant_to_asset_order(btgp_base, btgp_data):
    a = log_likelihood(btgp_base, btgp_data[:30])
    b = log_likelihood(btgp_base, btgp_data[:30][::-1])
    assert a == pytest.approx(b, rel=1e-12)


def test_likelihood_is_additive_across_assets(btgp_base, btgp_data):
    whole = log_likelihood(btgp_base, btgp_data[:30])
    split = log_likelihood(btgp_base, btgp_data[:13]) + log_likelihood(btgp_base, btgp_data[13:30])
    assert whole == pytest.approx(split, rel=1e-12)


def test_tau_scaling_invariance(btgp_base, btgp_data):
    k = 3.7
    scaled = [AssetHistory(h.asset_id, [(a * k, c) for a, c in h.records]) for h in btgp_data[:40]]
    m_k = btgp_base.with_theta((BTGP_BASE[0] / k, *BTGP_BASE[1:]))
    assert log_likelihood(m_k, scaled) == pytest.approx(
        log_likelihood(btgp_base, btgp_data[:40]), rel=1e-8)


def test_pristine_first_reading_moves_the_anchor():
    m = ModelSpec("BTGP", BTGP_BASE, orientation=Orientation.DECREASING)
    inc = increments(m, [AssetHistory("a", [(3.0, 100.0), (8.0, 93.0)])])
    assert inc.t0.tolist() == [3.0] and inc.x1.tolist() == [pytest.approx(7.0)]


def test_zero_increment_is_a_data_error_naming_the_record():
    m = ModelSpec("BTGP", BTGP_BASE)
    h = AssetHistory("z9", [(2.0, 5.0), (4.0, 5.0)])
    with pytest.raises(DataError) as exc:
        log_likelihood(m, [h])
    assert exc.value.details["record"] == 1 and "z9" in str(exc.value)


def test_reading_at_the_bound_is_rejected():
    m = ModelSpec("BTGP", BTGP_BASE)
    with pytest.raises(DataError):
        log_likelihood(m, [AssetHistory("a", [(2.0, 5.0), (40.0, 100.0)])])


def test_nonzero_reading_at_age_zero_is_rejected():
    with pytest.raises(DataError):
        log_likelihood(ModelSpec("BTGP", BTGP_BASE), [AssetHistory("a", [(0.0, 3.0)])])


# -- fitting ----------------------------------------------------------------


def test_parameter_recovery_at_200_by_8(btgp_fit):
    assert btgp_fit.converged
    assert np.allclose(btgp_fit.spec.theta, BTGP_BASE, rtol=0.15)


def test_aic_identity_and_parameter_count(btgp_fit):
    assert btgp_fit.aic == 2 * btgp_fit.n_params - 2 * btgp_fit.loglik
    assert btgp_fit.n_params == 3 and btgp_fit.n_increments == 1600


@pytest.mark.parametrize("v,k", [("BTGP1", 3), ("BTGP4", 4), ("BTGP6", 4), ("BNGP", 3)])
def test_parameter_count_by_variant(v, k, btgp_data):
    assert fit_mle(v, btgp_data[:5], 100.0, FitOptions(n_starts=1, compute_se=False)).n_params == k


def test_standard_errors_reported(btgp_fit):
    assert btgp_fit.log_theta_se is not None
    assert all(0 < s < 0.2 for s in btgp_fit.log_theta_se)


def test_bngp_aic_worse_on_btgp_data(btgp_base):
    worse = 0
    for rep in range(5):
        data = simulate_histories(btgp_base, 60, 8, seed=300 + rep)
        b = fit_mle("BTGP", data, 100.0, FAST)
        n = fit_mle("BNGP", data, 100.0, FAST)
        worse += n.aic > b.aic
    assert worse >= 3


def test_refit_is_bit_identical(btgp_data):
    a = fit_mle("BTGP", btgp_data[:20], 100.0, FAST)
    b = fit_mle("BTGP", btgp_data[:20], 100.0, FAST)
    assert a == b


def test_recovery_error_shrinks_with_sample_size(btgp_base):
    opts = FitOptions(n_starts=2, compute_se=False)
    medians = []
    for n in (50, 200, 800):
        errs = [np.abs(np.array(fit_mle("BTGP", simulate_histories(btgp_base, n, 8, seed=70 + r),
                                        100.0, opts).spec.theta) / BTGP_BASE - 1)
                for r in range(15)]
        medians.append(np.median(errs, axis=0))
    medians = np.array(medians)
    assert np.all(medians[2] < medians[0])


def test_fit_requires_histories():
    with pytest.raises(InputError):
        fit_mle("BTGP", [])


def test_fit_error_when_every_start_is_non_finite(monkeypatch, btgp_data):
    import btgp.inference as inf

    monkeypatch.setattr(inf, "_loglik", lambda m, inc: math.nan)
    with pytest.raises(FitError):
        fit_mle("BTGP", btgp_data[:3], 100.0, FAST)


# -- selection and census ---------------------------------------------------


def test_singleton_candidate_is_selected(btgp_data):
    best, table = select_best_model(btgp_data[0], ["BTGP"], FAST)
    assert best.spec.variant is Variant.BTGP and list(table) == ["BTGP"]


def test_nested_variant_loses_on_penalty_when_likelihoods_tie():
    m1 = ModelSpec("BTGP1", (4.0, 1.1, 30.0))
    h = simulate_histories(m1, 1, 12, seed=5)[0]
    best, table = select_best_model(h, ["BTGP4", "BTGP1"], FitOptions(n_starts=6))
    assert best.spec.variant is Variant.BTGP1
    # BTGP4 at theta4 = 1 reproduces BTGP1, so its likelihood can only match or exceed it
    assert table["BTGP4"]["loglik"] >= table["BTGP1"]["loglik"] - 1e-6


def test_tie_goes_to_fewer_parameters(monkeypatch):
    import btgp.inference as inf

    h = AssetHistory("a", [(1.0, 2.0), (2.0, 3.0)])

    def fake(v, hs, x_lim, options):
        spec = ModelSpec(v, (1.0,) * Variant(v).n_params)
        k = spec.variant.n_params
        ll = -10.0 + (k - 3)  # AIC identical for both
        return inf.FittedModel(spec, ll, inf.aic(ll, k), k, True, 2, None, ())

    monkeypatch.setattr(inf, "fit_mle", fake)
    best, _ = select_best_model(h, ["BTGP4", "BTGP1"])
    assert best.spec.variant is Variant.BTGP1


def test_failed_candidate_recorded_and_excluded(monkeypatch):
    import btgp.inference as inf

    real = inf.fit_mle
    h = simulate_histories(ModelSpec("BTGP", BTGP_BASE), 1, 8, seed=2)[0]

    def flaky(v, hs, x_lim, options):
        if Variant(v) is Variant.BNGP:
            raise FitError("boom")
        return real(v, hs, x_lim, options)

    monkeypatch.setattr(inf, "fit_mle", flaky)
    best, table = select_best_model(h, ["BNGP", "BTGP"], FAST)
    assert best.spec.variant is Variant.BTGP and table["BNGP"]["error"] == "boom"


def test_selection_error_when_all_fail(monkeypatch):
    import btgp.inference as inf

    def broken(*a, **k):
        raise FitError("x")

    monkeypatch.setattr(inf, "fit_mle", broken)
    with pytest.raises(SelectionError):
        select_best_model(AssetHistory("a", [(1.0, 2.0)]), ["BTGP"])


def test_empty_candidate_list_rejected():
    with pytest.raises(InputError):
        select_best_model(AssetHistory("a", [(1.0, 2.0)]), [])


def dec_histories(n, seed, prefix="d"):
    m = ModelSpec("BTGP", BTGP_BASE, orientation=Orientation.DECREASING)
    return simulate_histories(m, n, 8, seed=seed, prefix=prefix)


def test_census_single_history_is_100_percent():
    res = census(dec_histories(1, 3), ["BTGP", "BNGP"], FitOptions(
        n_starts=2, orientation=Orientation.DECREASING))
    assert sum(res.counts.values()) == 1 and max(res.percentages.values()) == 100.0


def test_census_identical_histories_share_one_winner():
    h = dec_histories(1, 4)[0]
    copies = [AssetHistory(f"c{i}", h.records) for i in range(3)]
    res = census(copies, ["BTGP", "BNGP"], FitOptions(
        n_starts=2, orientation=Orientation.DECREASING))
    assert sorted(res.counts.values()) == [0, 3]


def test_census_percentages_partition_and_order_invariance():
    hs = dec_histories(12, 8)
    opts = FitOptions(n_starts=2, compute_se=False, orientation=Orientation.DECREASING)
    res = census(hs, ["BTGP", "BNGP", "BTGP1"], opts)
    assert sum(res.percentages.values()) == pytest.approx(100.0, abs=1e-9)
    assert res.n_eligible == 12
    assert census(hs[::-1], ["BTGP", "BNGP", "BTGP1"], opts).counts == res.counts


def test_census_eligibility_filter():
    short = AssetHistory("short", [(1.0, 99.0), (2.0, 98.0), (3.0, 96.0)])
    res = census([short] + dec_histories(2, 9), ["BTGP"], FitOptions(
        n_starts=1, orientation=Orientation.DECREASING))
    assert res.ineligible == ["short"] and res.n_eligible == 2


def test_census_error_when_nothing_is_eligible():
    with pytest.raises(CensusError):
        census([AssetHistory("a", [(1.0, 99.0), (2.0, 98.0)])], ["BTGP"])
