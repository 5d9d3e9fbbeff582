"""Failure-probability estimators against the analytic halfspace model."""
import math

import numpy as np
import pytest

from apxcim.yieldsim import (
    YieldEstimationError,
    compare_methods,
    comparison_csv,
    find_shift,
    get_model,
    importance_weights,
    linear_model,
    mc_yield,
    mnis_yield,
    normal_cdf,
    result_csv,
    snm_surrogate,
)

PF_BETA3 = 0.0013498980316300957  # Phi(-3)


def test_normal_cdf_oracle():
    assert normal_cdf(0.0) == 0.5
    assert normal_cdf(-3.0) == pytest.approx(PF_BETA3, rel=1e-12)
    assert normal_cdf(3.0) + normal_cdf(-3.0) == pytest.approx(1.0)
    # independent check: trapezoidal integral of the density
    x = np.linspace(-12.0, -3.0, 200_001)
    integral = np.trapezoid(np.exp(-x * x / 2) / math.sqrt(2 * math.pi), x)
    assert normal_cdf(-3.0) == pytest.approx(float(integral), rel=1e-8)


def test_model_constructors():
    m = linear_model(3.0)
    assert m.analytic_pf == pytest.approx(PF_BETA3)
    assert m.margin(np.array([[4.0, 0, 0, 0, 0, 0]]))[0] < 0
    assert m.margin(np.zeros((1, 6)))[0] > 0
    s = snm_surrogate(3.0)
    assert s.analytic_pf is None
    assert s.margin(np.zeros((1, 6)))[0] == pytest.approx(3.0)
    assert get_model("linear").name == "linear"
    assert get_model("snm-surrogate").name == "snm-surrogate"
    with pytest.raises(YieldEstimationError, match="model must be one of"):
        get_model("spice")
    with pytest.raises(YieldEstimationError, match="dim"):
        linear_model(3.0, dim=0)


def test_mc_reaches_target_and_matches_analytic():
    model = linear_model(3.0)
    res = mc_yield(model, target_fom=0.1, seed=1)
    assert res.converged
    assert res.fom <= 0.1
    assert res.sims % 1_000 == 0
    assert res.std == pytest.approx(
        math.sqrt(res.pf_hat * (1 - res.pf_hat) / res.sims))
    assert abs(res.pf_hat - PF_BETA3) <= 3 * res.std
    assert res == mc_yield(model, target_fom=0.1, seed=1)  # deterministic


def test_mc_unconverged_cap():
    model = linear_model(2.0)
    res = mc_yield(model, target_fom=0.001, max_sims=2_000, seed=0)
    assert not res.converged
    assert res.sims == 2_000


def test_find_shift_lands_on_the_boundary():
    model = linear_model(3.0)
    shift, evals = find_shift(model, presamples=1_000, sigma_s=3.0, seed=1)
    assert shift[0] == pytest.approx(3.0, abs=1e-3)
    assert np.all(shift[1:] == 0.0)  # transverse junk removed entirely
    assert evals > 1_000  # refinement evaluations are accounted for
    assert evals <= 1_000 + 512


def test_find_shift_needs_failures():
    calm = linear_model(8.0)
    with pytest.raises(YieldEstimationError, match="no failures among"):
        find_shift(calm, presamples=200, sigma_s=0.5, seed=0)


def test_importance_weights_closed_form():
    s = np.array([3.0, 0.0])
    x = np.array([[3.0, 0.0], [0.0, 0.0], [4.0, 1.0]])
    w = importance_weights(x, s)
    # w(x) = exp(-x.s + |s|^2/2), the N(0,I) over N(s,I) density ratio
    assert w[0] == pytest.approx(math.exp(-4.5))
    assert w[1] == pytest.approx(math.exp(4.5))
    assert w[2] == pytest.approx(math.exp(-12.0 + 4.5))
    assert np.all(importance_weights(x, np.zeros(2)) == 1.0)


def test_mnis_matches_analytic_and_beats_mc():
    model = linear_model(3.0)
    mn = mnis_yield(model, seed=1)
    assert mn.converged
    assert mn.fom <= 0.1
    assert abs(mn.pf_hat - model.analytic_pf) <= 3 * mn.std
    mc = mc_yield(model, target_fom=0.1, seed=1)
    assert 5 * mn.sims <= mc.sims
    assert mn == mnis_yield(model, seed=1)


def test_mnis_with_explicit_shift_skips_search():
    model = linear_model(3.0)
    res = mnis_yield(model, seed=2, shift=np.array([3.0, 0, 0, 0, 0, 0]))
    assert res.sims % 1_000 == 0  # no presample cost
    assert abs(res.pf_hat - model.analytic_pf) <= 3 * res.std
    # a zero shift degrades to plain MC weighting but stays unbiased
    res0 = mnis_yield(model, seed=2, shift=np.zeros(6), target_fom=0.3)
    assert abs(res0.pf_hat - model.analytic_pf) <= 3 * res0.std


def test_mnis_on_nonlinear_surrogate():
    model = snm_surrogate(3.0)
    mn = mnis_yield(model, seed=3)
    mc = mc_yield(model, target_fom=0.1, seed=3)
    assert mn.converged and mc.converged
    assert abs(mn.pf_hat - mc.pf_hat) <= 3 * (mn.std + mc.std)
    assert mn.sims < mc.sims


def test_estimator_argument_errors():
    model = linear_model(3.0)
    with pytest.raises(YieldEstimationError, match="target_fom"):
        mc_yield(model, target_fom=0.0)
    with pytest.raises(YieldEstimationError, match="target_fom"):
        mnis_yield(model, target_fom=-1.0)
    with pytest.raises(YieldEstimationError, match="presamples"):
        mnis_yield(model, presamples=10)
    with pytest.raises(YieldEstimationError, match="sigma_s"):
        mnis_yield(model, sigma_s=0.0)


def test_compare_methods_rows_and_csv():
    model = linear_model(3.0)
    rows = compare_methods(model, 0.1, seeds=[1, 2, 3])
    assert [r["method"] for r in rows] == ["mc", "mnis"]
    assert rows[0]["Speedup"] == 1.0
    assert rows[1]["Speedup"] >= 5.0
    assert rows[1]["#Sim."] * rows[1]["Speedup"] == pytest.approx(rows[0]["#Sim."])
    csv = comparison_csv(rows)
    assert csv.splitlines()[0] == "method,Pf,FoM,#Sim.,Speedup"
    assert len(csv.splitlines()) == 3
    with pytest.raises(YieldEstimationError, match="at least one seed"):
        compare_methods(model, 0.1, seeds=[])


def test_result_csv_format():
    res = mc_yield(linear_model(3.0), seed=1)
    lines = result_csv([res]).splitlines()
    assert lines[0] == "method,pf_hat,std,fom,sims,seed,converged"
    cells = lines[1].split(",")
    assert cells[0] == "mc"
    assert int(cells[4]) == res.sims
    assert cells[6] == "1"
