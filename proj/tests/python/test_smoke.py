"""Smoke tests for the python bindings."""

import math

import pytest

import reutil


ASSET = reutil.AssetParams(mu=0.09, sigma=0.30)


def test_gamma_roots():
    g = reutil.gamma_roots(ASSET, 0.05)
    assert g.gamma1 == pytest.approx(2.0 / 3.0, abs=1e-12)
    assert g.gamma2 == pytest.approx(-5.0 / 3.0, abs=1e-12)


def test_burst_families():
    scaled = reutil.UtilitySpec("scaled_tk", alpha_g=0.5, alpha_l=0.5,
                                lambda_=2.0, beta=0.0, delta=0.05)
    assert reutil.burst(1.0, scaled) == pytest.approx(1.0)
    assert reutil.burst(-1.0, scaled) == pytest.approx(-2.0)
    modified = reutil.UtilitySpec("modified_tk", alpha_g=0.5, alpha_l=2.0,
                                  lambda_=2.0, beta=0.0, delta=0.05)
    assert reutil.burst(0.21, modified) == pytest.approx(0.2)
    assert reutil.burst_marginal(0.0, modified, side="below") == pytest.approx(2.0)
    with pytest.raises(reutil.ModelError):
        reutil.burst(-1.5, modified)


def test_threshold_and_poisson_stats():
    s = reutil.threshold_stats(0.772, 1.277, ASSET)
    assert s.q_gain == pytest.approx(0.577, abs=1e-3)
    assert s.mean_duration * 250 == pytest.approx(174.4, abs=0.1)
    p = reutil.poisson_stats(1.16, ASSET)
    assert p.q_gain == pytest.approx(0.549, abs=1e-3)
    assert p.q_gain == p.phi_gain
    assert reutil.poisson_stats(0.05, ASSET).mean_gain_multiple is None


def test_policy_optimum_and_critical_lambda():
    costs = reutil.CostSpec(k_s=0.01, k_p=0.01, kappa=0.99)
    u = reutil.UtilitySpec("scaled_tk", 0.5, 0.5, lambda_=2.5, beta=0.3, delta=0.05)
    policy = reutil.optimize_policy(u, ASSET, costs)
    assert policy.regime == reutil.PolicyRegime.two_point
    assert policy.theta == pytest.approx(0.183, abs=0.002)
    assert policy.theta_big == pytest.approx(1.037, abs=0.002)
    res = reutil.smooth_pasting_residuals(policy, u, ASSET, costs)
    assert abs(res.upper) < 1e-6 and abs(res.lower) < 1e-6

    crit = reutil.critical_lambda(u, ASSET, costs)
    assert crit.lambda_star == pytest.approx(2.531, abs=0.005)


def test_transversality_report():
    costs = reutil.CostSpec(k_s=0.01, k_p=0.01)
    u = reutil.UtilitySpec("scaled_tk", 0.88, 0.88, lambda_=2.25, beta=0.3, delta=0.05)
    rep = reutil.check_transversality(u, ASSET, costs)
    assert not rep.ok
    assert any(v.code == "ALPHA_G_EXCEEDS_GAMMA1" for v in rep.violations)


def test_aggregation():
    s = reutil.threshold_stats(0.772, 1.277, ASSET)
    mix = reutil.AccountSizeMix.from_multiplier(8.0)
    odean = reutil.representative_odean(s.q_gain, s.phi_gain, mix)
    assert odean.odean == pytest.approx(1.28, abs=0.01)

    th = reutil.resolve_rule(reutil.ThresholdRule(0.573329, 1.274537), ASSET)
    po = reutil.resolve_rule(reutil.PoissonRule(1.5), ASSET)
    inv = reutil.heterogeneous_investors([
        reutil.InvestorType(0.5, 8, th), reutil.InvestorType(0.5, 8, po)])
    assert inv.odean.odean == pytest.approx(1.66, abs=0.01)
    hold = reutil.heterogeneous_holdings([
        reutil.HoldingGroup(4, th), reutil.HoldingGroup(4, po)])
    assert hold.odean.odean == pytest.approx(1.93, abs=0.01)


def test_monte_carlo_quick():
    cfg = reutil.SimConfig(seed=5, n_episodes=4000)
    sim = reutil.simulate_threshold_episodes(0.772, 1.277, ASSET, cfg)
    closed = reutil.threshold_stats(0.772, 1.277, ASSET)
    assert abs(sim.q_gain.value - closed.q_gain) < 4 * sim.q_gain.se
    again = reutil.simulate_threshold_episodes(0.772, 1.277, ASSET, cfg)
    assert again.q_gain.value == sim.q_gain.value

    spec = reutil.AccountSpec(1.0, [reutil.ThresholdRule(0.772, 1.277)] * 8)
    acct = reutil.simulate_accounts([spec], ASSET,
                                    reutil.AccountSimConfig(horizon_years=12.0,
                                                            n_accounts=30),
                                    cfg)
    mix = reutil.AccountSizeMix.from_multiplier(8.0)
    odean = reutil.representative_odean(closed.q_gain, closed.phi_gain, mix)
    assert abs(acct.pgr.value - odean.pgr) < 4 * acct.pgr.se


def test_steady_state_distribution():
    assert reutil.steady_state_cdf(0.772, 0.772, 1.277, ASSET) == pytest.approx(0.0)
    assert reutil.steady_state_cdf(1.277, 0.772, 1.277, ASSET) == pytest.approx(1.0)
    s = reutil.threshold_stats(0.772, 1.277, ASSET)
    assert reutil.steady_state_cdf(1.0, 0.772, 1.277, ASSET) == pytest.approx(
        1.0 - s.phi_gain)
    total = 0.0
    n = 2000
    for i in range(n):
        x = 0.772 + (1.277 - 0.772) * (i + 0.5) / n
        total += reutil.steady_state_pdf(x, 0.772, 1.277, ASSET)
    assert total * (1.277 - 0.772) / n == pytest.approx(1.0, abs=1e-3)
