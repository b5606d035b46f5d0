// Acceptance suite: one pass/fail line per criterion, full detail on failure.
// MC criteria run 1e5 episodes / >=1e4 account sales and take a few minutes.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "reutil/aggregation.hpp"
#include "reutil/episode_stats.hpp"
#include "reutil/mc.hpp"
#include "reutil/policy.hpp"
#include "reutil/utility.hpp"

using namespace reutil;

namespace {

const AssetParams kAsset{0.09, 0.30};
const CostSpec kCostsK{0.01, 0.01, std::nullopt};  // kappa = K
const CostSpec kCostsNet{0.01, 0.01, 0.99};       // kappa = 1 - k_s

struct Criterion {
    explicit Criterion(std::string n) : name(std::move(n)) {}

    std::string name;
    int checks = 0;
    std::vector<std::string> failures;

    void expect(bool ok, const std::string& detail) {
        ++checks;
        if (!ok) failures.push_back(detail);
    }
    void expect_near(const std::string& what, double got, double want, double tol) {
        char buf[256];
        std::snprintf(buf, sizeof buf, "%s: got %.6g, want %.6g +- %.2g", what.c_str(), got,
                      want, tol);
        expect(std::abs(got - want) <= tol, buf);
    }
};

int g_failed_criteria = 0;

void report(const Criterion& c) {
    if (c.failures.empty()) {
        std::printf("[PASS] %s (%d checks)\n", c.name.c_str(), c.checks);
    } else {
        ++g_failed_criteria;
        std::printf("[FAIL] %s (%zu of %d checks failed)\n", c.name.c_str(),
                    c.failures.size(), c.checks);
        for (const auto& f : c.failures) std::printf("       - %s\n", f.c_str());
    }
    std::fflush(stdout);
}

// --------------------------------------------------------------------------

void criterion1_fit_row() {
    Criterion c{"1 threshold fit to the observed gain/loss sizes"};
    const EpisodeStats s = threshold_stats(0.772, 1.277, kAsset);
    c.expect_near("Q_G (pct)", s.q_gain * 100, 57.7, 0.1);
    c.expect_near("phi_G (pct)", s.phi_gain * 100, 50.7, 0.1);
    c.expect_near("E[tau] (days)", s.mean_duration * 250, 174, 1.0);
    const OdeanStats o = representative_odean(s, AccountSizeMix::from_multiplier(8.0));
    c.expect_near("PGR (pct)", o.pgr * 100, 14.0, 0.1);
    c.expect_near("PLR (pct)", o.plr * 100, 10.9, 0.1);
    c.expect_near("Odean measure", *o.odean, 1.28, 0.01);
    report(c);
}

void criterion2_poisson_rows() {
    Criterion c{"2 Poisson trading rows"};
    struct Row {
        double rho, gain_pct, loss_pct, q_pct, days;
    };
    const Row rows[] = {{0.36, 72.2, -22.8, 58.7, 688},
                        {0.80, 36.4, -17.4, 55.9, 312},
                        {1.16, 27.7, -15.2, 54.9, 215},
                        {1.94, 19.7, -12.4, 53.8, 129}};
    for (const Row& r : rows) {
        const PoissonStats p = poisson_stats(r.rho, kAsset);
        const std::string tag = "rho=" + std::to_string(r.rho).substr(0, 4);
        c.expect_near(tag + " mean gain (pct)", (*p.mean_gain_multiple - 1) * 100,
                      r.gain_pct, 0.1);
        c.expect_near(tag + " mean loss (pct)", (p.mean_loss_fraction - 1) * 100,
                      r.loss_pct, 0.1);
        c.expect_near(tag + " Q_G (pct)", p.q_gain * 100, r.q_pct, 0.1);
        c.expect_near(tag + " E[tau] (days)", p.mean_duration * 250, r.days, 1.0);

        const OdeanStats o =
            representative_odean(p.q_gain, p.phi_gain, AccountSizeMix::from_multiplier(8.0));
        c.expect(o.pgr == 0.125 && o.plr == 0.125 && *o.odean == 1.0,
                 tag + " PGR = PLR = 12.5% and O = 1 exactly");
    }
    report(c);

    if (!c.failures.empty()) {
        // The published row was generated by the intensity that matches the
        // observed mean loss of -22.8% exactly; show that it reproduces there.
        double lo = 0.3, hi = 0.45;
        for (int i = 0; i < 80; ++i) {
            const double mid = 0.5 * (lo + hi);
            (poisson_stats(mid, kAsset).mean_loss_fraction < 0.772 ? lo : hi) = mid;
        }
        const double rho_star = 0.5 * (lo + hi);
        const PoissonStats p = poisson_stats(rho_star, kAsset);
        std::printf(
            "       note: at rho = %.4f (mean loss pinned to -22.8%%) the row gives "
            "gain %.1f%%, Q_G %.1f%%, E[tau] %.0f days, matching the published 72.2%% / "
            "58.7%% / 688; at rho = 0.36 exactly the closed forms give %.1f%% and %.0f "
            "days, outside the stated tolerances.\n",
            rho_star, (*p.mean_gain_multiple - 1) * 100, p.q_gain * 100,
            p.mean_duration * 250, (*poisson_stats(0.36, kAsset).mean_gain_multiple - 1) * 100,
            poisson_stats(0.36, kAsset).mean_duration * 250);
    }
}

void criterion3_optimizer_fit() {
    Criterion c{"3 optimizer and critical loss aversion at the illustration"};
    UtilitySpec u{UtilityFamily::scaled_tk, 0.5, 0.5, 2.5, 0.3, 0.05};
    const Policy p25 = optimize_policy(u, kAsset, kCostsNet);
    c.expect(p25.regime == PolicyRegime::two_point, "lambda=2.50 regime is two-point");
    c.expect_near("lambda=2.50 theta", p25.theta, 0.183, 0.002);
    c.expect_near("lambda=2.50 Theta", p25.theta_big, 1.037, 0.002);

    u.lambda = 2.56;
    const Policy p56 = optimize_policy(u, kAsset, kCostsNet);
    c.expect(p56.regime == PolicyRegime::gains_only, "lambda=2.56 regime is gains-only");
    c.expect_near("lambda=2.56 Theta", p56.theta_big, 1.036, 0.002);

    const CriticalLambda cl = critical_lambda(u, kAsset, kCostsNet);
    c.expect_near("lambda*", cl.lambda_star, 2.531, 0.005);
    c.expect_near("theta*", cl.theta_star, 0.166, 0.002);
    c.expect_near("Theta*", cl.theta_big_star, 1.036, 0.002);
    report(c);
}

void criterion4_regime_bisection() {
    Criterion c{"4 regime switch located by bisection matches lambda*"};
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    int accepted = 0, attempts = 0;
    while (accepted < 5 && attempts < 400) {
        ++attempts;
        UtilitySpec u{UtilityFamily::scaled_tk, 0.35 + 0.27 * uni(rng),
                      0.35 + 0.60 * uni(rng), 2.0, 0.0, 0.045 + 0.045 * uni(rng)};
        u.beta = (0.1 + 0.7 * uni(rng)) * std::min(u.alpha_g, u.alpha_l);
        const double k = 0.005 + 0.015 * uni(rng);
        const CostSpec costs{k, k, std::nullopt};
        try {
            validate(u);
        } catch (const ModelError&) {
            continue;
        }
        const TransversalityReport rep = check_transversality(u, kAsset, costs);
        const double g1 = gamma_roots(kAsset, u.delta).gamma1;
        if (!rep.ok || u.beta >= 0.95 * g1) continue;

        CriticalLambda cl{};
        try {
            cl = critical_lambda(u, kAsset, costs);
        } catch (const ModelError&) {
            continue;
        }
        if (!(cl.lambda_star > 0.3 && cl.lambda_star < 30.0)) continue;

        const auto regime_at = [&](double lambda) {
            UtilitySpec probe = u;
            probe.lambda = lambda;
            return optimize_policy(probe, kAsset, costs).regime;
        };
        double lo = cl.lambda_star * 0.7, hi = cl.lambda_star * 1.3;
        if (regime_at(lo) != PolicyRegime::two_point ||
            regime_at(hi) != PolicyRegime::gains_only)
            continue;
        for (int i = 0; i < 30; ++i) {
            const double mid = 0.5 * (lo + hi);
            (regime_at(mid) == PolicyRegime::two_point ? lo : hi) = mid;
        }
        const double flip = 0.5 * (lo + hi);
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "set %d (aG=%.3f aL=%.3f beta=%.3f delta=%.3f k=%.3f): bisected "
                      "%.6f vs lambda* %.6f",
                      accepted + 1, u.alpha_g, u.alpha_l, u.beta, u.delta, k, flip,
                      cl.lambda_star);
        c.expect(std::abs(flip - cl.lambda_star) <= 1e-3 * cl.lambda_star, buf);
        ++accepted;
    }
    c.expect(accepted == 5, "sampled 5 admissible parameter sets");
    report(c);
}

void criterion5_linear_utility() {
    Criterion c{"5 piecewise-linear utility never realizes losses"};
    const double g1 = gamma_roots(kAsset, 0.10).gamma1;
    for (double beta : {0.0, 0.5, std::min(1.0, g1) - 1e-9}) {
        for (double lambda : {1.0, 2.0, 5.0}) {
            UtilitySpec u{UtilityFamily::scaled_tk, 1.0, 1.0, lambda, beta, 0.10};
            const Policy p = optimize_policy(u, kAsset, kCostsK);
            char buf[96];
            std::snprintf(buf, sizeof buf, "beta=%.3f lambda=%.1f regime", beta, lambda);
            c.expect(p.regime == PolicyRegime::gains_only, buf);
        }
    }
    UtilitySpec u{UtilityFamily::scaled_tk, 1.0, 1.0, 2.0, std::min(1.0, g1) - 1e-9, 0.10};
    const CriticalLambda cl = critical_lambda(u, kAsset, kCostsK);
    char buf[96];
    std::snprintf(buf, sizeof buf, "lambda* = %.4f below 1 near the scaling bound",
                  cl.lambda_star);
    c.expect(cl.lambda_star < 1.0, buf);
    report(c);
}

Policy table2_row_policy() {
    UtilitySpec mod{UtilityFamily::modified_tk, 0.5, 8.0, 2.0, 0.0, 0.05};
    return optimize_policy(mod, kAsset, kCostsK);
}

void criterion6_mixtures() {
    Criterion c{"6 heterogeneous populations"};
    const TypeStats threshold{std::nullopt, 0.0, 0.776, 0.333, 351.0 / 250.0};
    const TypeStats random{std::nullopt, 0.0, 0.553, 0.553, 1.0};
    const PopulationStats inv =
        heterogeneous_investors({{0.5, 8, threshold}, {0.5, 8, random}});
    c.expect_near("investor-mix phi_bar (pct)", *inv.phi_gain_bar * 100, 46.1, 0.1);
    const PopulationStats hold = heterogeneous_holdings({{4, threshold}, {4, random}});
    c.expect_near("holdings-mix phi_bar (pct)", *hold.phi_gain_bar * 100, 44.0, 0.1);

    const Policy p = table2_row_policy();
    c.expect(p.regime == PolicyRegime::two_point, "table row optimum is two-point");
    const TypeStats th = resolve_rule(ThresholdRule{p.theta, p.theta_big}, kAsset);
    const TypeStats po = resolve_rule(PoissonRule{1.5}, kAsset);
    const PopulationStats t3i = heterogeneous_investors({{0.5, 8, th}, {0.5, 8, po}});
    const PopulationStats t3h = heterogeneous_holdings({{4, th}, {4, po}});
    c.expect_near("table row O (investors)", *t3i.odean.odean, 1.66, 0.02);
    c.expect_near("table row O (holdings)", *t3h.odean.odean, 1.93, 0.02);
    report(c);
}

void criterion7_monte_carlo() {
    Criterion c{"7 Monte Carlo concordance"};
    const SimConfig base{20240601, 1.0 / 2500.0, 100000, false, 0};

    const auto z_check = [&](const std::string& what, const Estimate& e, double closed) {
        const double z = (e.value - closed) / e.se;
        char buf[192];
        std::snprintf(buf, sizeof buf, "%s: est %.6g vs closed %.6g (se %.2g, z=%+.2f)",
                      what.c_str(), e.value, closed, e.se, z);
        c.expect(std::abs(z) < 3.0, buf);
    };

    // Criterion-1 parameter set: threshold episodes.
    {
        const EpisodeStats closed = threshold_stats(0.772, 1.277, kAsset);
        const ThresholdSimResult sim =
            simulate_threshold_episodes(0.772, 1.277, kAsset, base);
        z_check("fit-row Q_G", sim.q_gain, closed.q_gain);
        z_check("fit-row phi_G", sim.phi_gain, closed.phi_gain);
        z_check("fit-row E[tau]", sim.mean_duration, closed.mean_duration);
    }

    // Criterion-2 parameter sets: Poisson episodes.
    for (double rho : {0.36, 0.80, 1.16, 1.94}) {
        const PoissonStats closed = poisson_stats(rho, kAsset);
        const PoissonSimResult sim = simulate_poisson_episodes(rho, kAsset, base);
        const std::string tag = "poisson rho=" + std::to_string(rho).substr(0, 4);
        z_check(tag + " mean gain", sim.gain_multiple, *closed.mean_gain_multiple);
        z_check(tag + " mean loss", sim.loss_fraction, closed.mean_loss_fraction);
        z_check(tag + " Q_G", sim.q_gain, closed.q_gain);
        z_check(tag + " phi_G", sim.phi_gain, closed.phi_gain);
        z_check(tag + " E[tau]", sim.mean_duration, closed.mean_duration);
    }

    // Criterion-1 account structure: homogeneous eight-stock accounts.
    {
        const EpisodeStats s = threshold_stats(0.772, 1.277, kAsset);
        const OdeanStats closed =
            representative_odean(s, AccountSizeMix::from_multiplier(8.0));
        AccountSpec spec{1.0, std::vector<TradingRule>(8, ThresholdRule{0.772, 1.277})};
        const AccountSimResult sim =
            simulate_accounts({spec}, kAsset, {18.0, 80, -1.0}, base);
        c.expect(sim.n_sales >= 10000, "fit-row accounts produced >= 10^4 sales");
        z_check("fit-row PGR", sim.pgr, closed.pgr);
        z_check("fit-row PLR", sim.plr, closed.plr);
        z_check("fit-row O", sim.odean, *closed.odean);
        z_check("fit-row account phi_G", sim.phi_gain, s.phi_gain);
    }

    // Criterion-6 parameter sets: mixed populations.
    const Policy p = table2_row_policy();
    const ThresholdRule th_rule{p.theta, p.theta_big};
    const TypeStats th = resolve_rule(th_rule, kAsset);
    {
        const TypeStats po = resolve_rule(PoissonRule{1.0}, kAsset);
        const PopulationStats closed = heterogeneous_investors({{0.5, 8, th}, {0.5, 8, po}});
        const std::vector<AccountSpec> pop = {
            {0.5, std::vector<TradingRule>(8, th_rule)},
            {0.5, std::vector<TradingRule>(8, PoissonRule{1.0})}};
        const AccountSimResult sim = simulate_accounts(pop, kAsset, {26.0, 110, -1.0}, base);
        c.expect(sim.n_sales >= 10000, "investor-mix accounts produced >= 10^4 sales");
        z_check("investor-mix phi_bar", sim.phi_gain, *closed.phi_gain_bar);
        z_check("investor-mix PGR", sim.pgr, closed.odean.pgr);
        z_check("investor-mix PLR", sim.plr, closed.odean.plr);
    }
    AccountSpec mixed{1.0, {}};
    for (int i = 0; i < 4; ++i) mixed.stocks.push_back(th_rule);
    for (int i = 0; i < 4; ++i) mixed.stocks.push_back(PoissonRule{1.0});
    {
        const PopulationStats closed =
            heterogeneous_holdings({{4, th}, {4, resolve_rule(PoissonRule{1.0}, kAsset)}});
        const AccountSimResult sim =
            simulate_accounts({mixed}, kAsset, {26.0, 110, -1.0}, base);
        c.expect(sim.n_sales >= 10000, "holdings-mix accounts produced >= 10^4 sales");
        z_check("holdings-mix phi_bar (44.0%)", sim.phi_gain, *closed.phi_gain_bar);
        z_check("holdings-mix PGR", sim.pgr, closed.odean.pgr);
        z_check("holdings-mix PLR", sim.plr, closed.odean.plr);
    }
    {
        const TypeStats po = resolve_rule(PoissonRule{1.5}, kAsset);
        const PopulationStats closed = heterogeneous_investors({{0.5, 8, th}, {0.5, 8, po}});
        const std::vector<AccountSpec> pop = {
            {0.5, std::vector<TradingRule>(8, th_rule)},
            {0.5, std::vector<TradingRule>(8, PoissonRule{1.5})}};
        const AccountSimResult sim = simulate_accounts(pop, kAsset, {24.0, 100, -1.0}, base);
        z_check("table-row O (investors)", sim.odean, *closed.odean.odean);
    }

    report(c);
}

// Paired-path refinement: the same Brownian increments monitored every step
// at dt and every fourth step at 4dt. Pairing isolates the discretization
// effect, which is what the one-standard-error budget is meant to bound;
// independent replicates would differ by ~1.4 SE from noise alone.
void criterion7b_dt_refinement() {
    Criterion c{"7b dt refinement moves nothing beyond one standard error"};
    const std::int64_t n = 100000;
    const int refine = 4;
    const double dt_f = 1.0 / 10000.0;
    const double theta = 0.772, theta_big = 1.277;
    const double a = std::log(theta), b = std::log(theta_big);
    const double drift_f = (kAsset.mu - 0.5 * kAsset.sigma * kAsset.sigma) * dt_f;
    const double vol_f = kAsset.sigma * std::sqrt(dt_f);
    const double s2_f = kAsset.sigma * kAsset.sigma * dt_f;
    const double dt_c = refine * dt_f;
    const double s2_c = kAsset.sigma * kAsset.sigma * dt_c;

    struct Monitor {
        bool done = false, gain = false;
        double tau = 0.0, above = 0.0;
    };
    double d_q = 0.0, d_tau = 0.0;
    double sum_above_c = 0.0, sum_tau_c = 0.0, sum_above_f = 0.0, sum_tau_f = 0.0;
    double sum_q_c = 0.0, sum_tau2_c = 0.0;
    double sum_aa_c = 0.0, sum_at_c = 0.0;

    std::mt19937_64 seeder(918273645ull);
    for (std::int64_t i = 0; i < n; ++i) {
        std::mt19937_64 eng(seeder());
        auto uni = [&eng] { return (static_cast<double>(eng() >> 11) + 0.5) * 0x1.0p-53; };
        auto normal = [&uni] {
            double u1 = uni(), u2 = uni();
            return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
        };
        Monitor fine, coarse;
        double level = 0.0, span_start = 0.0;
        int sub = 0;
        while (!fine.done || !coarse.done) {
            const double next = level + drift_f + vol_f * normal();
            if (!fine.done) {
                if (level > 0.0) fine.above += dt_f;
                fine.tau += dt_f;
                bool hi = next >= b, lo = next <= a;
                if (!hi && !lo) {
                    const double ph = std::exp(-2.0 * (b - level) * (b - next) / s2_f);
                    const double pl = std::exp(-2.0 * (level - a) * (next - a) / s2_f);
                    const double u = uni();
                    hi = u < ph;
                    lo = !hi && u < ph + pl;
                }
                if (hi || lo) {
                    fine.done = true;
                    fine.gain = hi;
                }
            }
            ++sub;
            if (sub == refine) {
                sub = 0;
                if (!coarse.done) {
                    if (span_start > 0.0) coarse.above += dt_c;
                    coarse.tau += dt_c;
                    bool hi = next >= b, lo = next <= a;
                    if (!hi && !lo) {
                        const double ph =
                            std::exp(-2.0 * (b - span_start) * (b - next) / s2_c);
                        const double pl =
                            std::exp(-2.0 * (span_start - a) * (next - a) / s2_c);
                        const double u = uni();
                        hi = u < ph;
                        lo = !hi && u < ph + pl;
                    }
                    if (hi || lo) {
                        coarse.done = true;
                        coarse.gain = hi;
                    }
                }
                span_start = next;
            }
            level = next;
        }
        d_q += (coarse.gain ? 1.0 : 0.0) - (fine.gain ? 1.0 : 0.0);
        d_tau += coarse.tau - fine.tau;
        sum_q_c += coarse.gain ? 1.0 : 0.0;
        sum_above_c += coarse.above;
        sum_tau_c += coarse.tau;
        sum_tau2_c += coarse.tau * coarse.tau;
        sum_aa_c += coarse.above * coarse.above;
        sum_at_c += coarse.above * coarse.tau;
        sum_above_f += fine.above;
        sum_tau_f += fine.tau;
    }

    // Standard errors of the coarse estimates themselves (the budget).
    const double q_c = sum_q_c / n;
    const double se_q = std::sqrt(q_c * (1.0 - q_c) / n);
    const double tau_c = sum_tau_c / n;
    const double se_tau = std::sqrt((sum_tau2_c / n - tau_c * tau_c) / n);
    const EpisodeStats closed = threshold_stats(theta, theta_big, kAsset);

    const double dq_mean = d_q / n;
    const double dtau_mean = d_tau / n;
    const double phi_c = sum_above_c / sum_tau_c;
    const double dphi = phi_c - sum_above_f / sum_tau_f;
    // Ratio-estimator standard error of the coarse occupancy share.
    const double resid_var =
        sum_aa_c / n - 2.0 * phi_c * sum_at_c / n + phi_c * phi_c * sum_tau2_c / n;
    const double se_phi = std::sqrt(std::max(resid_var, 0.0) / n) / tau_c;

    char buf[192];
    std::snprintf(buf, sizeof buf, "Q_G drift %.3g within se %.3g", std::abs(dq_mean), se_q);
    c.expect(std::abs(dq_mean) <= se_q, buf);
    std::snprintf(buf, sizeof buf, "E[tau] drift %.3g within se %.3g", std::abs(dtau_mean),
                  se_tau);
    c.expect(std::abs(dtau_mean) <= se_tau, buf);
    std::snprintf(buf, sizeof buf, "phi_G drift %.3g within se %.3g", std::abs(dphi), se_phi);
    c.expect(std::abs(dphi) <= se_phi, buf);
    std::snprintf(buf, sizeof buf, "coarse Q_G %.5f within 3se of closed %.5f", q_c,
                  closed.q_gain);
    c.expect(std::abs(q_c - closed.q_gain) < 3.0 * se_q, buf);
    std::snprintf(buf, sizeof buf, "coarse E[tau] %.5f within 3se of closed %.5f", tau_c,
                  closed.mean_duration);
    c.expect(std::abs(tau_c - closed.mean_duration) < 3.0 * se_tau, buf);
    report(c);
}

void criterion8_analytic_invariants() {
    Criterion c{"8 analytical invariants"};
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    // Root identities.
    bool vieta_ok = true;
    for (int i = 0; i < 200; ++i) {
        const AssetParams a{-0.1 + 0.4 * uni(rng), 0.1 + 0.5 * uni(rng)};
        const double delta = 0.01 + 0.15 * uni(rng);
        const GammaRoots g = gamma_roots(a, delta);
        const double s = 1.0 - 2.0 * a.mu / (a.sigma * a.sigma);
        const double pr = -2.0 * delta / (a.sigma * a.sigma);
        if (std::abs(g.gamma1 + g.gamma2 - s) > 1e-10 * std::max(1.0, std::abs(s)))
            vieta_ok = false;
        if (std::abs(g.gamma1 * g.gamma2 - pr) > 1e-10 * std::max(1.0, std::abs(pr)))
            vieta_ok = false;
    }
    c.expect(vieta_ok, "Vieta identities within 1e-10 relative");

    // Valuation equation residual along the continuation region.
    {
        UtilitySpec u{UtilityFamily::scaled_tk, 0.5, 0.5, 2.5, 0.3, 0.05};
        const ValueCoefficients vc = value_coefficients(0.183, 1.037, u, kAsset, kCostsNet);
        const double g1 = vc.gamma.gamma1, g2 = vc.gamma.gamma2;
        bool ode_ok = true;
        for (int i = 0; i <= 100; ++i) {
            const double x = 0.183 + (1.037 - 0.183) * i / 100.0;
            const double v = reduced_value(x, vc);
            const double vp =
                vc.c1 * g1 * std::pow(x, g1 - 1) + vc.c2 * g2 * std::pow(x, g2 - 1);
            const double vpp = vc.c1 * g1 * (g1 - 1) * std::pow(x, g1 - 2) +
                               vc.c2 * g2 * (g2 - 1) * std::pow(x, g2 - 2);
            const double resid = 0.5 * 0.09 * x * x * vpp + 0.09 * x * vp - 0.05 * v;
            if (std::abs(resid) > 1e-8 * std::max(1.0, std::abs(v))) ode_ok = false;
        }
        c.expect(ode_ok, "value equation residual within 1e-8 on 100 grid points");
    }

    // Martingale identity for exit odds and duration.
    bool mart_ok = true;
    for (int i = 0; i < 100; ++i) {
        const double theta = 0.1 + 0.85 * uni(rng);
        const double theta_big = 1.02 + 2.5 * uni(rng);
        const AssetParams a{0.01 + 0.15 * uni(rng), 0.2 + 0.3 * uni(rng)};
        const EpisodeStats s = threshold_stats(theta, theta_big, a);
        const double lhs = s.q_gain * std::log(theta_big) + s.q_loss * std::log(theta);
        const double rhs = (a.mu - 0.5 * a.sigma * a.sigma) * s.mean_duration;
        if (std::abs(lhs - rhs) > 1e-10 * std::max(1.0, std::abs(lhs))) mart_ok = false;
    }
    c.expect(mart_ok, "martingale identity within 1e-10");

    // Steady-state density integrates to one.
    {
        using quad = boost::math::quadrature::gauss_kronrod<double, 15>;
        bool mass_ok = true;
        const struct {
            AssetParams a;
            double lo, hi;
        } cases[] = {{kAsset, 0.772, 1.277}, {{0.045, 0.30}, 0.7, 1.6}};
        for (const auto& cs : cases) {
            const auto f = [&](double x) {
                return steady_state_pdf(x, cs.lo, cs.hi, cs.a);
            };
            const double mass = quad::integrate(f, cs.lo, 1.0, 12, 1e-10) +
                                quad::integrate(f, 1.0, cs.hi, 12, 1e-10);
            if (std::abs(mass - 1.0) > 1e-8) mass_ok = false;
        }
        c.expect(mass_ok, "density normalization within 1e-8");
    }

    // A common rescaling of (mu, delta, sigma^2) is a change of time units.
    {
        UtilitySpec u{UtilityFamily::scaled_tk, 0.5, 0.5, 2.5, 0.3, 0.05};
        const Policy base = optimize_policy(u, kAsset, kCostsNet);
        const EpisodeStats sb = threshold_stats(base.theta, base.theta_big, kAsset);
        bool ok = true;
        for (double scale : {0.5, 2.0, 4.0}) {
            UtilitySpec us = u;
            us.delta *= scale;
            const AssetParams as{kAsset.mu * scale, kAsset.sigma * std::sqrt(scale)};
            const Policy p = optimize_policy(us, as, kCostsNet);
            const EpisodeStats s = threshold_stats(p.theta, p.theta_big, as);
            if (std::abs(p.theta - base.theta) > 1e-8) ok = false;
            if (std::abs(p.theta_big - base.theta_big) > 1e-8) ok = false;
            if (std::abs(s.q_gain - sb.q_gain) > 1e-8) ok = false;
            if (std::abs(s.phi_gain - sb.phi_gain) > 1e-8) ok = false;
            if (std::abs(s.mean_duration - sb.mean_duration / scale) >
                1e-8 * sb.mean_duration)
                ok = false;
        }
        c.expect(ok, "time-unit invariance of (theta, Theta, Q_G, phi_G) within 1e-8");
    }

    // Homogeneity of the two-argument burst.
    {
        const UtilitySpec u{UtilityFamily::modified_tk, 0.5, 4.0, 2.0, 0.3, 0.05};
        bool ok = true;
        for (int i = 0; i < 200; ++i) {
            const double cfac = 0.1 + 9.9 * uni(rng);
            const double ref = 0.5 + 3.0 * uni(rng);
            const double gain = (-0.9 + 2.9 * uni(rng)) * ref;
            const double lhs = full_burst(cfac * gain, cfac * ref, u);
            const double rhs = std::pow(cfac, u.beta) * full_burst(gain, ref, u);
            if (std::abs(lhs - rhs) > 1e-12 * std::max(1.0, std::abs(rhs))) ok = false;
        }
        c.expect(ok, "full burst homogeneity within 1e-12");
    }
    report(c);
}

void criterion9_dominance() {
    Criterion c{"9 optimizer dominates a 200x200 policy grid"};
    for (double lambda : {2.5, 2.531, 2.56}) {
        UtilitySpec u{UtilityFamily::scaled_tk, 0.5, 0.5, lambda, 0.3, 0.05};
        const Policy p = optimize_policy(u, kAsset, kCostsNet);
        const double kap = kCostsNet.kappa();
        double best = -1e300, best_t = 0, best_b = 0;
        for (int i = 0; i < 200; ++i) {
            const double theta = 0.01 + (0.99 - 0.01) * i / 199.0;
            for (int j = 0; j < 200; ++j) {
                const double theta_big =
                    1.0 / kap + 0.001 + (5.0 - 1.0 / kap - 0.001) * j / 199.0;
                const ValueCoefficients vc =
                    value_coefficients(theta, theta_big, u, kAsset, kCostsNet);
                const double v = vc.c1 + vc.c2;
                if (v > best) {
                    best = v;
                    best_t = theta;
                    best_b = theta_big;
                }
            }
        }
        char buf[192];
        std::snprintf(buf, sizeof buf,
                      "lambda=%.3f: optimizer v(1)=%.12g vs grid best %.12g at "
                      "(%.3f, %.3f)",
                      lambda, p.v1, best, best_t, best_b);
        c.expect(p.v1 >= best - 1e-9, buf);
    }
    report(c);
}

void table2_qualitative() {
    Criterion c{"T2 modified-TK widens gains and the two-point range"};
    UtilitySpec sc{UtilityFamily::scaled_tk, 0.5, 0.5, 2.0, 0.3, 0.05};
    UtilitySpec mo{UtilityFamily::modified_tk, 0.5, 8.0, 2.0, 0.3, 0.05};
    const Policy ps = optimize_policy(sc, kAsset, kCostsK);
    const Policy pm = optimize_policy(mo, kAsset, kCostsK);
    char buf[128];
    std::snprintf(buf, sizeof buf, "optimal Theta: modified %.4f > scaled %.4f",
                  pm.theta_big, ps.theta_big);
    c.expect(pm.theta_big > ps.theta_big, buf);
    const CriticalLambda cs = critical_lambda(sc, kAsset, kCostsK);
    const CriticalLambda cm = critical_lambda(mo, kAsset, kCostsK);
    std::snprintf(buf, sizeof buf, "lambda* range: modified %.4f > scaled %.4f",
                  cm.lambda_star, cs.lambda_star);
    c.expect(cm.lambda_star > cs.lambda_star, buf);
    report(c);
}

}  // namespace

int main() {
    std::printf("acceptance suite: mu=9%%, sigma=30%%, k_s=k_p=1%% unless stated\n");
    criterion1_fit_row();
    criterion2_poisson_rows();
    criterion3_optimizer_fit();
    criterion4_regime_bisection();
    criterion5_linear_utility();
    criterion6_mixtures();
    criterion7_monte_carlo();
    criterion7b_dt_refinement();
    criterion8_analytic_invariants();
    criterion9_dominance();
    table2_qualitative();
    if (g_failed_criteria == 0) {
        std::printf("all criteria passed\n");
    } else {
        std::printf("%d criterion(s) failed\n", g_failed_criteria);
    }
    return g_failed_criteria;
}
