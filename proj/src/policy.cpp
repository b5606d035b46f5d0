#include "reutil/policy.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "reutil/utility.hpp"

namespace reutil {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kThetaMin = 1e-6;
constexpr double kThetaMaxFrac = 1.0 - 1e-6;
constexpr double kValueTol = 1e-10;   // absolute tolerance on v(1) improvements
constexpr double kThresholdTol = 1e-8;

// Everything the free-boundary problem needs, resolved once.
struct Context {
    UtilitySpec u;
    AssetParams asset;
    GammaRoots gamma;
    double big_k;    // round-trip factor K
    double kappa;
    double beta;
    double k_pow_beta;

    double c1_of(double phi) const {
        return std::pow(phi, gamma.gamma1) - k_pow_beta * std::pow(phi, beta);
    }
    double c2_of(double phi) const {
        return std::pow(phi, gamma.gamma2) - k_pow_beta * std::pow(phi, beta);
    }
    double burst_at(double phi) const { return burst(kappa * phi - 1.0, u); }
    double marginal_at(double phi) const { return burst_marginal(kappa * phi - 1.0, u); }

    double v1_two_point(double theta, double theta_big) const;
    double v1_gains_only(double theta_big) const;
};

Context make_context(const UtilitySpec& u, const AssetParams& asset, const CostSpec& costs) {
    validate(u);
    validate(asset);
    validate(costs);
    Context ctx{u, asset, gamma_roots(asset, u.delta), costs.round_trip(), costs.kappa(),
                u.beta, 0.0};
    ctx.k_pow_beta = std::pow(ctx.big_k, ctx.beta);
    return ctx;
}

double Context::v1_two_point(double theta, double theta_big) const {
    const double c1_lo = c1_of(theta), c2_lo = c2_of(theta);
    const double c1_hi = c1_of(theta_big), c2_hi = c2_of(theta_big);
    const double u_hi = burst_at(theta_big), u_lo = burst_at(theta);
    const double det = c1_hi * c2_lo - c1_lo * c2_hi;
    if (det == 0.0 || !std::isfinite(det)) return kNegInf;
    const double v1 = ((c2_lo - c1_lo) * u_hi + (c1_hi - c2_hi) * u_lo) / det;
    return std::isfinite(v1) ? v1 : kNegInf;
}

double Context::v1_gains_only(double theta_big) const {
    const double denom = c1_of(theta_big);
    if (denom <= 0.0 || !std::isfinite(denom)) return kNegInf;
    const double v1 = burst_at(theta_big) / denom;
    return std::isfinite(v1) ? v1 : kNegInf;
}

ValueCoefficients coefficients_at(const Context& ctx, double theta, double theta_big) {
    const double c1_lo = ctx.c1_of(theta), c2_lo = ctx.c2_of(theta);
    const double c1_hi = ctx.c1_of(theta_big), c2_hi = ctx.c2_of(theta_big);
    const double u_hi = ctx.burst_at(theta_big), u_lo = ctx.burst_at(theta);
    const double det = c1_hi * c2_lo - c1_lo * c2_hi;
    const double scale = std::max({std::abs(c1_hi * c2_lo), std::abs(c1_lo * c2_hi), 1e-300});
    if (!std::isfinite(det) || std::abs(det) < 1e-12 * scale)
        throw ModelError(Errc::singular, "boundary system is singular at this policy");
    ValueCoefficients coeffs{};
    coeffs.c1 = (c2_lo * u_hi - c2_hi * u_lo) / det;
    coeffs.c2 = (c1_hi * u_lo - c1_lo * u_hi) / det;
    coeffs.gamma = ctx.gamma;
    coeffs.theta = theta;
    coeffs.theta_big = theta_big;
    return coeffs;
}

// Smooth pasting: v'(b) must match the derivative of the stopping payoff
// u(kappa*b - 1) + (K b)^beta v(1) at each boundary b.
double pasting_gap(const Context& ctx, double c1, double c2, double v1, double b) {
    const double lhs = ctx.gamma.gamma1 * c1 * std::pow(b, ctx.gamma.gamma1 - 1.0) +
                       ctx.gamma.gamma2 * c2 * std::pow(b, ctx.gamma.gamma2 - 1.0);
    const double rhs = ctx.kappa * ctx.marginal_at(b) +
                       ctx.beta * ctx.k_pow_beta * std::pow(b, ctx.beta - 1.0) * v1;
    return lhs - rhs;
}

double pasting_residual_rel(const Context& ctx, double c1, double c2, double v1, double b) {
    const double lhs = ctx.gamma.gamma1 * c1 * std::pow(b, ctx.gamma.gamma1 - 1.0) +
                       ctx.gamma.gamma2 * c2 * std::pow(b, ctx.gamma.gamma2 - 1.0);
    const double rhs = ctx.kappa * ctx.marginal_at(b) +
                       ctx.beta * ctx.k_pow_beta * std::pow(b, ctx.beta - 1.0) * v1;
    return (lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)});
}

struct Best1D {
    double x;
    double value;
};

// Maximize f over [lo, hi]: geometric scan, then Brent inside every bracket
// that holds a local maximum of the scan. Near the regime boundary the
// surface carries an interior bump only ~1e-3 above the corner plateau, so
// refining only the globally best bracket can land on the wrong mode.
Best1D maximize_scan_brent(const std::function<double(double)>& f, double lo, double hi,
                           int n_scan) {
    const double log_lo = std::log(lo), log_hi = std::log(hi);
    std::vector<double> xs(n_scan), vs(n_scan);
    Best1D best{lo, kNegInf};
    for (int i = 0; i < n_scan; ++i) {
        xs[i] = std::exp(log_lo + (log_hi - log_lo) * i / (n_scan - 1.0));
        vs[i] = f(xs[i]);
        if (vs[i] > best.value) best = {xs[i], vs[i]};
    }
    if (!(best.value > kNegInf)) return best;
    const auto neg = [&](double x) { return -f(x); };
    for (int i = 0; i < n_scan; ++i) {
        const double left = i > 0 ? vs[i - 1] : kNegInf;
        const double right = i + 1 < n_scan ? vs[i + 1] : kNegInf;
        const bool local_max = vs[i] > kNegInf && vs[i] >= left && vs[i] >= right;
        const bool endpoint = i == 0 || i + 1 == n_scan;
        if (!local_max && !(endpoint && vs[i] > kNegInf)) continue;
        const double bl = xs[std::max(i - 1, 0)];
        const double bh = xs[std::min(i + 1, n_scan - 1)];
        const auto [x_min, neg_v] = boost::math::tools::brent_find_minima(neg, bl, bh, 45);
        if (-neg_v > best.value) best = {x_min, -neg_v};
    }
    return best;
}

struct CornerResult {
    double theta_big;
    double v1;
};

double corner_theta_max(const Context& ctx) {
    double theta = std::max(2.0, 2.0 / ctx.kappa);
    double prev = ctx.v1_gains_only(theta);
    int decreases = 0;
    while (decreases < 2) {
        theta *= 2.0;
        if (theta > 1e15)
            throw ModelError(Errc::transversality,
                             "gains-only value keeps growing with the sales point; "
                             "the problem is unbounded");
        const double v = ctx.v1_gains_only(theta);
        decreases = (v < prev) ? decreases + 1 : 0;
        prev = v;
    }
    return theta;
}

CornerResult solve_corner(const Context& ctx, double theta_max) {
    const double lo = (1.0 / ctx.kappa) * (1.0 + 1e-9) + 1e-12;
    const auto f = [&](double t) { return ctx.v1_gains_only(t); };
    Best1D best = maximize_scan_brent(f, lo, theta_max, 257);

    // Newton polish on the single pasting condition.
    double b = best.x;
    for (int it = 0; it < 30; ++it) {
        const double c1 = ctx.burst_at(b) / ctx.c1_of(b);
        const double g = pasting_gap(ctx, c1, 0.0, c1, b);
        const double h = 1e-7 * b;
        const double c1p = ctx.burst_at(b + h) / ctx.c1_of(b + h);
        const double c1m = ctx.burst_at(b - h) / ctx.c1_of(b - h);
        const double dg = (pasting_gap(ctx, c1p, 0.0, c1p, b + h) -
                           pasting_gap(ctx, c1m, 0.0, c1m, b - h)) /
                          (2.0 * h);
        if (!std::isfinite(dg) || dg == 0.0) break;
        const double step = g / dg;
        const double b_new = std::clamp(b - step, lo, theta_max);
        if (std::abs(b_new - b) < 1e-14 * b) {
            b = b_new;
            break;
        }
        b = b_new;
    }
    const double vb = ctx.v1_gains_only(b);
    if (vb >= best.value) return {b, vb};
    return {best.x, best.value};
}

struct InteriorResult {
    bool found = false;
    double theta = 0.0;
    double theta_big = 0.0;
    double v1 = kNegInf;
};

void newton_polish_two_point(const Context& ctx, double& theta, double& theta_big,
                             double theta_hi_cap) {
    const auto gaps = [&](double t, double b, double& g1, double& g2) -> bool {
        const double c1_lo = ctx.c1_of(t), c2_lo = ctx.c2_of(t);
        const double c1_hi = ctx.c1_of(b), c2_hi = ctx.c2_of(b);
        const double det = c1_hi * c2_lo - c1_lo * c2_hi;
        if (!std::isfinite(det) || det == 0.0) return false;
        const double u_hi = ctx.burst_at(b), u_lo = ctx.burst_at(t);
        const double c1 = (c2_lo * u_hi - c2_hi * u_lo) / det;
        const double c2 = (c1_hi * u_lo - c1_lo * u_hi) / det;
        const double v1 = c1 + c2;
        g1 = pasting_gap(ctx, c1, c2, v1, t);
        g2 = pasting_gap(ctx, c1, c2, v1, b);
        return std::isfinite(g1) && std::isfinite(g2);
    };

    double t = theta, b = theta_big;
    double g1, g2;
    if (!gaps(t, b, g1, g2)) return;
    double norm = std::hypot(g1, g2);

    for (int it = 0; it < 25 && norm > 0.0; ++it) {
        const double ht = std::max(1e-8 * t, 1e-12);
        const double hb = std::max(1e-8 * b, 1e-12);
        double g1t, g2t, g1b, g2b, g1t2, g2t2, g1b2, g2b2;
        if (!gaps(t + ht, b, g1t, g2t) || !gaps(t - ht, b, g1t2, g2t2) ||
            !gaps(t, b + hb, g1b, g2b) || !gaps(t, b - hb, g1b2, g2b2))
            return;
        const double j11 = (g1t - g1t2) / (2.0 * ht), j12 = (g1b - g1b2) / (2.0 * hb);
        const double j21 = (g2t - g2t2) / (2.0 * ht), j22 = (g2b - g2b2) / (2.0 * hb);
        const double det = j11 * j22 - j12 * j21;
        if (!std::isfinite(det) || det == 0.0) return;
        double dt = (g1 * j22 - g2 * j12) / det;
        double db = (j11 * g2 - j21 * g1) / det;

        // Damped update staying inside the feasible box.
        double scale = 1.0;
        double t_new, b_new, g1_new, g2_new, norm_new;
        bool improved = false;
        for (int bt = 0; bt < 8; ++bt) {
            t_new = std::clamp(t - scale * dt, kThetaMin, kThetaMaxFrac);
            b_new = std::clamp(b - scale * db, (1.0 / ctx.kappa) * (1.0 + 1e-9),
                               theta_hi_cap);
            if (gaps(t_new, b_new, g1_new, g2_new)) {
                norm_new = std::hypot(g1_new, g2_new);
                if (norm_new < norm) {
                    improved = true;
                    break;
                }
            }
            scale *= 0.5;
        }
        if (!improved) return;
        t = t_new;
        b = b_new;
        g1 = g1_new;
        g2 = g2_new;
        norm = norm_new;
        if (norm < 1e-13) break;
    }
    theta = t;
    theta_big = b;
}

InteriorResult solve_interior(const Context& ctx, double theta_max) {
    const double b_lo = (1.0 / ctx.kappa) * (1.0 + 1e-9) + 1e-12;
    const double b_hi = theta_max;

    // 8x8 log-spaced multi-start; coordinate descent with scan+Brent passes.
    struct Candidate {
        double theta, theta_big, v1;
    };
    std::vector<Candidate> candidates;
    constexpr int kStarts = 8;
    for (int i = 0; i < kStarts; ++i) {
        const double t0 = std::exp(std::log(0.02) +
                                   (std::log(0.95) - std::log(0.02)) * i / (kStarts - 1.0));
        for (int j = 0; j < kStarts; ++j) {
            const double b0 = std::exp(std::log(b_lo * 1.001) +
                                       (std::log(b_hi) - std::log(b_lo * 1.001)) * j /
                                           (kStarts - 1.0));
            double t = t0, b = b0;
            double v = ctx.v1_two_point(t, b);
            for (int it = 0; it < 60; ++it) {
                const Best1D rb = maximize_scan_brent(
                    [&](double x) { return ctx.v1_two_point(t, x); }, b_lo, b_hi, 48);
                const double b_new = rb.x;
                const Best1D rt = maximize_scan_brent(
                    [&](double x) { return ctx.v1_two_point(x, b_new); }, kThetaMin,
                    kThetaMaxFrac, 48);
                const bool settled = std::abs(rt.x - t) < kThresholdTol &&
                                     std::abs(b_new - b) < kThresholdTol &&
                                     rt.value - v < kValueTol;
                t = rt.x;
                b = b_new;
                v = rt.value;
                if (settled) break;
            }
            if (v > kNegInf) candidates.push_back({t, b, v});
        }
    }

    // A real interior optimum must satisfy smooth pasting. Coordinate descent
    // also parks on the theta -> 0 plateau (where the value equals the
    // gains-only corner and theta is arbitrary); such candidates belong to
    // the corner branch and are rejected here. Walk distinct candidates from
    // the best down, polish each, and accept the first stationary one.
    std::sort(candidates.begin(), candidates.end(),
              [](const Candidate& a, const Candidate& b) { return a.v1 > b.v1; });
    InteriorResult best;
    std::vector<Candidate> examined;
    for (const Candidate& cand : candidates) {
        if (examined.size() >= 10) break;
        bool duplicate = false;
        for (const Candidate& seen : examined) {
            // Distinctness is judged on thresholds, not value.
            if (std::abs(seen.theta - cand.theta) < 1e-5 &&
                std::abs(seen.theta_big - cand.theta_big) < 1e-5)
                duplicate = true;
        }
        if (duplicate) continue;
        examined.push_back(cand);

        double t = cand.theta, b = cand.theta_big;
        newton_polish_two_point(ctx, t, b, b_hi);
        if (t <= kThetaMin * 2.0 || t >= kThetaMaxFrac - kThetaMin) continue;
        const double v = ctx.v1_two_point(t, b);
        if (!(v > kNegInf) || v < cand.v1 - 1e-9 * std::max(1.0, std::abs(cand.v1)))
            continue;
        const ValueCoefficients c = coefficients_at(ctx, t, b);
        const double v1 = c.c1 + c.c2;
        if (std::abs(pasting_residual_rel(ctx, c.c1, c.c2, v1, t)) > 1e-4) continue;
        if (std::abs(pasting_residual_rel(ctx, c.c1, c.c2, v1, b)) > 1e-4) continue;
        best.found = true;
        best.theta = t;
        best.theta_big = b;
        best.v1 = v;
        break;
    }
    return best;
}

std::string transversality_message(const TransversalityReport& report) {
    std::ostringstream msg;
    msg << "parameters violate transversality:";
    for (const auto& v : report.violations)
        msg << " [" << transversality_code_name(v.code) << "] " << v.message;
    return msg.str();
}

}  // namespace

ValueCoefficients value_coefficients(double theta, double theta_big, const UtilitySpec& u,
                                     const AssetParams& asset, const CostSpec& costs) {
    if (!(theta > 0.0 && theta < 1.0 && theta_big > 1.0))
        throw ModelError(Errc::degenerate,
                         "two-point coefficients need 0 < theta < 1 < theta_big");
    const Context ctx = make_context(u, asset, costs);
    return coefficients_at(ctx, theta, theta_big);
}

ValueCoefficients value_coefficients_gains_only(double theta_big, const UtilitySpec& u,
                                                const AssetParams& asset,
                                                const CostSpec& costs) {
    const Context ctx = make_context(u, asset, costs);
    if (!(theta_big > 1.0 / ctx.kappa))
        throw ModelError(Errc::degenerate, "gains-only needs theta_big > 1/kappa");
    const double denom = ctx.c1_of(theta_big);
    if (!std::isfinite(denom) || std::abs(denom) < 1e-300)
        throw ModelError(Errc::singular, "gains-only denominator vanishes");
    ValueCoefficients coeffs{};
    coeffs.c1 = ctx.burst_at(theta_big) / denom;
    coeffs.c2 = 0.0;
    coeffs.gamma = ctx.gamma;
    coeffs.theta = 0.0;
    coeffs.theta_big = theta_big;
    return coeffs;
}

double reduced_value(double x, const ValueCoefficients& coeffs) {
    const double tol = 1e-9 * std::max(1.0, std::abs(x));
    if (x < coeffs.theta - tol || x > coeffs.theta_big + tol)
        throw ModelError(Errc::out_of_region,
                         "x lies outside the continuation region [theta, theta_big]");
    if (x == 0.0) return 0.0;  // gains-only limit, c2 = 0 and gamma1 > 0
    return coeffs.c1 * std::pow(x, coeffs.gamma.gamma1) +
           coeffs.c2 * std::pow(x, coeffs.gamma.gamma2);
}

Policy optimize_policy(const UtilitySpec& u, const AssetParams& asset, const CostSpec& costs) {
    const TransversalityReport report = check_transversality(u, asset, costs);
    if (!report.ok)
        throw ModelError(Errc::transversality, transversality_message(report));

    const Context ctx = make_context(u, asset, costs);
    const double theta_max = corner_theta_max(ctx);
    const CornerResult corner = solve_corner(ctx, theta_max);
    const InteriorResult interior = solve_interior(ctx, theta_max);

    Policy policy{};
    policy.warnings = report.warnings;

    const bool tie = interior.found && std::abs(interior.v1 - corner.v1) < kValueTol;
    const bool interior_wins = interior.found && (tie || interior.v1 > corner.v1);

    if (interior_wins) {
        policy.regime = PolicyRegime::two_point;
        policy.theta = interior.theta;
        policy.theta_big = interior.theta_big;
        policy.v1 = interior.v1;
        policy.coefficients = coefficients_at(ctx, interior.theta, interior.theta_big);
        if (tie)
            policy.warnings.push_back(
                "REGIME_BOUNDARY: two-point and gains-only values tie at this lambda");
    } else {
        policy.regime = PolicyRegime::gains_only;
        policy.theta = 0.0;
        policy.theta_big = corner.theta_big;
        policy.v1 = corner.v1;
        policy.coefficients =
            value_coefficients_gains_only(corner.theta_big, u, asset, costs);
    }

    if (!(policy.v1 > 0.0))
        throw ModelError(Errc::no_participation,
                         "maximum attainable value is not positive; staying out of the "
                         "market dominates");
    return policy;
}

PastingResiduals smooth_pasting_residuals(const Policy& policy, const UtilitySpec& u,
                                          const AssetParams& asset, const CostSpec& costs) {
    const Context ctx = make_context(u, asset, costs);
    PastingResiduals res{};
    if (policy.regime == PolicyRegime::two_point) {
        const ValueCoefficients c = coefficients_at(ctx, policy.theta, policy.theta_big);
        const double v1 = c.c1 + c.c2;
        res.lower = pasting_residual_rel(ctx, c.c1, c.c2, v1, policy.theta);
        res.upper = pasting_residual_rel(ctx, c.c1, c.c2, v1, policy.theta_big);
    } else {
        const ValueCoefficients c =
            value_coefficients_gains_only(policy.theta_big, u, asset, costs);
        res.lower = std::nullopt;
        res.upper = pasting_residual_rel(ctx, c.c1, 0.0, c.c1, policy.theta_big);
    }
    return res;
}

CriticalLambda critical_lambda(const UtilitySpec& u, const AssetParams& asset,
                               const CostSpec& costs) {
    const TransversalityReport report = check_transversality(u, asset, costs);
    if (!report.ok)
        throw ModelError(Errc::transversality, transversality_message(report));
    const Context ctx = make_context(u, asset, costs);
    if (!(u.beta < ctx.gamma.gamma1))
        throw ModelError(Errc::transversality,
                         "critical lambda needs beta strictly below gamma1");

    const double g1 = ctx.gamma.gamma1;
    const double kb = ctx.k_pow_beta;
    const double kap = ctx.kappa;
    const double beta = ctx.beta;

    // First-order boundary equations at the regime knife edge; alpha is
    // alpha_g on the gain side and alpha_l on the loss side.
    const auto root_fn = [&](double alpha) {
        if (u.family == UtilityFamily::scaled_tk) {
            return std::function<double(double)>([=](double phi) {
                return (alpha - g1) * kap * std::pow(phi, g1 + 1.0 - beta) +
                       g1 * std::pow(phi, g1 - beta) - (alpha - beta) * kb * kap * phi -
                       beta * kb;
            });
        }
        return std::function<double(double)>([=](double phi) {
            return (alpha - g1) * std::pow(kap, alpha) * std::pow(phi, g1 + alpha - beta) +
                   g1 * std::pow(phi, g1 - beta) -
                   (alpha - beta) * kb * std::pow(kap * phi, alpha) - beta * kb;
        });
    };

    const auto refine = [&](const std::function<double(double)>& f, double lo, double hi) {
        boost::math::tools::eps_tolerance<double> tol(52);
        std::uintmax_t iters = 200;
        const auto r = boost::math::tools::toms748_solve(f, lo, hi, tol, iters);
        return 0.5 * (r.first + r.second);
    };

    // Gain side: first sign change above 1/kappa.
    const auto f_gain = root_fn(u.alpha_g);
    double theta_big_star = 0.0;
    {
        const double lo = (1.0 / kap) * (1.0 + 1e-10);
        const double hi = 1e9;
        constexpr int n = 2000;
        double prev_x = lo, prev_f = f_gain(lo);
        bool found = false;
        for (int i = 1; i <= n && !found; ++i) {
            const double x = lo * std::pow(hi / lo, i / static_cast<double>(n));
            const double fx = f_gain(x);
            if (std::isfinite(fx) && std::isfinite(prev_f) && prev_f * fx <= 0.0 &&
                prev_f != fx) {
                theta_big_star = refine(f_gain, prev_x, x);
                found = true;
            }
            prev_x = x;
            prev_f = fx;
        }
        if (!found)
            throw ModelError(Errc::no_root,
                             "no bracket for Theta* in (1/kappa, 1e9)");
    }

    // Loss side: largest root in (0, 1), scanned downward from 1.
    const auto f_loss = root_fn(u.alpha_l);
    double theta_star = 0.0;
    {
        const double hi = 1.0 - 1e-10;
        const double lo = 1e-12;
        constexpr int n = 2000;
        double prev_x = hi, prev_f = f_loss(hi);
        bool found = false;
        for (int i = 1; i <= n && !found; ++i) {
            const double x = hi * std::pow(lo / hi, i / static_cast<double>(n));
            const double fx = f_loss(x);
            if (std::isfinite(fx) && std::isfinite(prev_f) && prev_f * fx <= 0.0 &&
                prev_f != fx) {
                theta_star = refine(f_loss, x, prev_x);
                found = true;
            }
            prev_x = x;
            prev_f = fx;
        }
        if (!found)
            throw ModelError(Errc::no_root, "no bracket for theta* in (0, 1)");
    }

    // lambda* equates the gains-only and two-point values: the burst at the
    // loss boundary scales linearly in lambda, so the ratio of boundary
    // mismatches pins it down.
    UtilitySpec unit = u;
    unit.lambda = 1.0;
    const double u_gain = burst(kap * theta_big_star - 1.0, unit);
    const double u_loss_unit = burst(kap * theta_star - 1.0, unit);  // negative
    const double c_lo = std::pow(theta_star, g1) - kb * std::pow(theta_star, beta);
    const double c_hi = std::pow(theta_big_star, g1) - kb * std::pow(theta_big_star, beta);
    const double lambda_star = u_gain * c_lo / (u_loss_unit * c_hi);
    if (!std::isfinite(lambda_star) || lambda_star < 0.0)
        throw ModelError(Errc::no_root, "critical lambda is not finite at the solved roots");
    return CriticalLambda{lambda_star, theta_star, theta_big_star};
}

}  // namespace reutil
