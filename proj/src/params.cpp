#include "reutil/params.hpp"

#include <cmath>
#include <sstream>

namespace reutil {

std::string_view errc_name(Errc code) {
    switch (code) {
        case Errc::invalid_sigma: return "INVALID_SIGMA";
        case Errc::nonpositive_delta: return "NONPOSITIVE_DELTA";
        case Errc::invalid_costs: return "INVALID_COSTS";
        case Errc::invalid_kappa: return "INVALID_KAPPA";
        case Errc::invalid_utility: return "INVALID_UTILITY";
        case Errc::domain: return "DOMAIN";
        case Errc::kink: return "KINK";
        case Errc::invalid_reference: return "INVALID_REFERENCE";
        case Errc::singular: return "SINGULAR";
        case Errc::out_of_region: return "OUT_OF_REGION";
        case Errc::transversality: return "TRANSVERSALITY";
        case Errc::no_participation: return "NO_PARTICIPATION";
        case Errc::no_root: return "NO_ROOT";
        case Errc::degenerate: return "DEGENERATE";
        case Errc::out_of_support: return "OUT_OF_SUPPORT";
        case Errc::horizon_too_short: return "HORIZON_TOO_SHORT";
        case Errc::config_parse: return "CONFIG_PARSE";
    }
    return "UNKNOWN";
}

std::string_view transversality_code_name(TransversalityCode code) {
    switch (code) {
        case TransversalityCode::nonpositive_delta: return "NONPOSITIVE_DELTA";
        case TransversalityCode::beta_exceeds_gamma1: return "BETA_EXCEEDS_GAMMA1";
        case TransversalityCode::alpha_g_exceeds_gamma1: return "ALPHA_G_EXCEEDS_GAMMA1";
        case TransversalityCode::zero_costs_scaled_tk: return "ZERO_COSTS_SCALED_TK";
    }
    return "UNKNOWN";
}

void validate(const AssetParams& asset) {
    if (!(asset.sigma > 0.0) || !std::isfinite(asset.sigma))
        throw ModelError(Errc::invalid_sigma, "sigma must be positive and finite");
    if (!std::isfinite(asset.mu))
        throw ModelError(Errc::invalid_sigma, "mu must be finite");
}

void validate(const CostSpec& costs) {
    if (!(costs.k_s >= 0.0) || !(costs.k_s < 1.0))
        throw ModelError(Errc::invalid_costs, "k_s must lie in [0, 1)");
    if (!(costs.k_p >= 0.0) || !std::isfinite(costs.k_p))
        throw ModelError(Errc::invalid_costs, "k_p must be nonnegative and finite");
    const double k = costs.round_trip();
    const double kappa = costs.kappa();
    if (!(kappa >= k - 1e-12) || !(kappa <= 1.0 + 1e-12))
        throw ModelError(Errc::invalid_kappa,
                         "kappa must lie in [K, 1], K = (1 - k_s)/(1 + k_p)");
}

void validate(const UtilitySpec& u) {
    if (!(u.delta > 0.0))
        throw ModelError(Errc::nonpositive_delta, "delta must be positive");
    if (!(u.lambda >= 0.0))
        throw ModelError(Errc::invalid_utility, "lambda must be nonnegative");
    if (!(u.beta >= 0.0))
        throw ModelError(Errc::invalid_utility, "beta must be nonnegative");
    if (u.family == UtilityFamily::scaled_tk) {
        if (!(u.alpha_g > 0.0 && u.alpha_g <= 1.0))
            throw ModelError(Errc::invalid_utility, "scaled-TK requires 0 < alpha_g <= 1");
        if (!(u.alpha_l > 0.0 && u.alpha_l <= 1.0))
            throw ModelError(Errc::invalid_utility, "scaled-TK requires 0 < alpha_l <= 1");
        const double bmax = std::min(u.alpha_g, u.alpha_l);
        if (u.beta > bmax + 1e-12)
            throw ModelError(Errc::invalid_utility,
                             "scaled-TK requires beta <= min(alpha_g, alpha_l)");
    } else {
        if (!std::isfinite(u.alpha_g))
            throw ModelError(Errc::invalid_utility, "alpha_g must be finite");
        if (!(u.alpha_l > 0.0))
            throw ModelError(Errc::invalid_utility,
                             "modified-TK losses require alpha_l > 0");
    }
}

double round_trip_factor(const CostSpec& costs) {
    validate(costs);
    return costs.round_trip();
}

GammaRoots gamma_roots(const AssetParams& asset, double delta) {
    validate(asset);
    if (!(delta > 0.0))
        throw ModelError(Errc::nonpositive_delta, "delta must be positive");

    // Quadratic (sigma^2/2) g^2 + (mu - sigma^2/2) g - delta = 0. The
    // discriminant is strictly positive; compute the larger-magnitude root
    // sign-matched to avoid cancellation and recover the other via Vieta.
    const double a = 0.5 * asset.sigma * asset.sigma;
    const double b = asset.mu - a;
    const double c = -delta;
    const double disc = std::sqrt(b * b - 4.0 * a * c);
    const double q = -0.5 * (b + std::copysign(disc, b));
    const double r1 = q / a;
    const double r2 = c / q;
    GammaRoots roots{std::max(r1, r2), std::min(r1, r2)};
    return roots;
}

TransversalityReport check_transversality(const UtilitySpec& u, const AssetParams& asset,
                                          const CostSpec& costs) {
    validate(asset);
    validate(costs);
    TransversalityReport report;

    if (!(u.delta > 0.0)) {
        report.ok = false;
        report.violations.push_back({TransversalityCode::nonpositive_delta,
                                     "delta must be positive for bounded value"});
        return report;  // gamma1 is undefined without a positive discount rate
    }

    const GammaRoots roots = gamma_roots(asset, u.delta);
    std::ostringstream msg;

    if (u.beta > roots.gamma1) {
        msg.str("");
        msg << "beta = " << u.beta << " exceeds gamma1 = " << roots.gamma1;
        report.violations.push_back({TransversalityCode::beta_exceeds_gamma1, msg.str()});
    } else if (u.beta == roots.gamma1) {
        report.warnings.push_back(
            "beta equals gamma1 exactly: theta* -> 0 and lambda* -> 0 at this boundary");
    }

    if (u.family == UtilityFamily::scaled_tk) {
        if (u.alpha_g > roots.gamma1) {
            msg.str("");
            msg << "alpha_g = " << u.alpha_g << " exceeds gamma1 = " << roots.gamma1;
            report.violations.push_back(
                {TransversalityCode::alpha_g_exceeds_gamma1, msg.str()});
        }
        if (costs.k_s + costs.k_p <= 0.0) {
            report.violations.push_back(
                {TransversalityCode::zero_costs_scaled_tk,
                 "scaled-TK with zero transaction costs admits unbounded utility"});
        }
    }

    report.ok = report.violations.empty();
    return report;
}

}  // namespace reutil
