#pragma once

#include <optional>
#include <string>
#include <vector>

#include "reutil/error.hpp"

namespace reutil {

// Geometric Brownian motion of the invested value, dX/X = mu dt + sigma dW.
// Rates are decimals per year; sigma is the log volatility per sqrt-year.
struct AssetParams {
    double mu = 0.09;
    double sigma = 0.30;
};

// Proportional transaction costs. Selling X and reinvesting leaves
// K * X with K = (1 - k_s) / (1 + k_p). The subjective factor kappa
// determines how costs enter the realized gain, G = kappa*X - R; it
// defaults to K (costs fully recognized) and must lie in [K, 1].
struct CostSpec {
    double k_s = 0.0;
    double k_p = 0.0;
    std::optional<double> kappa_override = std::nullopt;

    double round_trip() const { return (1.0 - k_s) / (1.0 + k_p); }
    double kappa() const { return kappa_override ? *kappa_override : round_trip(); }
};

enum class UtilityFamily { scaled_tk, modified_tk };

// Burst utility parameters. scaled_tk:  u(g) = g^alpha_g (g >= 0),
// -lambda*(-g)^alpha_l (g < 0). modified_tk: u(g) = [(1+g)^alpha_g - 1]/alpha_g
// for gains and -lambda*[1 - (1+g)^alpha_l]/alpha_l for losses on g >= -1.
// beta scales the whole burst by R^beta; delta is the discount rate.
struct UtilitySpec {
    UtilityFamily family = UtilityFamily::scaled_tk;
    double alpha_g = 0.5;
    double alpha_l = 0.5;
    double lambda = 2.0;
    double beta = 0.0;
    double delta = 0.05;
};

// Characteristic roots of (sigma^2/2) g(g-1) + mu g - delta = 0.
// gamma1 > 0 > gamma2; gamma1+gamma2 = 1 - 2mu/sigma^2, gamma1*gamma2 = -2delta/sigma^2.
struct GammaRoots {
    double gamma1;
    double gamma2;
};

enum class TransversalityCode {
    nonpositive_delta,
    beta_exceeds_gamma1,
    alpha_g_exceeds_gamma1,
    zero_costs_scaled_tk,
};

std::string_view transversality_code_name(TransversalityCode code);

struct TransversalityViolation {
    TransversalityCode code;
    std::string message;
};

struct TransversalityReport {
    bool ok = true;
    std::vector<TransversalityViolation> violations;
    // Non-fatal notes, e.g. beta == gamma1 exactly (theta* and lambda* collapse to 0).
    std::vector<std::string> warnings;
};

void validate(const AssetParams& asset);
void validate(const CostSpec& costs);
void validate(const UtilitySpec& u);

double round_trip_factor(const CostSpec& costs);

GammaRoots gamma_roots(const AssetParams& asset, double delta);

TransversalityReport check_transversality(const UtilitySpec& u, const AssetParams& asset,
                                          const CostSpec& costs);

}  // namespace reutil
