#pragma once

#include <optional>
#include <string>
#include <vector>

#include "reutil/params.hpp"

namespace reutil {

// Coefficients of the reduced value v(x) = c1 x^gamma1 + c2 x^gamma2 on the
// continuation region [theta, theta_big]; theta is 0 for gains-only rules.
struct ValueCoefficients {
    double c1;
    double c2;
    GammaRoots gamma;
    double theta;
    double theta_big;
};

enum class PolicyRegime { two_point, gains_only };

struct Policy {
    double theta;      // 0 when gains_only
    double theta_big;
    PolicyRegime regime;
    double v1;  // reduced value immediately after a reinvestment
    ValueCoefficients coefficients;
    std::vector<std::string> warnings;
};

// Relative first-order-condition mismatches at the sales boundaries; lower is
// empty for gains-only policies (the corner has no pasting condition).
struct PastingResiduals {
    std::optional<double> lower;
    double upper;
};

// Loss aversion at which the two-point and gains-only policies tie, with the
// thresholds at that boundary.
struct CriticalLambda {
    double lambda_star;
    double theta_star;
    double theta_big_star;
};

ValueCoefficients value_coefficients(double theta, double theta_big, const UtilitySpec& u,
                                     const AssetParams& asset, const CostSpec& costs);

// Gains-only variant: c2 = 0 and c1 = u(kappa*Theta - 1) / (Theta^g1 - (K Theta)^beta).
ValueCoefficients value_coefficients_gains_only(double theta_big, const UtilitySpec& u,
                                                const AssetParams& asset,
                                                const CostSpec& costs);

double reduced_value(double x, const ValueCoefficients& coeffs);

Policy optimize_policy(const UtilitySpec& u, const AssetParams& asset, const CostSpec& costs);

PastingResiduals smooth_pasting_residuals(const Policy& policy, const UtilitySpec& u,
                                          const AssetParams& asset, const CostSpec& costs);

// Solves the regime-boundary system for (theta*, Theta*) and evaluates
// lambda*; u.lambda is ignored.
CriticalLambda critical_lambda(const UtilitySpec& u, const AssetParams& asset,
                               const CostSpec& costs);

}  // namespace reutil
