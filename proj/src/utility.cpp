#include "reutil/utility.hpp"

#include <cmath>
#include <limits>

namespace reutil {

namespace {

constexpr double kLogLimit = 1e-12;  // |alpha| below this uses the log form

double power_gain_modified(double one_plus_g, double alpha) {
    if (std::abs(alpha) < kLogLimit) return std::log(one_plus_g);
    return (std::pow(one_plus_g, alpha) - 1.0) / alpha;
}

}  // namespace

double burst(double g, const UtilitySpec& u) {
    validate(u);
    if (u.family == UtilityFamily::scaled_tk) {
        if (g >= 0.0) return std::pow(g, u.alpha_g);
        return -u.lambda * std::pow(-g, u.alpha_l);
    }
    if (g < -1.0)
        throw ModelError(Errc::domain, "modified-TK requires g >= -1");
    if (g >= 0.0) return power_gain_modified(1.0 + g, u.alpha_g);
    // Loss branch: -lambda * [1 - (1+g)^alpha_l] / alpha_l, alpha_l > 0.
    return u.lambda * power_gain_modified(1.0 + g, u.alpha_l);
}

double burst_marginal(double g, const UtilitySpec& u, std::optional<KinkSide> side) {
    validate(u);
    if (g == 0.0 && !side)
        throw ModelError(Errc::kink, "derivative at g = 0 requires a side");
    const bool gain_branch = (g > 0.0) || (g == 0.0 && *side == KinkSide::above);

    if (u.family == UtilityFamily::scaled_tk) {
        if (gain_branch) {
            if (g == 0.0)
                return u.alpha_g < 1.0 ? std::numeric_limits<double>::infinity()
                                       : 1.0;
            return u.alpha_g * std::pow(g, u.alpha_g - 1.0);
        }
        if (g == 0.0)
            return u.alpha_l < 1.0 ? std::numeric_limits<double>::infinity()
                                   : u.lambda;
        return u.lambda * u.alpha_l * std::pow(-g, u.alpha_l - 1.0);
    }

    if (g <= -1.0)
        throw ModelError(Errc::domain, "modified-TK marginal requires g > -1");
    if (gain_branch) return std::pow(1.0 + g, u.alpha_g - 1.0);
    return u.lambda * std::pow(1.0 + g, u.alpha_l - 1.0);
}

double full_burst(double gain, double reference, const UtilitySpec& u) {
    if (!(reference > 0.0))
        throw ModelError(Errc::invalid_reference, "reference level must be positive");
    return std::pow(reference, u.beta) * burst(gain / reference, u);
}

}  // namespace reutil
