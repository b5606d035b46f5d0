#pragma once

#include <optional>

#include "reutil/params.hpp"

namespace reutil {

// Long-run statistics of repeated investment episodes under a fixed
// two-point rule: sell at x = X/R equal to theta_big (gain) or theta (loss).
struct EpisodeStats {
    double q_gain;         // probability an episode ends in a realized gain
    double q_loss;         // 1 - q_gain
    double phi_gain;       // steady-state fraction of time with a paper gain
    double phi_loss;       // 1 - phi_gain
    double mean_duration;  // expected episode length in years
};

// Statistics for price-independent Poisson selling at intensity rho.
// mean_gain_multiple is empty when infinite (rho <= mu).
struct PoissonStats {
    std::optional<double> mean_gain_multiple;  // E[x | gain]
    double mean_loss_fraction;                 // E[x | loss]
    double q_gain;                             // equals phi_gain exactly
    double phi_gain;
    double mean_duration;  // 1/rho years
};

EpisodeStats threshold_stats(double theta, double theta_big, const AssetParams& asset);

// Limit of threshold_stats as theta -> 0 (losses never realized). Requires
// 2*mu > sigma^2 so that episodes end in finite expected time.
EpisodeStats gains_only_stats(double theta_big, const AssetParams& asset);

// Steady-state distribution of x over [theta, theta_big]; density vanishes at
// both boundaries and F(1) = 1 - phi_gain.
double steady_state_pdf(double x, double theta, double theta_big, const AssetParams& asset);
double steady_state_cdf(double x, double theta, double theta_big, const AssetParams& asset);

PoissonStats poisson_stats(double rho, const AssetParams& asset);

}  // namespace reutil
