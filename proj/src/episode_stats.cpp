#include "reutil/episode_stats.hpp"

#include <cmath>

namespace reutil {

namespace {

constexpr double kEtaLimit = 1e-8;    // |eta| below this uses L'Hopital forms
constexpr double kRhoMuLimit = 1e-10;

double eta_of(const AssetParams& asset) {
    return 1.0 - 2.0 * asset.mu / (asset.sigma * asset.sigma);
}

void check_thresholds(double theta, double theta_big) {
    if (!(theta > 0.0) || !(theta < 1.0) || !(theta_big > 1.0))
        throw ModelError(Errc::degenerate,
                         "two-point rule requires 0 < theta < 1 < theta_big");
}

}  // namespace

EpisodeStats threshold_stats(double theta, double theta_big, const AssetParams& asset) {
    validate(asset);
    check_thresholds(theta, theta_big);

    const double eta = eta_of(asset);
    const double sigma2 = asset.sigma * asset.sigma;
    const double log_lo = std::log(theta);      // < 0
    const double log_hi = std::log(theta_big);  // > 0

    EpisodeStats s{};
    if (std::abs(eta) < kEtaLimit) {
        // Driftless in logs: occupation and exit split by log distances.
        const double span = log_hi - log_lo;
        s.q_gain = -log_lo / span;
        s.phi_gain = log_hi / span;
        s.mean_duration = -log_lo * log_hi / sigma2;
    } else {
        const double lo_eta = std::pow(theta, eta);
        const double hi_eta = std::pow(theta_big, eta);
        const double denom = (1.0 - lo_eta) * log_hi + (hi_eta - 1.0) * log_lo;
        s.q_gain = (1.0 - lo_eta) / (hi_eta - lo_eta);
        s.phi_gain = (1.0 - lo_eta) * (log_hi - (hi_eta - 1.0) / eta) / denom;
        s.mean_duration = denom / ((hi_eta - lo_eta) * (asset.mu - 0.5 * sigma2));
    }
    s.q_loss = 1.0 - s.q_gain;
    s.phi_loss = 1.0 - s.phi_gain;
    return s;
}

EpisodeStats gains_only_stats(double theta_big, const AssetParams& asset) {
    validate(asset);
    if (!(theta_big > 1.0))
        throw ModelError(Errc::degenerate, "gains-only rule requires theta_big > 1");
    const double eta = eta_of(asset);
    if (!(eta < -kEtaLimit))
        throw ModelError(Errc::degenerate,
                         "gains-only episodes need 2*mu > sigma^2 to end in finite time");

    const double log_hi = std::log(theta_big);
    const double hi_eta = std::pow(theta_big, eta);
    EpisodeStats s{};
    s.q_gain = 1.0;
    s.q_loss = 0.0;
    s.phi_gain = (log_hi - (hi_eta - 1.0) / eta) / log_hi;
    s.phi_loss = 1.0 - s.phi_gain;
    s.mean_duration = log_hi / (asset.mu - 0.5 * asset.sigma * asset.sigma);
    return s;
}

double steady_state_pdf(double x, double theta, double theta_big, const AssetParams& asset) {
    validate(asset);
    check_thresholds(theta, theta_big);
    if (!(x >= theta) || !(x <= theta_big))
        throw ModelError(Errc::out_of_support, "x must lie in [theta, theta_big]");

    const double eta = eta_of(asset);
    const double log_lo = std::log(theta);
    const double log_hi = std::log(theta_big);

    if (std::abs(eta) < kEtaLimit) {
        const double span = log_hi - log_lo;
        if (x <= 1.0) return 2.0 * std::log(x / theta) / (x * (-log_lo) * span);
        return 2.0 * std::log(theta_big / x) / (x * log_hi * span);
    }

    const double lo_eta = std::pow(theta, eta);
    const double hi_eta = std::pow(theta_big, eta);
    const double denom = (1.0 - lo_eta) * log_hi + (hi_eta - 1.0) * log_lo;
    if (x <= 1.0)
        return (hi_eta - 1.0) * (lo_eta * std::pow(x, -eta) - 1.0) / (x * denom);
    return (lo_eta - 1.0) * (hi_eta * std::pow(x, -eta) - 1.0) / (x * denom);
}

double steady_state_cdf(double x, double theta, double theta_big, const AssetParams& asset) {
    validate(asset);
    check_thresholds(theta, theta_big);
    if (!(x >= theta) || !(x <= theta_big))
        throw ModelError(Errc::out_of_support, "x must lie in [theta, theta_big]");

    const double eta = eta_of(asset);
    const double log_lo = std::log(theta);
    const double log_hi = std::log(theta_big);

    if (std::abs(eta) < kEtaLimit) {
        const double span = log_hi - log_lo;
        if (x <= 1.0) {
            const double d = std::log(x / theta);
            return d * d / ((-log_lo) * span);
        }
        const double d = std::log(theta_big / x);
        return 1.0 - d * d / (log_hi * span);
    }

    const double lo_eta = std::pow(theta, eta);
    const double hi_eta = std::pow(theta_big, eta);
    const double denom = (1.0 - lo_eta) * log_hi + (hi_eta - 1.0) * log_lo;
    if (x <= 1.0) {
        const double ratio = std::pow(theta / x, eta);
        return (hi_eta - 1.0) * (std::log(theta / x) + (1.0 - ratio) / eta) / denom;
    }
    const double ratio = std::pow(theta_big / x, eta);
    return 1.0 - (lo_eta - 1.0) * (std::log(x / theta_big) + (ratio - 1.0) / eta) / denom;
}

PoissonStats poisson_stats(double rho, const AssetParams& asset) {
    validate(asset);
    if (!(rho > 0.0))
        throw ModelError(Errc::degenerate, "Poisson intensity must be positive");

    const double sigma2 = asset.sigma * asset.sigma;
    const double drift = asset.mu - 0.5 * sigma2;
    const double disc = std::sqrt(drift * drift + 2.0 * rho * sigma2);
    const double psi_plus = (-drift + disc) / sigma2;
    const double psi_minus = (-drift - disc) / sigma2;

    PoissonStats s{};
    s.q_gain = psi_minus / (psi_minus - psi_plus);
    s.phi_gain = s.q_gain;
    s.mean_duration = 1.0 / rho;

    if (rho > asset.mu + kRhoMuLimit) {
        s.mean_gain_multiple = -rho * (1.0 - psi_minus) / ((rho - asset.mu) * psi_minus);
    } else {
        s.mean_gain_multiple = std::nullopt;  // infinite for rho <= mu
    }
    if (std::abs(rho - asset.mu) < kRhoMuLimit) {
        s.mean_loss_fraction = asset.mu / (asset.mu + 0.5 * sigma2);
    } else {
        s.mean_loss_fraction = rho * (psi_plus - 1.0) / ((rho - asset.mu) * psi_plus);
    }
    return s;
}

}  // namespace reutil
