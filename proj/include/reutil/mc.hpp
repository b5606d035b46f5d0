#pragma once

#include <cstdint>
#include <vector>

#include "reutil/aggregation.hpp"
#include "reutil/params.hpp"

namespace reutil {

// Episode-level simulation settings. Identical configs give bit-identical
// results: every episode draws from its own substream keyed by (seed, index)
// and reductions run in stream order regardless of threading.
struct SimConfig {
    std::uint64_t seed = 1;
    double dt = 1.0 / 2500.0;  // years per step (10 steps per trading day)
    std::int64_t n_episodes = 100000;
    bool antithetic = false;
    int threads = 0;  // 0 = hardware concurrency
};

struct Estimate {
    double value;
    double se;
};

struct ThresholdSimResult {
    Estimate q_gain;
    Estimate phi_gain;
    Estimate mean_duration;  // years
    std::int64_t n_episodes;
};

struct PoissonSimResult {
    Estimate gain_multiple;   // mean of x | gain
    Estimate loss_fraction;   // mean of x | loss
    Estimate q_gain;
    Estimate phi_gain;
    Estimate mean_duration;  // years
    std::int64_t n_episodes;
};

// Optional per-episode ledger row.
struct EpisodeRecord {
    std::int64_t stream;
    double t_start;
    double t_end;
    double x_exit;
    bool is_gain;
};

ThresholdSimResult simulate_threshold_episodes(double theta, double theta_big,
                                               const AssetParams& asset, const SimConfig& cfg,
                                               std::vector<EpisodeRecord>* ledger = nullptr);

PoissonSimResult simulate_poisson_episodes(double rho, const AssetParams& asset,
                                           const SimConfig& cfg,
                                           std::vector<EpisodeRecord>* ledger = nullptr);

// One account archetype: a population weight and the rules of the stocks it
// holds. Heterogeneous investors are several archetypes; heterogeneous
// holdings are one archetype mixing rules.
struct AccountSpec {
    double weight;
    std::vector<TradingRule> stocks;
};

struct AccountSimConfig {
    double horizon_years = 20.0;
    int n_accounts = 100;
    // Negative means the default of 5x the longest mean episode length in the
    // population, so the steady-state age distribution applies.
    double burn_in_years = -1.0;
};

struct AccountSimResult {
    Estimate pgr;
    Estimate plr;
    Estimate odean;
    Estimate phi_gain;  // paper-gain share among counted paper positions
    std::int64_t n_sales;
    double burn_in_years;
};

AccountSimResult simulate_accounts(const std::vector<AccountSpec>& accounts,
                                   const AssetParams& asset, const AccountSimConfig& acct_cfg,
                                   const SimConfig& cfg);

}  // namespace reutil
