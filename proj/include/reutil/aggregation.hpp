#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "reutil/episode_stats.hpp"
#include "reutil/params.hpp"

namespace reutil {

struct ThresholdRule {
    double theta;
    double theta_big;
};

struct PoissonRule {
    double rho;
};

using TradingRule = std::variant<ThresholdRule, PoissonRule>;

// Per-stock statistics entering a population mixture. gain_multiple is the
// fixed threshold (or the Poisson mean), empty when infinite.
struct TypeStats {
    std::optional<double> gain_multiple;
    double loss_fraction;
    double q_gain;
    double phi_gain;
    double mean_duration;  // years
};

TypeStats resolve_rule(const TradingRule& rule, const AssetParams& asset);

// Distribution of account sizes. The Odean statistics depend on it only
// through the multiplier m = n_bar + sigma_n^2 / n_bar.
struct AccountSizeMix {
    double n_bar = 1.0;
    double sigma_n = 0.0;

    double multiplier() const { return n_bar + sigma_n * sigma_n / n_bar; }

    static AccountSizeMix from_multiplier(double m);
    // Explicit (count, population fraction) list; counts must be >= 1 and
    // fractions must sum to 1.
    static AccountSizeMix from_counts(const std::vector<std::pair<int, double>>& counts);
};

// Pooled proportion of gains/losses realized and their ratio. odean is empty
// when plr = 0 (gains-only populations).
struct OdeanStats {
    double pgr;
    double plr;
    std::optional<double> odean;
};

// Trade-weighted aggregates of a heterogeneous population plus its Odean
// statistics. phi_gain_bar is empty when no account holds two stocks.
struct PopulationStats {
    std::optional<double> gain_multiple_bar;
    double loss_fraction_bar;
    double q_gain_bar;
    double mean_duration_bar;
    std::optional<double> phi_gain_bar;
    OdeanStats odean;
};

struct InvestorType {
    double pi;  // population fraction
    int n;      // stocks held
    TypeStats stats;
};

struct HoldingGroup {
    int n;  // stocks in this group of the representative account
    TypeStats stats;
};

OdeanStats representative_odean(double q_gain, double phi_gain, const AccountSizeMix& mix);
OdeanStats representative_odean(const EpisodeStats& stats, const AccountSizeMix& mix);
OdeanStats representative_odean(const PoissonStats& stats, const AccountSizeMix& mix);

PopulationStats heterogeneous_investors(const std::vector<InvestorType>& types);
PopulationStats heterogeneous_holdings(const std::vector<HoldingGroup>& groups);

}  // namespace reutil
