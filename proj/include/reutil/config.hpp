#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "reutil/aggregation.hpp"
#include "reutil/mc.hpp"
#include "reutil/params.hpp"

namespace reutil {

struct PopulationTypeConfig {
    double pi;
    int n;
    TradingRule rule;
};

struct PopulationGroupConfig {
    int n;
    TradingRule rule;
};

// Account-structure section. Exactly one of {m, (n_bar, sigma_n), counts}
// describes sizes for representative aggregation; types/groups describe
// heterogeneous populations.
struct PopulationConfig {
    std::optional<double> m;
    std::optional<double> n_bar;
    std::optional<double> sigma_n;
    std::vector<std::pair<int, double>> counts;
    std::vector<PopulationTypeConfig> types;
    std::vector<PopulationGroupConfig> groups;

    AccountSizeMix mix() const;
};

struct SimSettings {
    std::uint64_t seed = 1;
    double dt = 1.0 / 2500.0;
    std::int64_t n_episodes = 100000;
    bool antithetic = false;
    int threads = 0;
    double horizon_years = 20.0;
    int n_accounts = 100;
    double burn_in_years = -1.0;

    SimConfig sim_config() const {
        return SimConfig{seed, dt, n_episodes, antithetic, threads};
    }
    AccountSimConfig account_config() const {
        return AccountSimConfig{horizon_years, n_accounts, burn_in_years};
    }
};

// Parsed run configuration. Sections are {asset, costs, utility, policy,
// poisson, population, sim}; unknown keys are rejected with their JSON path.
struct Config {
    AssetParams asset;
    CostSpec costs;
    std::optional<UtilitySpec> utility;
    std::optional<ThresholdRule> policy;
    std::optional<double> rho;
    std::optional<PopulationConfig> population;
    SimSettings sim;
};

// Overrides are dotted-path assignments like "asset.mu=0.12"; values parse as
// JSON first and fall back to strings.
Config load_config_file(const std::string& path, const std::vector<std::string>& overrides = {});
Config parse_config_text(const std::string& text, const std::vector<std::string>& overrides = {},
                         const std::string& origin = "<config>");

// Serialized form that load/parse accepts back (reports embed it).
std::string config_to_json_text(const Config& config);

}  // namespace reutil
