// Command-line front end: computes optimal realization policies, episode and
// population statistics, reproduces the calibration tables, and runs the
// Monte Carlo cross-checks. Data goes to stdout (or --out); diagnostics to
// stderr. Exit codes: 0 ok, 1 usage/config/model error, 2 transversality
// violation, 3 no participation.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "reutil/aggregation.hpp"
#include "reutil/config.hpp"
#include "reutil/episode_stats.hpp"
#include "reutil/mc.hpp"
#include "reutil/params.hpp"
#include "reutil/policy.hpp"
#include "reutil/utility.hpp"

using json = nlohmann::ordered_json;
using namespace reutil;

namespace {

constexpr double kTradingDays = 250.0;

struct CommonOpts {
    std::string config_path;
    std::string out_path;
    std::string format = "json";
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool config_required = true) {
    auto* c = cmd->add_option("--config", opts.config_path, "JSON configuration file");
    if (config_required) c->required();
    cmd->add_option("--out", opts.out_path, "write output to a file instead of stdout");
    cmd->add_option("--format", opts.format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--set", opts.overrides,
                    "override a config key by dotted path, e.g. --set asset.mu=0.12");
    cmd->add_option("--seed", opts.seed, "override sim.seed");
}

Config load(const CommonOpts& opts) {
    Config cfg = opts.config_path.empty()
                     ? parse_config_text("{\"asset\":{\"mu\":0.09,\"sigma\":0.30},"
                                         "\"costs\":{\"k_s\":0.01,\"k_p\":0.01}}",
                                         opts.overrides, "<defaults>")
                     : load_config_file(opts.config_path, opts.overrides);
    if (opts.seed) cfg.sim.seed = *opts.seed;
    return cfg;
}

void emit(const CommonOpts& opts, const std::string& text) {
    if (opts.out_path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(opts.out_path);
    if (!out) throw ModelError(Errc::config_parse, opts.out_path + ": cannot open for writing");
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// key,value CSV for scalar reports: nested keys flattened with dots.
void flatten_csv(const json& j, const std::string& prefix, std::ostringstream& out) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it)
            flatten_csv(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i)
            flatten_csv(j[i], prefix + "[" + std::to_string(i) + "]", out);
    } else {
        out << prefix << "," << (j.is_string() ? j.get<std::string>() : j.dump()) << "\n";
    }
}

std::string render_scalar(const CommonOpts& opts, const json& report) {
    if (opts.format == "json") return report.dump(2);
    std::ostringstream out;
    out << "key,value\n";
    flatten_csv(report, "", out);
    return out.str();
}

json config_json(const Config& cfg) { return json::parse(config_to_json_text(cfg)); }

UtilitySpec need_utility(const Config& cfg) {
    if (!cfg.utility)
        throw ModelError(Errc::config_parse, "this command needs a 'utility' section");
    return *cfg.utility;
}

json transversality_json(const TransversalityReport& rep) {
    json j;
    j["ok"] = rep.ok;
    j["violations"] = json::array();
    for (const auto& v : rep.violations)
        j["violations"].push_back({{"code", std::string(transversality_code_name(v.code))},
                                   {"message", v.message}});
    j["warnings"] = rep.warnings;
    return j;
}

json episode_stats_json(const EpisodeStats& s) {
    return json{{"q_gain", s.q_gain},
                {"q_loss", s.q_loss},
                {"phi_gain", s.phi_gain},
                {"phi_loss", s.phi_loss},
                {"mean_duration_years", s.mean_duration},
                {"mean_duration_days", s.mean_duration * kTradingDays}};
}

json odean_json(const OdeanStats& o) {
    json j{{"pgr", o.pgr}, {"plr", o.plr}};
    if (o.odean)
        j["odean"] = *o.odean;
    else
        j["odean"] = "inf";
    return j;
}

int run_policy(const CommonOpts& opts) {
    const Config cfg = load(opts);
    const UtilitySpec u = need_utility(cfg);
    const TransversalityReport rep = check_transversality(u, cfg.asset, cfg.costs);

    json report;
    report["command"] = "policy";
    report["config"] = config_json(cfg);
    report["transversality"] = transversality_json(rep);
    if (!rep.ok) {
        emit(opts, render_scalar(opts, report));
        for (const auto& v : rep.violations)
            std::cerr << transversality_code_name(v.code) << ": " << v.message << "\n";
        return 2;
    }

    Policy policy;
    try {
        policy = optimize_policy(u, cfg.asset, cfg.costs);
    } catch (const ModelError& e) {
        if (e.code() == Errc::no_participation) {
            report["policy"] = {{"regime", "no_participation"}};
            emit(opts, render_scalar(opts, report));
            std::cerr << e.what() << "\n";
            return 3;
        }
        throw;
    }

    const PastingResiduals res = smooth_pasting_residuals(policy, u, cfg.asset, cfg.costs);
    json p;
    p["regime"] = policy.regime == PolicyRegime::two_point ? "two_point" : "gains_only";
    if (policy.regime == PolicyRegime::two_point) {
        p["theta"] = policy.theta;
        p["theta_pct"] = (policy.theta - 1.0) * 100.0;
    } else {
        p["theta"] = 0.0;
        p["theta_pct"] = "never";
    }
    p["theta_big"] = policy.theta_big;
    p["theta_big_pct"] = (policy.theta_big - 1.0) * 100.0;
    p["v1"] = policy.v1;
    p["c1"] = policy.coefficients.c1;
    p["c2"] = policy.coefficients.c2;
    p["warnings"] = policy.warnings;
    report["policy"] = p;
    json sp;
    if (res.lower)
        sp["lower"] = *res.lower;
    else
        sp["lower"] = "not_applicable";
    sp["upper"] = res.upper;
    report["smooth_pasting"] = sp;
    emit(opts, render_scalar(opts, report));
    return 0;
}

int run_stats(const CommonOpts& opts) {
    const Config cfg = load(opts);
    if (!cfg.policy)
        throw ModelError(Errc::config_parse, "stats needs a 'policy' section with theta/theta_big");
    const EpisodeStats s = threshold_stats(cfg.policy->theta, cfg.policy->theta_big, cfg.asset);
    json report;
    report["command"] = "stats";
    report["config"] = config_json(cfg);
    report["stats"] = episode_stats_json(s);
    emit(opts, render_scalar(opts, report));
    return 0;
}

int run_poisson(const CommonOpts& opts) {
    const Config cfg = load(opts);
    if (!cfg.rho)
        throw ModelError(Errc::config_parse, "poisson needs a 'poisson' section with rho");
    const PoissonStats s = poisson_stats(*cfg.rho, cfg.asset);
    json report;
    report["command"] = "poisson";
    report["config"] = config_json(cfg);
    json stats;
    if (s.mean_gain_multiple)
        stats["mean_gain_multiple"] = *s.mean_gain_multiple;
    else
        stats["mean_gain_multiple"] = "inf";
    stats["mean_loss_fraction"] = s.mean_loss_fraction;
    stats["q_gain"] = s.q_gain;
    stats["phi_gain"] = s.phi_gain;
    stats["mean_duration_years"] = s.mean_duration;
    stats["mean_duration_days"] = s.mean_duration * kTradingDays;
    report["stats"] = stats;
    emit(opts, render_scalar(opts, report));
    return 0;
}

json population_stats_json(const PopulationStats& s) {
    json j;
    if (s.gain_multiple_bar)
        j["gain_multiple_bar"] = *s.gain_multiple_bar;
    else
        j["gain_multiple_bar"] = "inf";
    j["loss_fraction_bar"] = s.loss_fraction_bar;
    j["q_gain_bar"] = s.q_gain_bar;
    j["mean_duration_bar_years"] = s.mean_duration_bar;
    j["mean_duration_bar_days"] = s.mean_duration_bar * kTradingDays;
    if (s.phi_gain_bar)
        j["phi_gain_bar"] = *s.phi_gain_bar;
    else
        j["phi_gain_bar"] = "not_applicable";
    j["odean"] = odean_json(s.odean);
    return j;
}

int run_aggregate(const CommonOpts& opts) {
    const Config cfg = load(opts);
    if (!cfg.population)
        throw ModelError(Errc::config_parse, "aggregate needs a 'population' section");
    const PopulationConfig& pop = *cfg.population;

    json report;
    report["command"] = "aggregate";
    report["config"] = config_json(cfg);

    if (!pop.types.empty()) {
        std::vector<InvestorType> types;
        for (const auto& t : pop.types)
            types.push_back({t.pi, t.n, resolve_rule(t.rule, cfg.asset)});
        report["aggregate"] = population_stats_json(heterogeneous_investors(types));
    } else if (!pop.groups.empty()) {
        std::vector<HoldingGroup> groups;
        for (const auto& g : pop.groups)
            groups.push_back({g.n, resolve_rule(g.rule, cfg.asset)});
        report["aggregate"] = population_stats_json(heterogeneous_holdings(groups));
    } else {
        const AccountSizeMix mix = pop.mix();
        TypeStats stats{};
        if (cfg.policy)
            stats = resolve_rule(*cfg.policy, cfg.asset);
        else if (cfg.rho)
            stats = resolve_rule(PoissonRule{*cfg.rho}, cfg.asset);
        else
            throw ModelError(Errc::config_parse,
                             "representative aggregation needs 'policy' or 'poisson'");
        report["aggregate"] = {
            {"m", mix.multiplier()},
            {"odean", odean_json(representative_odean(stats.q_gain, stats.phi_gain, mix))}};
    }
    emit(opts, render_scalar(opts, report));
    return 0;
}

int run_lambda_star(const CommonOpts& opts) {
    const Config cfg = load(opts);
    const UtilitySpec u = need_utility(cfg);
    const CriticalLambda cl = critical_lambda(u, cfg.asset, cfg.costs);
    json report;
    report["command"] = "lambda-star";
    report["config"] = config_json(cfg);
    report["critical"] = {{"lambda_star", cl.lambda_star},
                          {"theta_star", cl.theta_star},
                          {"theta_big_star", cl.theta_big_star}};
    emit(opts, render_scalar(opts, report));
    return 0;
}

// ---------------------------------------------------------------------------
// table: reproduce the calibration tables end to end.

struct TableRow {
    std::string block;
    std::string beta_label;
    json values;
};

json stats_columns(const EpisodeStats& s, bool two_point, double theta, double theta_big,
                   const AccountSizeMix& mix) {
    const OdeanStats o = representative_odean(s.q_gain, s.phi_gain, mix);
    json v;
    v["theta_big_pct"] = (theta_big - 1.0) * 100.0;
    if (two_point)
        v["theta_pct"] = (theta - 1.0) * 100.0;
    else
        v["theta_pct"] = "never";
    v["q_gain_pct"] = s.q_gain * 100.0;
    v["phi_gain_pct"] = s.phi_gain * 100.0;
    v["mean_duration_days"] = s.mean_duration * kTradingDays;
    v["pgr_pct"] = o.pgr * 100.0;
    v["plr_pct"] = o.plr * 100.0;
    if (o.odean)
        v["odean"] = *o.odean;
    else
        v["odean"] = "inf";
    return v;
}

json optimized_columns(const UtilitySpec& u, const AssetParams& asset, const CostSpec& costs,
                       const AccountSizeMix& mix) {
    const Policy p = optimize_policy(u, asset, costs);
    const bool two_point = p.regime == PolicyRegime::two_point;
    const EpisodeStats s = two_point ? threshold_stats(p.theta, p.theta_big, asset)
                                     : gains_only_stats(p.theta_big, asset);
    return stats_columns(s, two_point, p.theta, p.theta_big, mix);
}

std::string render_table(const CommonOpts& opts, const std::string& table_id,
                         const std::vector<TableRow>& rows,
                         const std::vector<std::string>& columns) {
    if (opts.format == "json") {
        json out;
        out["command"] = "table";
        out["table"] = table_id;
        out["rows"] = json::array();
        for (const auto& r : rows) {
            json j = {{"block", r.block}, {"beta", r.beta_label}};
            for (const auto& [k, v] : r.values.items()) j[k] = v;
            out["rows"].push_back(j);
        }
        return out.dump(2);
    }
    std::ostringstream out;
    out << "block,beta";
    for (const auto& c : columns) out << "," << c;
    out << "\n";
    for (const auto& r : rows) {
        out << r.block << "," << r.beta_label;
        if (r.values.contains("note")) {  // annotated row, e.g. transversality
            out << "," << r.values.at("note").get<std::string>() << "\n";
            continue;
        }
        for (const auto& c : columns) {
            out << ",";
            if (!r.values.contains(c)) continue;
            const json& v = r.values.at(c);
            if (v.is_string()) {
                out << v.get<std::string>();
            } else if (c == "mean_duration_days") {
                out << fmt("%.0f", v.get<double>());
            } else if (c == "odean" || c.ends_with("_odean")) {
                out << fmt("%.2f", v.get<double>());
            } else {
                out << fmt("%.1f", v.get<double>());
            }
        }
        out << "\n";
    }
    return out.str();
}

int run_table(const CommonOpts& opts, const std::string& table_id) {
    const Config cfg = load(opts);
    const AssetParams asset = cfg.asset;
    const CostSpec costs = cfg.costs;
    const AccountSizeMix mix = cfg.population ? cfg.population->mix()
                                              : AccountSizeMix::from_multiplier(8.0);

    std::vector<TableRow> rows;
    const std::vector<std::string> plain_cols = {
        "theta_big_pct", "theta_pct",          "q_gain_pct", "phi_gain_pct",
        "mean_duration_days", "pgr_pct", "plr_pct",    "odean"};

    const auto fit_row = [&]() {
        const EpisodeStats s = threshold_stats(0.772, 1.277, asset);
        rows.push_back({"fit_odean", "", stats_columns(s, true, 0.772, 1.277, mix)});
    };

    if (table_id == "t1") {
        fit_row();
        for (double rho : {0.36, 0.80, 1.16, 1.94}) {
            const PoissonStats p = poisson_stats(rho, asset);
            json v;
            v["theta_big_pct"] = p.mean_gain_multiple
                                     ? json((*p.mean_gain_multiple - 1.0) * 100.0)
                                     : json("inf");
            v["theta_pct"] = (p.mean_loss_fraction - 1.0) * 100.0;
            v["q_gain_pct"] = p.q_gain * 100.0;
            v["phi_gain_pct"] = p.phi_gain * 100.0;
            v["mean_duration_days"] = p.mean_duration * kTradingDays;
            const OdeanStats o = representative_odean(p.q_gain, p.phi_gain, mix);
            v["pgr_pct"] = o.pgr * 100.0;
            v["plr_pct"] = o.plr * 100.0;
            v["odean"] = o.odean ? json(*o.odean) : json("inf");
            rows.push_back({"poisson_rho_" + fmt("%.2f", rho), "", v});
        }
        struct Block {
            double alpha_g, alpha_l, delta;
            std::vector<double> betas;
        };
        const std::vector<Block> blocks = {{1.0, 1.0, 0.10, {0.0, 0.53}},
                                           {0.88, 0.88, 0.08, {0.0, 0.88}},
                                           {0.5, 0.88, 0.05, {0.0, 0.3}},
                                           {0.5, 1.0, 0.05, {0.0, 0.3}},
                                           {0.5, 0.5, 0.05, {0.0, 0.3}}};
        for (const auto& b : blocks) {
            for (double beta : b.betas) {
                UtilitySpec u{UtilityFamily::scaled_tk, b.alpha_g, b.alpha_l, 2.0, beta,
                              b.delta};
                const std::string block = "scaled_aG" + fmt("%.2f", b.alpha_g) + "_aL" +
                                          fmt("%.2f", b.alpha_l);
                const TransversalityReport rep = check_transversality(u, asset, costs);
                if (!rep.ok) {
                    json v;
                    v["note"] = "transversality violation";
                    rows.push_back({block, fmt("%.2f", beta), v});
                    continue;
                }
                rows.push_back(
                    {block, fmt("%.2f", beta), optimized_columns(u, asset, costs, mix)});
            }
        }
        emit(opts, render_table(opts, table_id, rows, plain_cols));
        return 0;
    }

    if (table_id == "t2") {
        fit_row();
        for (double alpha_l : {2.0, 4.0, 8.0, 30.0}) {
            for (double beta : {0.0, 0.3}) {
                UtilitySpec u{UtilityFamily::modified_tk, 0.5, alpha_l, 2.0, beta, 0.05};
                rows.push_back({"modified_aG0.50_aL" + fmt("%.1f", alpha_l),
                                fmt("%.2f", beta), optimized_columns(u, asset, costs, mix)});
            }
        }
        emit(opts, render_table(opts, table_id, rows, plain_cols));
        return 0;
    }

    if (table_id == "t3") {
        const std::vector<std::string> cols = {
            "theta_big_pct",   "theta_pct",    "q_gain_pct",  "mean_duration_days",
            "inv_phi_pct",     "inv_pgr_pct",  "inv_plr_pct", "inv_odean",
            "hold_phi_pct",    "hold_pgr_pct", "hold_plr_pct", "hold_odean"};
        for (double alpha_l : {2.0, 4.0, 8.0}) {
            for (double beta : {0.0, 0.3}) {
                for (double rho : {1.5, 1.0}) {
                    UtilitySpec u{UtilityFamily::modified_tk, 0.5, alpha_l, 2.0, beta, 0.05};
                    const Policy p = optimize_policy(u, asset, costs);
                    TypeStats th;
                    if (p.regime == PolicyRegime::two_point) {
                        th = resolve_rule(ThresholdRule{p.theta, p.theta_big}, asset);
                    } else {
                        // Gains-only types enter the trade-weighted loss
                        // average at their literal theta of zero.
                        const EpisodeStats g = gains_only_stats(p.theta_big, asset);
                        th = TypeStats{p.theta_big, 0.0, g.q_gain, g.phi_gain,
                                       g.mean_duration};
                    }
                    const TypeStats po = resolve_rule(PoissonRule{rho}, asset);
                    const PopulationStats inv =
                        heterogeneous_investors({{0.5, 8, th}, {0.5, 8, po}});
                    const PopulationStats hold = heterogeneous_holdings({{4, th}, {4, po}});
                    json v;
                    v["theta_big_pct"] = inv.gain_multiple_bar
                                             ? json((*inv.gain_multiple_bar - 1.0) * 100.0)
                                             : json("inf");
                    v["theta_pct"] = (inv.loss_fraction_bar - 1.0) * 100.0;
                    v["q_gain_pct"] = inv.q_gain_bar * 100.0;
                    v["mean_duration_days"] = inv.mean_duration_bar * kTradingDays;
                    v["inv_phi_pct"] = *inv.phi_gain_bar * 100.0;
                    v["inv_pgr_pct"] = inv.odean.pgr * 100.0;
                    v["inv_plr_pct"] = inv.odean.plr * 100.0;
                    v["inv_odean"] = *inv.odean.odean;
                    v["hold_phi_pct"] = *hold.phi_gain_bar * 100.0;
                    v["hold_pgr_pct"] = hold.odean.pgr * 100.0;
                    v["hold_plr_pct"] = hold.odean.plr * 100.0;
                    v["hold_odean"] = *hold.odean.odean;
                    rows.push_back({"modified_aL" + fmt("%.1f", alpha_l) + "_rho" +
                                        fmt("%.1f", rho),
                                    fmt("%.2f", beta), v});
                }
            }
        }
        emit(opts, render_table(opts, table_id, rows, cols));
        return 0;
    }

    throw ModelError(Errc::config_parse, "unknown table id '" + table_id +
                                             "' (expected t1, t2, or t3)");
}

// ---------------------------------------------------------------------------
// simulate: Monte Carlo with closed-form side-by-side z-scores.

json z_row(const std::string& stat, double estimate, double se, double closed) {
    json j;
    j["statistic"] = stat;
    j["estimate"] = estimate;
    j["closed_form"] = closed;
    j["se"] = se;
    j["z"] = se > 0.0 ? (estimate - closed) / se : 0.0;
    return j;
}

void write_ledger(const std::string& path, const std::vector<EpisodeRecord>& records) {
    std::ofstream out(path);
    if (!out) throw ModelError(Errc::config_parse, path + ": cannot open for writing");
    out << "stream,t_start,t_end,x_exit,is_gain\n";
    for (const auto& r : records)
        out << r.stream << "," << r.t_start << "," << r.t_end << "," << r.x_exit << ","
            << (r.is_gain ? 1 : 0) << "\n";
}

int run_simulate(const CommonOpts& opts, const std::string& ledger_path) {
    const Config cfg = load(opts);
    const SimConfig sim = cfg.sim.sim_config();

    json report;
    report["command"] = "simulate";
    report["config"] = config_json(cfg);
    json table = json::array();

    if (cfg.population && (!cfg.population->types.empty() || !cfg.population->groups.empty())) {
        std::vector<AccountSpec> accounts;
        PopulationStats closed{};
        if (!cfg.population->types.empty()) {
            std::vector<InvestorType> types;
            for (const auto& t : cfg.population->types) {
                types.push_back({t.pi, t.n, resolve_rule(t.rule, cfg.asset)});
                accounts.push_back(
                    {t.pi, std::vector<TradingRule>(static_cast<std::size_t>(t.n), t.rule)});
            }
            closed = heterogeneous_investors(types);
        } else {
            std::vector<HoldingGroup> groups;
            AccountSpec spec{1.0, {}};
            for (const auto& g : cfg.population->groups) {
                groups.push_back({g.n, resolve_rule(g.rule, cfg.asset)});
                for (int k = 0; k < g.n; ++k) spec.stocks.push_back(g.rule);
            }
            accounts.push_back(spec);
            closed = heterogeneous_holdings(groups);
        }
        const AccountSimResult r =
            simulate_accounts(accounts, cfg.asset, cfg.sim.account_config(), sim);
        table.push_back(z_row("pgr", r.pgr.value, r.pgr.se, closed.odean.pgr));
        table.push_back(z_row("plr", r.plr.value, r.plr.se, closed.odean.plr));
        if (closed.odean.odean)
            table.push_back(z_row("odean", r.odean.value, r.odean.se, *closed.odean.odean));
        if (closed.phi_gain_bar)
            table.push_back(
                z_row("phi_gain", r.phi_gain.value, r.phi_gain.se, *closed.phi_gain_bar));
        report["n_sales"] = r.n_sales;
        report["burn_in_years"] = r.burn_in_years;
    } else if (cfg.policy) {
        std::vector<EpisodeRecord> records;
        const ThresholdSimResult r = simulate_threshold_episodes(
            cfg.policy->theta, cfg.policy->theta_big, cfg.asset, sim,
            ledger_path.empty() ? nullptr : &records);
        const EpisodeStats closed =
            threshold_stats(cfg.policy->theta, cfg.policy->theta_big, cfg.asset);
        table.push_back(z_row("q_gain", r.q_gain.value, r.q_gain.se, closed.q_gain));
        table.push_back(z_row("phi_gain", r.phi_gain.value, r.phi_gain.se, closed.phi_gain));
        table.push_back(z_row("mean_duration_years", r.mean_duration.value,
                              r.mean_duration.se, closed.mean_duration));
        report["n_episodes"] = r.n_episodes;
        if (!ledger_path.empty()) write_ledger(ledger_path, records);
    } else if (cfg.rho) {
        std::vector<EpisodeRecord> records;
        const PoissonSimResult r = simulate_poisson_episodes(
            *cfg.rho, cfg.asset, sim, ledger_path.empty() ? nullptr : &records);
        const PoissonStats closed = poisson_stats(*cfg.rho, cfg.asset);
        if (closed.mean_gain_multiple)
            table.push_back(z_row("mean_gain_multiple", r.gain_multiple.value,
                                  r.gain_multiple.se, *closed.mean_gain_multiple));
        table.push_back(z_row("mean_loss_fraction", r.loss_fraction.value,
                              r.loss_fraction.se, closed.mean_loss_fraction));
        table.push_back(z_row("q_gain", r.q_gain.value, r.q_gain.se, closed.q_gain));
        table.push_back(z_row("phi_gain", r.phi_gain.value, r.phi_gain.se, closed.phi_gain));
        table.push_back(z_row("mean_duration_years", r.mean_duration.value,
                              r.mean_duration.se, closed.mean_duration));
        report["n_episodes"] = r.n_episodes;
        if (!ledger_path.empty()) write_ledger(ledger_path, records);
    } else {
        throw ModelError(Errc::config_parse,
                         "simulate needs 'policy', 'poisson', or a population with "
                         "types/groups");
    }

    report["comparison"] = table;
    if (opts.format == "json") {
        emit(opts, report.dump(2));
    } else {
        std::ostringstream out;
        out << "statistic,estimate,closed_form,se,z\n";
        for (const auto& row : table)
            out << row.at("statistic").get<std::string>() << ","
                << fmt("%.10g", row.at("estimate").get<double>()) << ","
                << fmt("%.10g", row.at("closed_form").get<double>()) << ","
                << fmt("%.4g", row.at("se").get<double>()) << ","
                << fmt("%.3f", row.at("z").get<double>()) << "\n";
        emit(opts, out.str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Realization-utility trading policies and disposition statistics"};
    app.require_subcommand(1);

    CommonOpts policy_opts, stats_opts, poisson_opts, aggregate_opts, table_opts,
        simulate_opts, lambda_opts;
    std::string table_id, ledger_path;

    add_common(app.add_subcommand("policy", "optimal two-point or gains-only policy"),
               policy_opts);
    add_common(app.add_subcommand("stats", "closed-form statistics of a threshold rule"),
               stats_opts);
    add_common(app.add_subcommand("poisson", "closed-form statistics of Poisson trading"),
               poisson_opts);
    add_common(app.add_subcommand("aggregate", "Odean statistics for a population"),
               aggregate_opts);
    auto* table_cmd = app.add_subcommand("table", "reproduce a calibration table");
    table_cmd->add_option("id", table_id, "table id: t1, t2, or t3")->required();
    table_opts.format = "csv";  // tables are row data first
    add_common(table_cmd, table_opts, false);
    auto* sim_cmd =
        app.add_subcommand("simulate", "Monte Carlo check against the closed forms");
    add_common(sim_cmd, simulate_opts);
    sim_cmd->add_option("--ledger", ledger_path, "write a per-episode CSV ledger here");
    add_common(app.add_subcommand("lambda-star", "critical loss aversion"), lambda_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (app.got_subcommand("policy")) return run_policy(policy_opts);
        if (app.got_subcommand("stats")) return run_stats(stats_opts);
        if (app.got_subcommand("poisson")) return run_poisson(poisson_opts);
        if (app.got_subcommand("aggregate")) return run_aggregate(aggregate_opts);
        if (app.got_subcommand("table")) return run_table(table_opts, table_id);
        if (app.got_subcommand("simulate")) return run_simulate(simulate_opts, ledger_path);
        if (app.got_subcommand("lambda-star")) return run_lambda_star(lambda_opts);
    } catch (const ModelError& e) {
        std::cerr << e.what() << "\n";
        if (e.code() == Errc::transversality) return 2;
        if (e.code() == Errc::no_participation) return 3;
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
