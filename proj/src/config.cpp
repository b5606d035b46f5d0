#include "reutil/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace reutil {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ModelError(Errc::config_parse, where + ": " + what);
}

void reject_unknown(const json& obj, const std::string& where,
                    const std::set<std::string>& allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key())) fail(where + "." + it.key(), "unknown key");
}

double need_number(const json& obj, const std::string& where, const std::string& key) {
    if (!obj.contains(key)) fail(where, "missing required key '" + key + "'");
    const json& v = obj.at(key);
    if (!v.is_number()) fail(where + "." + key, "expected a number");
    return v.get<double>();
}

double opt_number(const json& obj, const std::string& where, const std::string& key,
                  double fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) fail(where + "." + key, "expected a number");
    return v.get<double>();
}

TradingRule parse_rule(const json& obj, const std::string& where) {
    if (!obj.is_object()) fail(where, "expected an object");
    reject_unknown(obj, where, {"theta", "theta_big", "rho"});
    if (obj.contains("rho")) {
        if (obj.contains("theta") || obj.contains("theta_big"))
            fail(where, "a rule is either {theta, theta_big} or {rho}, not both");
        return PoissonRule{need_number(obj, where, "rho")};
    }
    return ThresholdRule{need_number(obj, where, "theta"),
                         need_number(obj, where, "theta_big")};
}

AssetParams parse_asset(const json& obj, const std::string& where) {
    reject_unknown(obj, where, {"mu", "sigma"});
    AssetParams asset{need_number(obj, where, "mu"), need_number(obj, where, "sigma")};
    return asset;
}

CostSpec parse_costs(const json& obj, const std::string& where) {
    reject_unknown(obj, where, {"k_s", "k_p", "kappa"});
    CostSpec costs;
    costs.k_s = opt_number(obj, where, "k_s", 0.0);
    costs.k_p = opt_number(obj, where, "k_p", 0.0);
    if (obj.contains("kappa")) {
        const json& v = obj.at("kappa");
        if (v.is_number()) {
            costs.kappa_override = v.get<double>();
        } else if (v.is_string()) {
            const std::string name = v.get<std::string>();
            if (name == "K")
                costs.kappa_override = std::nullopt;
            else if (name == "one")
                costs.kappa_override = 1.0;
            else if (name == "one_minus_ks")
                costs.kappa_override = 1.0 - costs.k_s;
            else
                fail(where + ".kappa", "expected a number or one of K|one|one_minus_ks");
        } else {
            fail(where + ".kappa", "expected a number or one of K|one|one_minus_ks");
        }
    }
    return costs;
}

UtilitySpec parse_utility(const json& obj, const std::string& where) {
    reject_unknown(obj, where, {"family", "alpha_g", "alpha_l", "lambda", "beta", "delta"});
    UtilitySpec u;
    if (!obj.contains("family")) fail(where, "missing required key 'family'");
    const std::string family = obj.at("family").is_string()
                                   ? obj.at("family").get<std::string>()
                                   : std::string();
    if (family == "scaled_tk")
        u.family = UtilityFamily::scaled_tk;
    else if (family == "modified_tk")
        u.family = UtilityFamily::modified_tk;
    else
        fail(where + ".family", "expected scaled_tk or modified_tk");
    u.alpha_g = need_number(obj, where, "alpha_g");
    u.alpha_l = need_number(obj, where, "alpha_l");
    u.lambda = opt_number(obj, where, "lambda", 1.0);
    u.beta = opt_number(obj, where, "beta", 0.0);
    u.delta = need_number(obj, where, "delta");
    return u;
}

PopulationConfig parse_population(const json& obj, const std::string& where) {
    reject_unknown(obj, where, {"m", "n_bar", "sigma_n", "counts", "types", "groups"});
    PopulationConfig pop;
    if (obj.contains("m")) pop.m = need_number(obj, where, "m");
    if (obj.contains("n_bar")) pop.n_bar = need_number(obj, where, "n_bar");
    if (obj.contains("sigma_n")) pop.sigma_n = need_number(obj, where, "sigma_n");
    if (obj.contains("counts")) {
        const json& arr = obj.at("counts");
        if (!arr.is_array()) fail(where + ".counts", "expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string at = where + ".counts[" + std::to_string(i) + "]";
            const json& e = arr[i];
            if (!e.is_object()) fail(at, "expected an object");
            reject_unknown(e, at, {"n", "pi"});
            pop.counts.emplace_back(static_cast<int>(need_number(e, at, "n")),
                                    need_number(e, at, "pi"));
        }
    }
    if (obj.contains("types")) {
        const json& arr = obj.at("types");
        if (!arr.is_array()) fail(where + ".types", "expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string at = where + ".types[" + std::to_string(i) + "]";
            const json& e = arr[i];
            if (!e.is_object()) fail(at, "expected an object");
            reject_unknown(e, at, {"pi", "n", "rule"});
            PopulationTypeConfig t{need_number(e, at, "pi"),
                                   static_cast<int>(need_number(e, at, "n")),
                                   ThresholdRule{}};
            if (!e.contains("rule")) fail(at, "missing required key 'rule'");
            t.rule = parse_rule(e.at("rule"), at + ".rule");
            pop.types.push_back(t);
        }
    }
    if (obj.contains("groups")) {
        const json& arr = obj.at("groups");
        if (!arr.is_array()) fail(where + ".groups", "expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string at = where + ".groups[" + std::to_string(i) + "]";
            const json& e = arr[i];
            if (!e.is_object()) fail(at, "expected an object");
            reject_unknown(e, at, {"n", "rule"});
            PopulationGroupConfig g{static_cast<int>(need_number(e, at, "n")),
                                    ThresholdRule{}};
            if (!e.contains("rule")) fail(at, "missing required key 'rule'");
            g.rule = parse_rule(e.at("rule"), at + ".rule");
            pop.groups.push_back(g);
        }
    }
    return pop;
}

SimSettings parse_sim(const json& obj, const std::string& where) {
    reject_unknown(obj, where,
                   {"seed", "dt", "n_episodes", "antithetic", "threads", "horizon_years",
                    "n_accounts", "burn_in_years"});
    SimSettings s;
    if (obj.contains("seed")) {
        const json& v = obj.at("seed");
        if (!v.is_number_integer() && !v.is_number_unsigned())
            fail(where + ".seed", "expected an integer");
        s.seed = v.get<std::uint64_t>();
    }
    s.dt = opt_number(obj, where, "dt", s.dt);
    s.n_episodes = static_cast<std::int64_t>(
        opt_number(obj, where, "n_episodes", static_cast<double>(s.n_episodes)));
    if (obj.contains("antithetic")) {
        const json& v = obj.at("antithetic");
        if (!v.is_boolean()) fail(where + ".antithetic", "expected a boolean");
        s.antithetic = v.get<bool>();
    }
    s.threads = static_cast<int>(opt_number(obj, where, "threads", s.threads));
    s.horizon_years = opt_number(obj, where, "horizon_years", s.horizon_years);
    s.n_accounts = static_cast<int>(opt_number(obj, where, "n_accounts", s.n_accounts));
    s.burn_in_years = opt_number(obj, where, "burn_in_years", s.burn_in_years);
    return s;
}

json parse_override_value(const std::string& text) {
    const json v = json::parse(text, nullptr, false);
    if (!v.is_discarded()) return v;
    return json(text);
}

void apply_override(json& root, const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos)
        fail("--set " + spec, "expected dotted.path=value");
    const std::string path = spec.substr(0, eq);
    const std::string value = spec.substr(eq + 1);
    json* node = &root;
    std::size_t pos = 0;
    while (true) {
        const auto dot = path.find('.', pos);
        const std::string key = path.substr(pos, dot - pos);
        if (key.empty()) fail("--set " + spec, "empty path segment");
        if (dot == std::string::npos) {
            (*node)[key] = parse_override_value(value);
            break;
        }
        if (!node->contains(key) || !(*node)[key].is_object()) (*node)[key] = json::object();
        node = &(*node)[key];
        pos = dot + 1;
    }
}

Config interpret(json root, const std::string& origin) {
    if (!root.is_object()) fail(origin, "top-level config must be an object");
    reject_unknown(root, origin,
                   {"asset", "costs", "utility", "policy", "poisson", "population", "sim"});

    Config cfg;
    if (!root.contains("asset")) fail(origin, "missing required section 'asset'");
    cfg.asset = parse_asset(root.at("asset"), origin + ".asset");
    if (root.contains("costs")) cfg.costs = parse_costs(root.at("costs"), origin + ".costs");
    if (root.contains("utility"))
        cfg.utility = parse_utility(root.at("utility"), origin + ".utility");
    if (root.contains("policy")) {
        const json& p = root.at("policy");
        const std::string at = origin + ".policy";
        if (!p.is_object()) fail(at, "expected an object");
        reject_unknown(p, at, {"theta", "theta_big"});
        cfg.policy = ThresholdRule{need_number(p, at, "theta"),
                                   need_number(p, at, "theta_big")};
    }
    if (root.contains("poisson")) {
        const json& p = root.at("poisson");
        const std::string at = origin + ".poisson";
        if (!p.is_object()) fail(at, "expected an object");
        reject_unknown(p, at, {"rho"});
        cfg.rho = need_number(p, at, "rho");
    }
    if (root.contains("population"))
        cfg.population = parse_population(root.at("population"), origin + ".population");
    if (root.contains("sim")) cfg.sim = parse_sim(root.at("sim"), origin + ".sim");
    return cfg;
}

json rule_to_json(const TradingRule& rule) {
    json j;
    if (const auto* t = std::get_if<ThresholdRule>(&rule)) {
        j["theta"] = t->theta;
        j["theta_big"] = t->theta_big;
    } else {
        j["rho"] = std::get<PoissonRule>(rule).rho;
    }
    return j;
}

}  // namespace

AccountSizeMix PopulationConfig::mix() const {
    if (m) return AccountSizeMix::from_multiplier(*m);
    if (n_bar) return AccountSizeMix{*n_bar, sigma_n.value_or(0.0)};
    if (!counts.empty()) return AccountSizeMix::from_counts(counts);
    throw ModelError(Errc::config_parse,
                     "population: provide m, n_bar/sigma_n, or counts for account sizes");
}

Config load_config_file(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ModelError(Errc::config_parse, path + ": cannot open file");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str(), overrides, path);
}

Config parse_config_text(const std::string& text, const std::vector<std::string>& overrides,
                         const std::string& origin) {
    json root;
    try {
        root = json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        // Translate the byte offset into a line/column diagnostic.
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::ostringstream msg;
        msg << origin << ":" << line << ":" << col << ": " << e.what();
        throw ModelError(Errc::config_parse, msg.str());
    }
    for (const auto& o : overrides) apply_override(root, o);
    return interpret(std::move(root), origin);
}

std::string config_to_json_text(const Config& config) {
    json j;
    j["asset"] = {{"mu", config.asset.mu}, {"sigma", config.asset.sigma}};
    j["costs"] = {{"k_s", config.costs.k_s}, {"k_p", config.costs.k_p}};
    if (config.costs.kappa_override) j["costs"]["kappa"] = *config.costs.kappa_override;
    if (config.utility) {
        const UtilitySpec& u = *config.utility;
        j["utility"] = {
            {"family", u.family == UtilityFamily::scaled_tk ? "scaled_tk" : "modified_tk"},
            {"alpha_g", u.alpha_g}, {"alpha_l", u.alpha_l}, {"lambda", u.lambda},
            {"beta", u.beta},       {"delta", u.delta}};
    }
    if (config.policy)
        j["policy"] = {{"theta", config.policy->theta},
                       {"theta_big", config.policy->theta_big}};
    if (config.rho) j["poisson"] = {{"rho", *config.rho}};
    if (config.population) {
        json p = json::object();
        const PopulationConfig& pop = *config.population;
        if (pop.m) p["m"] = *pop.m;
        if (pop.n_bar) p["n_bar"] = *pop.n_bar;
        if (pop.sigma_n) p["sigma_n"] = *pop.sigma_n;
        if (!pop.counts.empty()) {
            p["counts"] = json::array();
            for (const auto& [n, pi] : pop.counts)
                p["counts"].push_back({{"n", n}, {"pi", pi}});
        }
        if (!pop.types.empty()) {
            p["types"] = json::array();
            for (const auto& t : pop.types)
                p["types"].push_back(
                    {{"pi", t.pi}, {"n", t.n}, {"rule", rule_to_json(t.rule)}});
        }
        if (!pop.groups.empty()) {
            p["groups"] = json::array();
            for (const auto& g : pop.groups)
                p["groups"].push_back({{"n", g.n}, {"rule", rule_to_json(g.rule)}});
        }
        j["population"] = p;
    }
    j["sim"] = {{"seed", config.sim.seed},
                {"dt", config.sim.dt},
                {"n_episodes", config.sim.n_episodes},
                {"antithetic", config.sim.antithetic},
                {"threads", config.sim.threads},
                {"horizon_years", config.sim.horizon_years},
                {"n_accounts", config.sim.n_accounts},
                {"burn_in_years", config.sim.burn_in_years}};
    return j.dump(2);
}

}  // namespace reutil
