#include "reutil/mc.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <thread>

namespace reutil {

namespace {

constexpr int kBatches = 100;

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Per-episode/per-stock generator. Normals come from the polar method on raw
// engine words so results do not depend on the standard library's
// distribution implementations.
class StreamRng {
public:
    StreamRng(std::uint64_t master, std::uint64_t stream) {
        std::uint64_t s = master ^ (0xA0761D6478BD642Full * (stream + 1));
        const std::uint32_t w[8] = {
            static_cast<std::uint32_t>(splitmix64(s)), static_cast<std::uint32_t>(splitmix64(s) >> 32),
            static_cast<std::uint32_t>(splitmix64(s)), static_cast<std::uint32_t>(splitmix64(s) >> 32),
            static_cast<std::uint32_t>(splitmix64(s)), static_cast<std::uint32_t>(splitmix64(s) >> 32),
            static_cast<std::uint32_t>(splitmix64(s)), static_cast<std::uint32_t>(splitmix64(s) >> 32)};
        std::seed_seq seq(std::begin(w), std::end(w));
        engine_.seed(seq);
    }

    double uniform() {  // strictly inside (0, 1)
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        have_spare_ = true;
        return u * m;
    }

    double exponential(double rate) { return -std::log(uniform()) / rate; }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

int resolve_threads(const SimConfig& cfg) {
    if (cfg.threads > 0) return cfg.threads;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

// Runs fn(i) for i in [0, n) across threads; fn writes only to slot i of
// preallocated buffers, so scheduling cannot change the results.
void parallel_for(std::int64_t n, int threads, const std::function<void(std::int64_t)>& fn) {
    if (threads <= 1 || n < 2) {
        for (std::int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    const std::int64_t chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const std::int64_t lo = t * chunk;
        const std::int64_t hi = std::min<std::int64_t>(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::int64_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

double batch_se(const std::vector<double>& num, const std::vector<double>& den) {
    // Scatter of per-batch ratios around their mean, over nonempty batches.
    std::vector<double> vals;
    vals.reserve(num.size());
    for (std::size_t b = 0; b < num.size(); ++b)
        if (den[b] > 0.0) vals.push_back(num[b] / den[b]);
    if (vals.size() < 2) return 0.0;
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= vals.size();
    double ss = 0.0;
    for (double v : vals) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / (vals.size() - 1.0) / vals.size());
}

struct EpisodeOut {
    double duration = 0.0;
    double time_above = 0.0;
    double x_exit = 1.0;
    bool is_gain = false;
};

// One threshold episode in log space. Within-step barrier crossings are
// resolved by the exact Brownian-bridge crossing probability, which removes
// the O(sqrt(dt)) first-passage bias of bare grid monitoring.
EpisodeOut run_threshold_episode(StreamRng& rng, double log_lo, double log_hi, double drift_dt,
                                 double vol_dt, double sig2_dt, double dt, bool negate) {
    const double reach = 6.0 * vol_dt;  // beyond this the bridge probability is ~0
    EpisodeOut out;
    double level = 0.0;
    for (;;) {
        double z = rng.normal();
        if (negate) z = -z;
        const double next = level + drift_dt + vol_dt * z;
        out.duration += dt;
        if (level > 0.0) out.time_above += dt;
        if (next >= log_hi) {
            out.is_gain = true;
            out.x_exit = std::exp(log_hi);
            return out;
        }
        if (next <= log_lo) {
            out.is_gain = false;
            out.x_exit = std::exp(log_lo);
            return out;
        }
        double p_hi = 0.0, p_lo = 0.0;
        if (log_hi - std::max(level, next) < reach)
            p_hi = std::exp(-2.0 * (log_hi - level) * (log_hi - next) / sig2_dt);
        if (std::min(level, next) - log_lo < reach)
            p_lo = std::exp(-2.0 * (level - log_lo) * (next - log_lo) / sig2_dt);
        if (p_hi > 0.0 || p_lo > 0.0) {
            const double u = rng.uniform();
            if (u < p_hi) {
                out.is_gain = true;
                out.x_exit = std::exp(log_hi);
                return out;
            }
            if (u < p_hi + p_lo) {
                out.is_gain = false;
                out.x_exit = std::exp(log_lo);
                return out;
            }
        }
        level = next;
    }
}

}  // namespace

ThresholdSimResult simulate_threshold_episodes(double theta, double theta_big,
                                               const AssetParams& asset, const SimConfig& cfg,
                                               std::vector<EpisodeRecord>* ledger) {
    validate(asset);
    if (!(theta > 0.0) || !(theta < 1.0) || !(theta_big > 1.0))
        throw ModelError(Errc::degenerate,
                         "two-point rule requires 0 < theta < 1 < theta_big");
    if (!(cfg.dt > 0.0)) throw ModelError(Errc::degenerate, "dt must be positive");
    if (cfg.n_episodes < 2) throw ModelError(Errc::degenerate, "need at least 2 episodes");

    const std::int64_t n = cfg.n_episodes;
    const double log_lo = std::log(theta), log_hi = std::log(theta_big);
    const double drift_dt = (asset.mu - 0.5 * asset.sigma * asset.sigma) * cfg.dt;
    const double vol_dt = asset.sigma * std::sqrt(cfg.dt);
    const double sig2_dt = asset.sigma * asset.sigma * cfg.dt;

    std::vector<EpisodeOut> outs(n);
    parallel_for(n, resolve_threads(cfg), [&](std::int64_t i) {
        const std::uint64_t stream = cfg.antithetic ? i / 2 : i;
        const bool negate = cfg.antithetic && (i % 2 == 1);
        StreamRng rng(cfg.seed, stream);
        outs[i] = run_threshold_episode(rng, log_lo, log_hi, drift_dt, vol_dt, sig2_dt, cfg.dt,
                                        negate);
    });

    std::int64_t gains = 0;
    double sum_tau = 0.0, sum_tau2 = 0.0;
    std::vector<double> above_b(kBatches, 0.0), dur_b(kBatches, 0.0);
    for (std::int64_t i = 0; i < n; ++i) {
        const auto& e = outs[i];
        gains += e.is_gain ? 1 : 0;
        sum_tau += e.duration;
        sum_tau2 += e.duration * e.duration;
        const int b = static_cast<int>(i * kBatches / n);
        above_b[b] += e.time_above;
        dur_b[b] += e.duration;
    }
    if (ledger) {
        ledger->clear();
        ledger->reserve(n);
        for (std::int64_t i = 0; i < n; ++i)
            ledger->push_back({i, 0.0, outs[i].duration, outs[i].x_exit, outs[i].is_gain});
    }

    ThresholdSimResult r{};
    r.n_episodes = n;
    const double p = static_cast<double>(gains) / n;
    r.q_gain = {p, std::sqrt(std::max(p * (1.0 - p), 0.0) / n)};
    const double mean_tau = sum_tau / n;
    const double var_tau = std::max(sum_tau2 / n - mean_tau * mean_tau, 0.0);
    r.mean_duration = {mean_tau, std::sqrt(var_tau / n)};
    double above = 0.0, dur = 0.0;
    for (int b = 0; b < kBatches; ++b) {
        above += above_b[b];
        dur += dur_b[b];
    }
    r.phi_gain = {above / dur, batch_se(above_b, dur_b)};
    return r;
}

PoissonSimResult simulate_poisson_episodes(double rho, const AssetParams& asset,
                                           const SimConfig& cfg,
                                           std::vector<EpisodeRecord>* ledger) {
    validate(asset);
    if (!(rho > 0.0)) throw ModelError(Errc::degenerate, "rho must be positive");
    if (!(cfg.dt > 0.0)) throw ModelError(Errc::degenerate, "dt must be positive");
    if (cfg.n_episodes < 2) throw ModelError(Errc::degenerate, "need at least 2 episodes");

    const std::int64_t n = cfg.n_episodes;
    const double drift = asset.mu - 0.5 * asset.sigma * asset.sigma;

    std::vector<EpisodeOut> outs(n);
    parallel_for(n, resolve_threads(cfg), [&](std::int64_t i) {
        const std::uint64_t stream = cfg.antithetic ? i / 2 : i;
        const bool negate = cfg.antithetic && (i % 2 == 1);
        StreamRng rng(cfg.seed, stream);
        const double tau = rng.exponential(rho);
        // Walk the grid for the occupation time; the final partial step makes
        // the terminal value exactly lognormal given tau.
        double level = 0.0, t = 0.0, above = 0.0;
        while (t + cfg.dt < tau) {
            if (level > 0.0) above += cfg.dt;
            double z = rng.normal();
            if (negate) z = -z;
            level += drift * cfg.dt + asset.sigma * std::sqrt(cfg.dt) * z;
            t += cfg.dt;
        }
        const double rem = tau - t;
        if (rem > 0.0) {
            if (level > 0.0) above += rem;
            double z = rng.normal();
            if (negate) z = -z;
            level += drift * rem + asset.sigma * std::sqrt(rem) * z;
        }
        outs[i] = {tau, above, std::exp(level), level > 0.0};
    });

    std::int64_t gains = 0;
    double sum_tau = 0.0, sum_tau2 = 0.0;
    double sum_hi = 0.0, sum_hi2 = 0.0, sum_lo = 0.0, sum_lo2 = 0.0;
    std::vector<double> above_b(kBatches, 0.0), dur_b(kBatches, 0.0);
    for (std::int64_t i = 0; i < n; ++i) {
        const auto& e = outs[i];
        sum_tau += e.duration;
        sum_tau2 += e.duration * e.duration;
        if (e.is_gain) {
            ++gains;
            sum_hi += e.x_exit;
            sum_hi2 += e.x_exit * e.x_exit;
        } else {
            sum_lo += e.x_exit;
            sum_lo2 += e.x_exit * e.x_exit;
        }
        const int b = static_cast<int>(i * kBatches / n);
        above_b[b] += e.time_above;
        dur_b[b] += e.duration;
    }
    if (ledger) {
        ledger->clear();
        ledger->reserve(n);
        for (std::int64_t i = 0; i < n; ++i)
            ledger->push_back({i, 0.0, outs[i].duration, outs[i].x_exit, outs[i].is_gain});
    }

    PoissonSimResult r{};
    r.n_episodes = n;
    const std::int64_t losses = n - gains;
    const double p = static_cast<double>(gains) / n;
    r.q_gain = {p, std::sqrt(std::max(p * (1.0 - p), 0.0) / n)};
    const double mean_tau = sum_tau / n;
    r.mean_duration = {mean_tau, std::sqrt(std::max(sum_tau2 / n - mean_tau * mean_tau, 0.0) / n)};
    if (gains > 1) {
        const double m = sum_hi / gains;
        r.gain_multiple = {m, std::sqrt(std::max(sum_hi2 / gains - m * m, 0.0) / gains)};
    }
    if (losses > 1) {
        const double m = sum_lo / losses;
        r.loss_fraction = {m, std::sqrt(std::max(sum_lo2 / losses - m * m, 0.0) / losses)};
    }
    double above = 0.0, dur = 0.0;
    for (int b = 0; b < kBatches; ++b) {
        above += above_b[b];
        dur += dur_b[b];
    }
    r.phi_gain = {above / dur, batch_se(above_b, dur_b)};
    return r;
}

namespace {

struct StockState {
    bool is_poisson = false;
    double log_lo = 0.0, log_hi = 0.0;  // thresholds in log space
    double rho = 0.0;
    double level = 0.0;
    double next_sale = 0.0;
};

struct AccountCounts {
    std::vector<double> rg, rl, pg, pl;  // per-batch realized/paper counts
    AccountCounts()
        : rg(kBatches, 0.0), rl(kBatches, 0.0), pg(kBatches, 0.0), pl(kBatches, 0.0) {}
};

}  // namespace

AccountSimResult simulate_accounts(const std::vector<AccountSpec>& accounts,
                                   const AssetParams& asset, const AccountSimConfig& acct_cfg,
                                   const SimConfig& cfg) {
    validate(asset);
    if (accounts.empty())
        throw ModelError(Errc::degenerate, "account population is empty");
    if (acct_cfg.n_accounts < 1)
        throw ModelError(Errc::degenerate, "need at least one account");
    if (!(acct_cfg.horizon_years > 0.0) || !(cfg.dt > 0.0))
        throw ModelError(Errc::degenerate, "horizon and dt must be positive");

    double weight_total = 0.0;
    double longest_mean = 0.0;
    for (const auto& a : accounts) {
        if (!(a.weight >= 0.0)) throw ModelError(Errc::degenerate, "weights must be >= 0");
        if (a.stocks.empty())
            throw ModelError(Errc::degenerate, "every account must hold at least one stock");
        if (a.stocks.size() > 4096)
            throw ModelError(Errc::degenerate, "accounts are limited to 4096 stocks");
        weight_total += a.weight;
        for (const auto& rule : a.stocks)
            longest_mean = std::max(longest_mean, resolve_rule(rule, asset).mean_duration);
    }
    if (!(weight_total > 0.0))
        throw ModelError(Errc::degenerate, "population weights sum to zero");

    const double burn_in = acct_cfg.burn_in_years >= 0.0 ? acct_cfg.burn_in_years
                                                         : 5.0 * longest_mean;
    if (!(burn_in < acct_cfg.horizon_years))
        throw ModelError(Errc::horizon_too_short,
                         "horizon does not extend past the burn-in window");

    // Deterministic largest-remainder allocation of accounts to archetypes.
    std::vector<int> alloc(accounts.size(), 0);
    {
        std::vector<std::pair<double, std::size_t>> rema;
        int assigned = 0;
        for (std::size_t i = 0; i < accounts.size(); ++i) {
            const double exact = accounts[i].weight / weight_total * acct_cfg.n_accounts;
            alloc[i] = static_cast<int>(std::floor(exact));
            assigned += alloc[i];
            rema.push_back({exact - alloc[i], i});
        }
        std::stable_sort(rema.begin(), rema.end(),
                         [](const auto& a, const auto& b) { return a.first > b.first; });
        for (int k = 0; assigned < acct_cfg.n_accounts; ++k, ++assigned)
            alloc[rema[k % rema.size()].second] += 1;
    }

    std::vector<const AccountSpec*> instances;
    for (std::size_t i = 0; i < accounts.size(); ++i)
        for (int k = 0; k < alloc[i]; ++k) instances.push_back(&accounts[i]);

    const std::int64_t n_steps =
        static_cast<std::int64_t>(std::llround(acct_cfg.horizon_years / cfg.dt));
    const double drift_dt = (asset.mu - 0.5 * asset.sigma * asset.sigma) * cfg.dt;
    const double vol_dt = asset.sigma * std::sqrt(cfg.dt);
    const double sig2_dt = asset.sigma * asset.sigma * cfg.dt;
    const double reach = 6.0 * vol_dt;
    const double span = acct_cfg.horizon_years - burn_in;

    std::vector<AccountCounts> counts(instances.size());
    parallel_for(static_cast<std::int64_t>(instances.size()), resolve_threads(cfg),
                 [&](std::int64_t ai) {
        const AccountSpec& spec = *instances[ai];
        const std::size_t n_stocks = spec.stocks.size();
        std::vector<StockState> stocks(n_stocks);
        std::vector<char> selling(n_stocks, 0);
        std::vector<StreamRng> rngs;
        rngs.reserve(n_stocks);
        for (std::size_t j = 0; j < n_stocks; ++j) {
            rngs.emplace_back(cfg.seed, static_cast<std::uint64_t>(ai) * 4096ull + j);
            StockState& s = stocks[j];
            if (const auto* th = std::get_if<ThresholdRule>(&spec.stocks[j])) {
                s.log_lo = std::log(th->theta);
                s.log_hi = std::log(th->theta_big);
            } else {
                s.is_poisson = true;
                s.rho = std::get<PoissonRule>(spec.stocks[j]).rho;
                s.next_sale = rngs[j].exponential(s.rho);
            }
        }

        AccountCounts& acc = counts[ai];
        std::vector<int> sold;
        sold.reserve(n_stocks);
        for (std::int64_t step = 0; step < n_steps; ++step) {
            const double t_next = (step + 1) * cfg.dt;
            sold.clear();
            for (std::size_t j = 0; j < n_stocks; ++j) {
                StockState& s = stocks[j];
                const double next = s.level + drift_dt + vol_dt * rngs[j].normal();
                if (s.is_poisson) {
                    s.level = next;
                    if (s.next_sale <= t_next) sold.push_back(static_cast<int>(j));
                    continue;
                }
                bool crossed_hi = next >= s.log_hi;
                bool crossed_lo = next <= s.log_lo;
                if (!crossed_hi && !crossed_lo) {
                    double p_hi = 0.0, p_lo = 0.0;
                    if (s.log_hi - std::max(s.level, next) < reach)
                        p_hi = std::exp(-2.0 * (s.log_hi - s.level) * (s.log_hi - next) /
                                        sig2_dt);
                    if (std::min(s.level, next) - s.log_lo < reach)
                        p_lo = std::exp(-2.0 * (s.level - s.log_lo) * (next - s.log_lo) /
                                        sig2_dt);
                    if (p_hi > 0.0 || p_lo > 0.0) {
                        const double u = rngs[j].uniform();
                        crossed_hi = u < p_hi;
                        crossed_lo = !crossed_hi && u < p_hi + p_lo;
                    }
                }
                if (crossed_hi || crossed_lo) {
                    s.level = crossed_hi ? s.log_hi : s.log_lo;  // sale executes at the barrier
                    sold.push_back(static_cast<int>(j));
                } else {
                    s.level = next;
                }
            }

            const bool counted = t_next > burn_in;
            int batch = 0;
            if (counted) {
                batch = static_cast<int>((t_next - burn_in) / span * kBatches);
                batch = std::clamp(batch, 0, kBatches - 1);
            }
            for (int j : sold) selling[j] = 1;
            for (int j : sold) {
                StockState& s = stocks[j];
                if (counted) {
                    const bool gain = s.level > 0.0;
                    (gain ? acc.rg[batch] : acc.rl[batch]) += 1.0;
                    // Positions sold in the same step count as realized, not
                    // paper (simultaneous sales have probability ~0 anyway).
                    for (std::size_t i = 0; i < n_stocks; ++i) {
                        if (selling[i]) continue;
                        (stocks[i].level > 0.0 ? acc.pg[batch] : acc.pl[batch]) += 1.0;
                    }
                }
                s.level = 0.0;
                if (s.is_poisson) s.next_sale = t_next + rngs[j].exponential(s.rho);
            }
            for (int j : sold) selling[j] = 0;
        }
    });

    std::vector<double> rg(kBatches, 0.0), rl(kBatches, 0.0), pg(kBatches, 0.0),
        pl(kBatches, 0.0);
    for (const auto& acc : counts)
        for (int b = 0; b < kBatches; ++b) {
            rg[b] += acc.rg[b];
            rl[b] += acc.rl[b];
            pg[b] += acc.pg[b];
            pl[b] += acc.pl[b];
        }

    double rg_t = 0.0, rl_t = 0.0, pg_t = 0.0, pl_t = 0.0;
    for (int b = 0; b < kBatches; ++b) {
        rg_t += rg[b];
        rl_t += rl[b];
        pg_t += pg[b];
        pl_t += pl[b];
    }
    const std::int64_t n_sales = static_cast<std::int64_t>(rg_t + rl_t);
    if (n_sales < 100)
        throw ModelError(Errc::horizon_too_short,
                         "fewer than 100 sales were observed after burn-in");

    AccountSimResult out{};
    out.n_sales = n_sales;
    out.burn_in_years = burn_in;

    std::vector<double> pgr_num(kBatches), pgr_den(kBatches), plr_num(kBatches),
        plr_den(kBatches), phi_num(kBatches), phi_den(kBatches), o_num(kBatches),
        o_den(kBatches);
    for (int b = 0; b < kBatches; ++b) {
        pgr_num[b] = rg[b];
        pgr_den[b] = rg[b] + pg[b];
        plr_num[b] = rl[b];
        plr_den[b] = rl[b] + pl[b];
        phi_num[b] = pg[b];
        phi_den[b] = pg[b] + pl[b];
        const double pgr_b = pgr_den[b] > 0.0 ? rg[b] / pgr_den[b] : 0.0;
        const double plr_b = plr_den[b] > 0.0 ? rl[b] / plr_den[b] : 0.0;
        o_num[b] = plr_b > 0.0 ? pgr_b / plr_b : 0.0;
        o_den[b] = plr_b > 0.0 ? 1.0 : 0.0;
    }
    out.pgr = {rg_t / (rg_t + pg_t), batch_se(pgr_num, pgr_den)};
    out.plr = {rl_t / (rl_t + pl_t), batch_se(plr_num, plr_den)};
    out.phi_gain = {pg_t / (pg_t + pl_t), batch_se(phi_num, phi_den)};
    const double odean = out.plr.value > 0.0 ? out.pgr.value / out.plr.value
                                             : std::numeric_limits<double>::infinity();
    out.odean = {odean, batch_se(o_num, o_den)};
    return out;
}

}  // namespace reutil
