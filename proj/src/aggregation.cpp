#include "reutil/aggregation.hpp"

#include <cmath>

namespace reutil {

namespace {

OdeanStats odean_from(double pgr, double plr) {
    OdeanStats o{pgr, plr, std::nullopt};
    if (plr > 0.0) o.odean = pgr / plr;
    return o;
}

void check_type_stats(const TypeStats& s) {
    if (!(s.mean_duration > 0.0))
        throw ModelError(Errc::degenerate, "mean_duration must be positive");
    if (!(s.q_gain >= 0.0 && s.q_gain <= 1.0) || !(s.phi_gain >= 0.0 && s.phi_gain <= 1.0))
        throw ModelError(Errc::degenerate, "q_gain and phi_gain must lie in [0, 1]");
}

}  // namespace

TypeStats resolve_rule(const TradingRule& rule, const AssetParams& asset) {
    if (const auto* t = std::get_if<ThresholdRule>(&rule)) {
        const EpisodeStats s = threshold_stats(t->theta, t->theta_big, asset);
        return TypeStats{t->theta_big, t->theta, s.q_gain, s.phi_gain, s.mean_duration};
    }
    const auto& p = std::get<PoissonRule>(rule);
    const PoissonStats s = poisson_stats(p.rho, asset);
    return TypeStats{s.mean_gain_multiple, s.mean_loss_fraction, s.q_gain, s.phi_gain,
                     s.mean_duration};
}

AccountSizeMix AccountSizeMix::from_multiplier(double m) {
    if (!(m >= 1.0))
        throw ModelError(Errc::degenerate, "account multiplier must be >= 1");
    return AccountSizeMix{m, 0.0};
}

AccountSizeMix AccountSizeMix::from_counts(const std::vector<std::pair<int, double>>& counts) {
    if (counts.empty())
        throw ModelError(Errc::degenerate, "account size list is empty");
    double total = 0.0, n_bar = 0.0, n2_bar = 0.0;
    for (const auto& [n, pi] : counts) {
        if (n < 1) throw ModelError(Errc::degenerate, "account sizes must be >= 1");
        if (!(pi >= 0.0)) throw ModelError(Errc::degenerate, "fractions must be >= 0");
        total += pi;
        n_bar += pi * n;
        n2_bar += pi * static_cast<double>(n) * n;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw ModelError(Errc::degenerate, "account fractions must sum to 1");
    const double var = n2_bar - n_bar * n_bar;
    return AccountSizeMix{n_bar, std::sqrt(std::max(var, 0.0))};
}

OdeanStats representative_odean(double q_gain, double phi_gain, const AccountSizeMix& mix) {
    const double m = mix.multiplier();
    if (!(m >= 1.0))
        throw ModelError(Errc::degenerate, "account multiplier must be >= 1");
    const double q_loss = 1.0 - q_gain;
    const double phi_loss = 1.0 - phi_gain;
    const double pgr = q_gain / (q_gain + (m - 1.0) * phi_gain);
    const double plr = q_loss / (q_loss + (m - 1.0) * phi_loss);
    return odean_from(pgr, plr);
}

OdeanStats representative_odean(const EpisodeStats& stats, const AccountSizeMix& mix) {
    return representative_odean(stats.q_gain, stats.phi_gain, mix);
}

OdeanStats representative_odean(const PoissonStats& stats, const AccountSizeMix& mix) {
    return representative_odean(stats.q_gain, stats.phi_gain, mix);
}

PopulationStats heterogeneous_investors(const std::vector<InvestorType>& types) {
    if (types.empty())
        throw ModelError(Errc::degenerate, "investor type list is empty");
    double pi_total = 0.0;
    for (const auto& t : types) {
        if (t.n < 1) throw ModelError(Errc::degenerate, "stock counts must be >= 1");
        if (!(t.pi >= 0.0)) throw ModelError(Errc::degenerate, "fractions must be >= 0");
        check_type_stats(t.stats);
        pi_total += t.pi;
    }
    if (std::abs(pi_total - 1.0) > 1e-9)
        throw ModelError(Errc::degenerate, "type fractions must sum to 1");

    // Trade weights pi_i n_i / E[tau_i]; paper positions add (n_i - 1) of the
    // same account per trade, which drives the separate phi weighting.
    double trade_w = 0.0, gain_mult = 0.0, loss_frac = 0.0, q_bar = 0.0, tau_bar = 0.0;
    bool gain_mult_finite = true;
    double phi_num = 0.0, phi_den = 0.0;
    double pgr_num = 0.0, pgr_den = 0.0, plr_num = 0.0, plr_den = 0.0;

    for (const auto& t : types) {
        const double rate = t.pi * t.n / t.stats.mean_duration;
        trade_w += rate;
        if (t.stats.gain_multiple)
            gain_mult += rate * (*t.stats.gain_multiple);
        else
            gain_mult_finite = false;
        loss_frac += rate * t.stats.loss_fraction;
        q_bar += rate * t.stats.q_gain;
        tau_bar += rate * t.stats.mean_duration;

        const double pair_rate = rate * (t.n - 1.0);
        phi_num += pair_rate * t.stats.phi_gain;
        phi_den += pair_rate;

        const double q_l = 1.0 - t.stats.q_gain;
        const double phi_l = 1.0 - t.stats.phi_gain;
        pgr_num += rate * t.stats.q_gain;
        pgr_den += rate * (t.stats.q_gain + (t.n - 1.0) * t.stats.phi_gain);
        plr_num += rate * q_l;
        plr_den += rate * (q_l + (t.n - 1.0) * phi_l);
    }

    PopulationStats out{};
    if (gain_mult_finite) out.gain_multiple_bar = gain_mult / trade_w;
    out.loss_fraction_bar = loss_frac / trade_w;
    out.q_gain_bar = q_bar / trade_w;
    out.mean_duration_bar = tau_bar / trade_w;
    if (phi_den > 0.0) out.phi_gain_bar = phi_num / phi_den;
    out.odean = odean_from(pgr_num / pgr_den, plr_num / plr_den);
    return out;
}

PopulationStats heterogeneous_holdings(const std::vector<HoldingGroup>& groups) {
    if (groups.empty())
        throw ModelError(Errc::degenerate, "holding group list is empty");
    double n_total = 0.0;
    double phi_sum = 0.0;  // sum_j n_j phi_G^j over the whole account
    for (const auto& g : groups) {
        if (g.n < 1) throw ModelError(Errc::degenerate, "group sizes must be >= 1");
        check_type_stats(g.stats);
        n_total += g.n;
        phi_sum += g.n * g.stats.phi_gain;
    }
    if (n_total < 2.0)
        throw ModelError(Errc::degenerate,
                         "paper-gain counting needs at least two stocks in the account");
    const double phi_loss_sum = n_total - phi_sum;

    double trade_w = 0.0, gain_mult = 0.0, loss_frac = 0.0, q_bar = 0.0, tau_bar = 0.0;
    bool gain_mult_finite = true;
    double phi_num = 0.0;
    double pgr_num = 0.0, pgr_den = 0.0, plr_num = 0.0, plr_den = 0.0;

    for (const auto& g : groups) {
        const double rate = g.n / g.stats.mean_duration;
        trade_w += rate;
        if (g.stats.gain_multiple)
            gain_mult += rate * (*g.stats.gain_multiple);
        else
            gain_mult_finite = false;
        loss_frac += rate * g.stats.loss_fraction;
        q_bar += rate * g.stats.q_gain;
        tau_bar += rate * g.stats.mean_duration;

        const double others_gain = phi_sum - g.stats.phi_gain;
        const double others_loss = phi_loss_sum - (1.0 - g.stats.phi_gain);
        phi_num += rate * others_gain;
        pgr_num += rate * g.stats.q_gain;
        pgr_den += rate * (g.stats.q_gain + others_gain);
        plr_num += rate * (1.0 - g.stats.q_gain);
        plr_den += rate * (1.0 - g.stats.q_gain + others_loss);
    }

    PopulationStats out{};
    if (gain_mult_finite) out.gain_multiple_bar = gain_mult / trade_w;
    out.loss_fraction_bar = loss_frac / trade_w;
    out.q_gain_bar = q_bar / trade_w;
    out.mean_duration_bar = tau_bar / trade_w;
    out.phi_gain_bar = phi_num / ((n_total - 1.0) * trade_w);
    out.odean = odean_from(pgr_num / pgr_den, plr_num / plr_den);
    return out;
}

}  // namespace reutil
