#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "reutil/aggregation.hpp"
#include "reutil/episode_stats.hpp"
#include "reutil/mc.hpp"
#include "reutil/params.hpp"
#include "reutil/policy.hpp"
#include "reutil/utility.hpp"

namespace py = pybind11;
using namespace reutil;

PYBIND11_MODULE(_reutil, m) {
    m.doc() = "Optimal gain/loss realization policies and disposition statistics "
              "for reference-dependent realization-utility investors.";

    static py::exception<ModelError> model_error(m, "ModelError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ModelError& e) {
            model_error(e.what());
        }
    });

    py::class_<AssetParams>(m, "AssetParams")
        .def(py::init<double, double>(), py::arg("mu"), py::arg("sigma"))
        .def_readwrite("mu", &AssetParams::mu)
        .def_readwrite("sigma", &AssetParams::sigma);

    py::class_<CostSpec>(m, "CostSpec")
        .def(py::init([](double k_s, double k_p, std::optional<double> kappa) {
                 return CostSpec{k_s, k_p, kappa};
             }),
             py::arg("k_s") = 0.0, py::arg("k_p") = 0.0, py::arg("kappa") = py::none())
        .def_readwrite("k_s", &CostSpec::k_s)
        .def_readwrite("k_p", &CostSpec::k_p)
        .def_property(
            "kappa", [](const CostSpec& c) { return c.kappa(); },
            [](CostSpec& c, std::optional<double> v) { c.kappa_override = v; })
        .def("round_trip", &CostSpec::round_trip);

    py::enum_<UtilityFamily>(m, "UtilityFamily")
        .value("scaled_tk", UtilityFamily::scaled_tk)
        .value("modified_tk", UtilityFamily::modified_tk);

    py::class_<UtilitySpec>(m, "UtilitySpec")
        .def(py::init([](const std::string& family, double alpha_g, double alpha_l,
                         double lambda, double beta, double delta) {
                 UtilitySpec u;
                 u.family = family == "modified_tk" ? UtilityFamily::modified_tk
                                                    : UtilityFamily::scaled_tk;
                 u.alpha_g = alpha_g;
                 u.alpha_l = alpha_l;
                 u.lambda = lambda;
                 u.beta = beta;
                 u.delta = delta;
                 return u;
             }),
             py::arg("family"), py::arg("alpha_g"), py::arg("alpha_l"),
             py::arg("lambda_") = 1.0, py::arg("beta") = 0.0, py::arg("delta") = 0.05)
        .def_readwrite("family", &UtilitySpec::family)
        .def_readwrite("alpha_g", &UtilitySpec::alpha_g)
        .def_readwrite("alpha_l", &UtilitySpec::alpha_l)
        .def_readwrite("lambda_", &UtilitySpec::lambda)
        .def_readwrite("beta", &UtilitySpec::beta)
        .def_readwrite("delta", &UtilitySpec::delta);

    py::class_<GammaRoots>(m, "GammaRoots")
        .def_readonly("gamma1", &GammaRoots::gamma1)
        .def_readonly("gamma2", &GammaRoots::gamma2);

    py::class_<TransversalityViolation>(m, "TransversalityViolation")
        .def_property_readonly("code",
                               [](const TransversalityViolation& v) {
                                   return std::string(transversality_code_name(v.code));
                               })
        .def_readonly("message", &TransversalityViolation::message);

    py::class_<TransversalityReport>(m, "TransversalityReport")
        .def_readonly("ok", &TransversalityReport::ok)
        .def_readonly("violations", &TransversalityReport::violations)
        .def_readonly("warnings", &TransversalityReport::warnings);

    m.def("gamma_roots", &gamma_roots, py::arg("asset"), py::arg("delta"));
    m.def("check_transversality", &check_transversality, py::arg("utility"),
          py::arg("asset"), py::arg("costs"));
    m.def("round_trip_factor", &round_trip_factor, py::arg("costs"));

    m.def("burst", &burst, py::arg("g"), py::arg("utility"));
    m.def(
        "burst_marginal",
        [](double g, const UtilitySpec& u, std::optional<std::string> side) {
            std::optional<KinkSide> s;
            if (side) s = (*side == "below") ? KinkSide::below : KinkSide::above;
            return burst_marginal(g, u, s);
        },
        py::arg("g"), py::arg("utility"), py::arg("side") = py::none());
    m.def("full_burst", &full_burst, py::arg("gain"), py::arg("reference"),
          py::arg("utility"));

    py::class_<ValueCoefficients>(m, "ValueCoefficients")
        .def_readonly("c1", &ValueCoefficients::c1)
        .def_readonly("c2", &ValueCoefficients::c2)
        .def_readonly("gamma", &ValueCoefficients::gamma)
        .def_readonly("theta", &ValueCoefficients::theta)
        .def_readonly("theta_big", &ValueCoefficients::theta_big);

    py::enum_<PolicyRegime>(m, "PolicyRegime")
        .value("two_point", PolicyRegime::two_point)
        .value("gains_only", PolicyRegime::gains_only);

    py::class_<Policy>(m, "Policy")
        .def_readonly("theta", &Policy::theta)
        .def_readonly("theta_big", &Policy::theta_big)
        .def_readonly("regime", &Policy::regime)
        .def_readonly("v1", &Policy::v1)
        .def_readonly("coefficients", &Policy::coefficients)
        .def_readonly("warnings", &Policy::warnings);

    py::class_<PastingResiduals>(m, "PastingResiduals")
        .def_readonly("lower", &PastingResiduals::lower)
        .def_readonly("upper", &PastingResiduals::upper);

    py::class_<CriticalLambda>(m, "CriticalLambda")
        .def_readonly("lambda_star", &CriticalLambda::lambda_star)
        .def_readonly("theta_star", &CriticalLambda::theta_star)
        .def_readonly("theta_big_star", &CriticalLambda::theta_big_star);

    m.def("value_coefficients", &value_coefficients, py::arg("theta"), py::arg("theta_big"),
          py::arg("utility"), py::arg("asset"), py::arg("costs"));
    m.def("value_coefficients_gains_only", &value_coefficients_gains_only,
          py::arg("theta_big"), py::arg("utility"), py::arg("asset"), py::arg("costs"));
    m.def("reduced_value", &reduced_value, py::arg("x"), py::arg("coefficients"));
    m.def("optimize_policy", &optimize_policy, py::arg("utility"), py::arg("asset"),
          py::arg("costs"));
    m.def("smooth_pasting_residuals", &smooth_pasting_residuals, py::arg("policy"),
          py::arg("utility"), py::arg("asset"), py::arg("costs"));
    m.def("critical_lambda", &critical_lambda, py::arg("utility"), py::arg("asset"),
          py::arg("costs"));

    py::class_<EpisodeStats>(m, "EpisodeStats")
        .def_readonly("q_gain", &EpisodeStats::q_gain)
        .def_readonly("q_loss", &EpisodeStats::q_loss)
        .def_readonly("phi_gain", &EpisodeStats::phi_gain)
        .def_readonly("phi_loss", &EpisodeStats::phi_loss)
        .def_readonly("mean_duration", &EpisodeStats::mean_duration);

    py::class_<PoissonStats>(m, "PoissonStats")
        .def_readonly("mean_gain_multiple", &PoissonStats::mean_gain_multiple)
        .def_readonly("mean_loss_fraction", &PoissonStats::mean_loss_fraction)
        .def_readonly("q_gain", &PoissonStats::q_gain)
        .def_readonly("phi_gain", &PoissonStats::phi_gain)
        .def_readonly("mean_duration", &PoissonStats::mean_duration);

    m.def("threshold_stats", &threshold_stats, py::arg("theta"), py::arg("theta_big"),
          py::arg("asset"));
    m.def("gains_only_stats", &gains_only_stats, py::arg("theta_big"), py::arg("asset"));
    m.def("steady_state_pdf", &steady_state_pdf, py::arg("x"), py::arg("theta"),
          py::arg("theta_big"), py::arg("asset"));
    m.def("steady_state_cdf", &steady_state_cdf, py::arg("x"), py::arg("theta"),
          py::arg("theta_big"), py::arg("asset"));
    m.def("poisson_stats", &poisson_stats, py::arg("rho"), py::arg("asset"));

    py::class_<ThresholdRule>(m, "ThresholdRule")
        .def(py::init<double, double>(), py::arg("theta"), py::arg("theta_big"))
        .def_readwrite("theta", &ThresholdRule::theta)
        .def_readwrite("theta_big", &ThresholdRule::theta_big);

    py::class_<PoissonRule>(m, "PoissonRule")
        .def(py::init<double>(), py::arg("rho"))
        .def_readwrite("rho", &PoissonRule::rho);

    py::class_<TypeStats>(m, "TypeStats")
        .def(py::init([](std::optional<double> gain_multiple, double loss_fraction,
                         double q_gain, double phi_gain, double mean_duration) {
                 return TypeStats{gain_multiple, loss_fraction, q_gain, phi_gain,
                                  mean_duration};
             }),
             py::arg("gain_multiple"), py::arg("loss_fraction"), py::arg("q_gain"),
             py::arg("phi_gain"), py::arg("mean_duration"))
        .def_readonly("gain_multiple", &TypeStats::gain_multiple)
        .def_readonly("loss_fraction", &TypeStats::loss_fraction)
        .def_readonly("q_gain", &TypeStats::q_gain)
        .def_readonly("phi_gain", &TypeStats::phi_gain)
        .def_readonly("mean_duration", &TypeStats::mean_duration);

    m.def("resolve_rule", &resolve_rule, py::arg("rule"), py::arg("asset"));

    py::class_<AccountSizeMix>(m, "AccountSizeMix")
        .def(py::init<double, double>(), py::arg("n_bar"), py::arg("sigma_n") = 0.0)
        .def_static("from_multiplier", &AccountSizeMix::from_multiplier, py::arg("m"))
        .def_static("from_counts", &AccountSizeMix::from_counts, py::arg("counts"))
        .def_readwrite("n_bar", &AccountSizeMix::n_bar)
        .def_readwrite("sigma_n", &AccountSizeMix::sigma_n)
        .def("multiplier", &AccountSizeMix::multiplier);

    py::class_<OdeanStats>(m, "OdeanStats")
        .def_readonly("pgr", &OdeanStats::pgr)
        .def_readonly("plr", &OdeanStats::plr)
        .def_readonly("odean", &OdeanStats::odean);

    py::class_<PopulationStats>(m, "PopulationStats")
        .def_readonly("gain_multiple_bar", &PopulationStats::gain_multiple_bar)
        .def_readonly("loss_fraction_bar", &PopulationStats::loss_fraction_bar)
        .def_readonly("q_gain_bar", &PopulationStats::q_gain_bar)
        .def_readonly("mean_duration_bar", &PopulationStats::mean_duration_bar)
        .def_readonly("phi_gain_bar", &PopulationStats::phi_gain_bar)
        .def_readonly("odean", &PopulationStats::odean);

    py::class_<InvestorType>(m, "InvestorType")
        .def(py::init([](double pi, int n, const TypeStats& stats) {
                 return InvestorType{pi, n, stats};
             }),
             py::arg("pi"), py::arg("n"), py::arg("stats"))
        .def_readwrite("pi", &InvestorType::pi)
        .def_readwrite("n", &InvestorType::n)
        .def_readwrite("stats", &InvestorType::stats);

    py::class_<HoldingGroup>(m, "HoldingGroup")
        .def(py::init([](int n, const TypeStats& stats) { return HoldingGroup{n, stats}; }),
             py::arg("n"), py::arg("stats"))
        .def_readwrite("n", &HoldingGroup::n)
        .def_readwrite("stats", &HoldingGroup::stats);

    m.def("representative_odean",
          py::overload_cast<double, double, const AccountSizeMix&>(&representative_odean),
          py::arg("q_gain"), py::arg("phi_gain"), py::arg("mix"));
    m.def("heterogeneous_investors", &heterogeneous_investors, py::arg("types"));
    m.def("heterogeneous_holdings", &heterogeneous_holdings, py::arg("groups"));

    py::class_<SimConfig>(m, "SimConfig")
        .def(py::init([](std::uint64_t seed, double dt, std::int64_t n_episodes,
                         bool antithetic, int threads) {
                 return SimConfig{seed, dt, n_episodes, antithetic, threads};
             }),
             py::arg("seed") = 1, py::arg("dt") = 1.0 / 2500.0,
             py::arg("n_episodes") = 100000, py::arg("antithetic") = false,
             py::arg("threads") = 0)
        .def_readwrite("seed", &SimConfig::seed)
        .def_readwrite("dt", &SimConfig::dt)
        .def_readwrite("n_episodes", &SimConfig::n_episodes)
        .def_readwrite("antithetic", &SimConfig::antithetic)
        .def_readwrite("threads", &SimConfig::threads);

    py::class_<Estimate>(m, "Estimate")
        .def_readonly("value", &Estimate::value)
        .def_readonly("se", &Estimate::se);

    py::class_<ThresholdSimResult>(m, "ThresholdSimResult")
        .def_readonly("q_gain", &ThresholdSimResult::q_gain)
        .def_readonly("phi_gain", &ThresholdSimResult::phi_gain)
        .def_readonly("mean_duration", &ThresholdSimResult::mean_duration)
        .def_readonly("n_episodes", &ThresholdSimResult::n_episodes);

    py::class_<PoissonSimResult>(m, "PoissonSimResult")
        .def_readonly("gain_multiple", &PoissonSimResult::gain_multiple)
        .def_readonly("loss_fraction", &PoissonSimResult::loss_fraction)
        .def_readonly("q_gain", &PoissonSimResult::q_gain)
        .def_readonly("phi_gain", &PoissonSimResult::phi_gain)
        .def_readonly("mean_duration", &PoissonSimResult::mean_duration)
        .def_readonly("n_episodes", &PoissonSimResult::n_episodes);

    py::class_<AccountSpec>(m, "AccountSpec")
        .def(py::init([](double weight, const std::vector<TradingRule>& stocks) {
                 return AccountSpec{weight, stocks};
             }),
             py::arg("weight"), py::arg("stocks"))
        .def_readwrite("weight", &AccountSpec::weight)
        .def_readwrite("stocks", &AccountSpec::stocks);

    py::class_<AccountSimConfig>(m, "AccountSimConfig")
        .def(py::init([](double horizon_years, int n_accounts, double burn_in_years) {
                 return AccountSimConfig{horizon_years, n_accounts, burn_in_years};
             }),
             py::arg("horizon_years") = 20.0, py::arg("n_accounts") = 100,
             py::arg("burn_in_years") = -1.0)
        .def_readwrite("horizon_years", &AccountSimConfig::horizon_years)
        .def_readwrite("n_accounts", &AccountSimConfig::n_accounts)
        .def_readwrite("burn_in_years", &AccountSimConfig::burn_in_years);

    py::class_<AccountSimResult>(m, "AccountSimResult")
        .def_readonly("pgr", &AccountSimResult::pgr)
        .def_readonly("plr", &AccountSimResult::plr)
        .def_readonly("odean", &AccountSimResult::odean)
        .def_readonly("phi_gain", &AccountSimResult::phi_gain)
        .def_readonly("n_sales", &AccountSimResult::n_sales)
        .def_readonly("burn_in_years", &AccountSimResult::burn_in_years);

    m.def(
        "simulate_threshold_episodes",
        [](double theta, double theta_big, const AssetParams& asset, const SimConfig& cfg) {
            return simulate_threshold_episodes(theta, theta_big, asset, cfg);
        },
        py::arg("theta"), py::arg("theta_big"), py::arg("asset"), py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
    m.def(
        "simulate_poisson_episodes",
        [](double rho, const AssetParams& asset, const SimConfig& cfg) {
            return simulate_poisson_episodes(rho, asset, cfg);
        },
        py::arg("rho"), py::arg("asset"), py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
    m.def("simulate_accounts", &simulate_accounts, py::arg("accounts"), py::arg("asset"),
          py::arg("account_config"), py::arg("config"),
          py::call_guard<py::gil_scoped_release>());
}
