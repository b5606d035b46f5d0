#pragma once

#include <optional>

#include "reutil/params.hpp"

namespace reutil {

// Which branch to use when evaluating the marginal burst at the kink g = 0.
enum class KinkSide { above, below };

// Burst utility u(g) at gain ratio g = G/R. For modified-TK the domain is
// g >= -1; |alpha| below 1e-12 routes to the logarithmic limit ln(1+g).
double burst(double g, const UtilitySpec& u);

// Exact one-branch derivative u'(g). At g = 0 a side must be given (the kink
// is economically meaningful); scaled-TK with alpha < 1 has an infinite
// one-sided limit there.
double burst_marginal(double g, const UtilitySpec& u,
                      std::optional<KinkSide> side = std::nullopt);

// Full two-argument burst U(G, R) = R^beta * u(G/R); requires R > 0.
double full_burst(double gain, double reference, const UtilitySpec& u);

}  // namespace reutil
