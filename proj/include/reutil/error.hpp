#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace reutil {

// Stable error codes surfaced through exceptions and the CLI.
enum class Errc {
    invalid_sigma,
    nonpositive_delta,
    invalid_costs,
    invalid_kappa,
    invalid_utility,
    domain,
    kink,
    invalid_reference,
    singular,
    out_of_region,
    transversality,
    no_participation,
    no_root,
    degenerate,
    out_of_support,
    horizon_too_short,
    config_parse,
};

std::string_view errc_name(Errc code);

class ModelError : public std::runtime_error {
public:
    ModelError(Errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    Errc code() const { return code_; }

private:
    Errc code_;
};

}  // namespace reutil
