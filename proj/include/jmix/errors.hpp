#pragma once

#include <stdexcept>
#include <string>

namespace jmix {

// Every library failure derives from jmix::error so callers (and the CLI exit
// code mapping) can dispatch on the concrete kind.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct domain_error : error {
    using error::error;
};

// Operation sits on an inductance divergence of the ring.
struct singular_flux_error : error {
    using error::error;
};

// Common denominator of the ABCD -> S map vanished (pumped network at threshold).
struct singular_network_error : error {
    using error::error;
};

struct synthesis_infeasible_error : error {
    synthesis_infeasible_error(std::string stage_name, const std::string& what)
        : error(what), stage(std::move(stage_name)) {}
    std::string stage;
};

struct fit_degenerate_error : error {
    using error::error;
};

struct infeasible_bounds_error : error {
    using error::error;
};

// Standing-wave loop gain reached unity in the measurement-chain model.
struct divergence_error : error {
    using error::error;
};

struct schema_error : error {
    using error::error;
};

struct metric_undefined_error : error {
    using error::error;
};

} // namespace jmix
