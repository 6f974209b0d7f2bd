#include "errors.hpp"

namespace mindiv {

const char* errc_name(errc c) {
    switch (c) {
        case errc::ok: return "ok";
        case errc::invalid_argument: return "invalid_argument";
        case errc::unsupported_kernel: return "unsupported_kernel";
        case errc::unsupported_pair: return "unsupported_pair";
        case errc::divergent_parameter: return "divergent_parameter";
        case errc::out_of_support: return "out_of_support";
        case errc::domain_error: return "domain_error";
        case errc::infeasible: return "infeasible";
        case errc::insufficient_samples: return "insufficient_samples";
        case errc::truncation_failure: return "truncation_failure";
        case errc::no_locations: return "no_locations";
        case errc::parse_error: return "parse_error";
        case errc::missing_cell: return "missing_cell";
        case errc::non_monotone_dates: return "non_monotone_dates";
        case errc::panel_too_short: return "panel_too_short";
        case errc::singular_covariance: return "singular_covariance";
        case errc::unknown_experiment: return "unknown_experiment";
        case errc::io_error: return "io_error";
        case errc::internal: return "internal";
    }
    return "unknown";
}

} // namespace mindiv
