#pragma once

#include <stdexcept>
#include <string>

namespace mindiv {

// Error taxonomy shared by the C++ core and the C API status codes.
enum class errc {
    ok = 0,
    invalid_argument,
    unsupported_kernel,
    unsupported_pair,
    divergent_parameter,
    out_of_support,
    domain_error,
    infeasible,
    insufficient_samples,
    truncation_failure,
    no_locations,
    parse_error,
    missing_cell,
    non_monotone_dates,
    panel_too_short,
    singular_covariance,
    unknown_experiment,
    io_error,
    internal,
};

const char* errc_name(errc c);

class error : public std::runtime_error {
  public:
    error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    errc code() const noexcept { return code_; }

  private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& msg) { throw error(code, msg); }

inline void require(bool cond, errc code, const std::string& msg) {
    if (!cond) fail(code, msg);
}

} // namespace mindiv
