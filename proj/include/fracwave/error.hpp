#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fracwave {

/// Error categories raised by the library. The CLI maps these onto exit codes.
enum class Errc {
    invalid_order,
    invalid_input,
    unsupported_order,
    grid_too_coarse,
    domain_error,
    incompatible_grids,
    precondition_violated,
    incomplete_data,
    unsupported_norm,
    resolution_error,
    range_error,
    undefined_ratio,
    oracle_out_of_range,
    mode_failure,
    reference_unavailable,
    usage_error,
    io_error,
};

constexpr std::string_view to_string(Errc code) noexcept {
    switch (code) {
        case Errc::invalid_order: return "invalid-order";
        case Errc::invalid_input: return "invalid-input";
        case Errc::unsupported_order: return "unsupported-order";
        case Errc::grid_too_coarse: return "grid-too-coarse";
        case Errc::domain_error: return "domain-error";
        case Errc::incompatible_grids: return "incompatible-grids";
        case Errc::precondition_violated: return "precondition-violated";
        case Errc::incomplete_data: return "incomplete-data";
        case Errc::unsupported_norm: return "unsupported-norm";
        case Errc::resolution_error: return "resolution-error";
        case Errc::range_error: return "range-error";
        case Errc::undefined_ratio: return "undefined-ratio";
        case Errc::oracle_out_of_range: return "oracle-out-of-range";
        case Errc::mode_failure: return "mode-failure";
        case Errc::reference_unavailable: return "reference-unavailable";
        case Errc::usage_error: return "usage-error";
        case Errc::io_error: return "io-error";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace fracwave
