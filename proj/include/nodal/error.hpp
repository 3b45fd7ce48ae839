#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nodal {

enum class errc {
    invalid_argument,
    zero_wavevector,
    amplitude_mismatch,
    empty_input,
    too_many_terms,
    search_too_large,
    empty_side,
    grid_too_large,
    no_convergence,
    io_failure,
    parse_error,
    collinear_vectors,
    degenerate_case,
    no_circle_found,
    hypotheses_failed,
};

constexpr std::string_view to_string(errc code) noexcept
{
    switch (code) {
    case errc::invalid_argument: return "InvalidArgument";
    case errc::zero_wavevector: return "ZeroWavevector";
    case errc::amplitude_mismatch: return "AmplitudeMismatch";
    case errc::empty_input: return "EmptyInput";
    case errc::too_many_terms: return "TooManyTerms";
    case errc::search_too_large: return "SearchTooLarge";
    case errc::empty_side: return "EmptySide";
    case errc::grid_too_large: return "GridTooLarge";
    case errc::no_convergence: return "NoConvergence";
    case errc::io_failure: return "IoFailure";
    case errc::parse_error: return "ParseError";
    case errc::collinear_vectors: return "CollinearVectors";
    case errc::degenerate_case: return "DegenerateCase";
    case errc::no_circle_found: return "NoCircleFound";
    case errc::hypotheses_failed: return "HypothesesFailed";
    }
    return "Unknown";
}

/// Every domain failure in the library is reported through this type.
class error : public std::runtime_error {
public:
    error(errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

} // namespace nodal
