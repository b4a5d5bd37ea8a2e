#pragma once

#include <stdexcept>
#include <string>

namespace gpide {

/// Failure categories surfaced by the library.  Each maps onto one of the
/// CLI exit codes: 2 (configuration), 3 (infeasible numerics), 4 (check
/// failure).
enum class Errc {
    OrderViolation,        ///< interval bounds out of order
    AlphaOutOfRange,       ///< stability index outside (1,2)
    BetaOutOfRange,        ///< tail exponent <= alpha
    DeltaOutOfRange,       ///< fractional-moment order outside the admissible window
    InfeasibleCompletion,  ///< no nonnegative interior density exists
    RadiusTooSmall,        ///< truncation radius below 1
    GridTooNarrow,         ///< certified boundary-influence bound above tolerance
    DegenerateFit,         ///< too few usable residuals for an order fit
    ConfigError,           ///< malformed or unknown configuration input
    CheckFailure,          ///< a verification sweep failed its threshold
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

    Errc code() const noexcept { return code_; }

    /// CLI exit code for this failure class.
    int exit_code() const noexcept {
        switch (code_) {
            case Errc::OrderViolation:
            case Errc::AlphaOutOfRange:
            case Errc::BetaOutOfRange:
            case Errc::RadiusTooSmall:
            case Errc::ConfigError:
                return 2;
            case Errc::DeltaOutOfRange:
            case Errc::InfeasibleCompletion:
            case Errc::GridTooNarrow:
                return 3;
            case Errc::DegenerateFit:
            case Errc::CheckFailure:
                return 4;
        }
        return 1;
    }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace gpide
