#pragma once

#include <stdexcept>
#include <string>

namespace tsdelay {

/// Failure categories surfaced by the library. Each enumerator corresponds to one
/// documented failure mode of an operation; callers branch on code(), not on text.
enum class ErrorCode {
    Overlap,            // time-scale components intersect or are malformed
    Step,               // dense_step unusable for the given components
    NotInTimescale,     // queried point is not a member of the scale
    EmptyInterval,      // interval query with a > b
    OutOfDomain,        // point outside a grid function's domain or integration range
    KappaViolation,     // delta-derivative requested at a left-scattered maximum
    Branch,             // cylinder transform hit 1 + hz <= 0
    Regressivity,       // exponential requested for a non-(positively-)regressive f
    MissingBound,       // no usable bound M available for the existence window
    NoConvergence,      // Picard iteration exhausted max_iter above tolerance
    BallExit,           // an iterate left the epsilon-ball around the initial value
    WindowTooSmall,     // existence window degenerate at a right-dense start
    Snap,               // a delay value has no grid point within reach
    Domain,             // argument outside an operation's contract
    Evaluation,         // user-supplied callable produced a non-finite value
    Envelope,           // sampled rhs norm exceeded the declared growth envelope
    Syntax,             // expression text unparseable
    UnknownFunction,    // call to a function not in the builtin table
    Arity,              // builtin called with the wrong argument count
    UnboundVariable,    // evaluation hit a variable with no binding
    MathDomain,         // log of nonpositive, sqrt of negative, ...
    Parse,              // config file structurally invalid
    Validation,         // cross-field problem invariant violated
};

const char* error_code_name(ErrorCode code);

/// Single exception type for all library failures.
class TsError : public std::runtime_error {
public:
    TsError(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw TsError(code, message);
}

} // namespace tsdelay
