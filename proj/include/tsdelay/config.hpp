#pragma once

#include <optional>
#include <string>

#include "tsdelay/problems.hpp"

namespace tsdelay {

enum class ProblemKind { Linear, Nonlinear };

/// Knobs read from the [solver] section; everything has a usable default.
struct SolverConfig {
    double tol = 1e-10;
    int max_iter = 200;
    double epsilon = 1.0;
    std::optional<double> lipschitz; // L, informational bound for diagnostics
    std::optional<double> bound;     // M, overrides the sampled estimate
    double verify_tol = 1e-8;
};

/// A fully parsed and validated problem description. Exactly one of linear or
/// nonlinear is set, matching kind. Validation runs eagerly at parse time, so a
/// ProblemSpec in hand is safe to hand to the solvers.
struct ProblemSpec {
    ProblemKind kind = ProblemKind::Linear;
    std::optional<LinearDelaySystem> linear;
    std::optional<DelayIVP> nonlinear;
    std::optional<GrowthEnvelope> envelope;
    SolverConfig solver;

    const TimeScale& timescale() const {
        return kind == ProblemKind::Linear ? linear->ts : nonlinear->ts;
    }
    double alpha() const { return kind == ProblemKind::Linear ? linear->alpha : nonlinear->alpha; }
    double beta() const { return kind == ProblemKind::Linear ? linear->beta : nonlinear->beta; }
    double gamma() const { return kind == ProblemKind::Linear ? linear->gamma : nonlinear->gamma; }
    int dim() const { return kind == ProblemKind::Linear ? linear->dim : nonlinear->dim; }
};

/// Parses the line-oriented config format (see docs/config-format.md). Structural
/// problems raise Parse with a line number; violated problem invariants raise
/// the corresponding validation error, so solvers never see a bad system.
ProblemSpec parse_config(const std::string& text);

/// Reads the file and parses it; Parse error if the file cannot be read.
ProblemSpec load_config_file(const std::string& path);

} // namespace tsdelay
