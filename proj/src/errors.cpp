#include "tsdelay/errors.hpp"

namespace tsdelay {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::Overlap: return "OverlapError";
        case ErrorCode::Step: return "StepError";
        case ErrorCode::NotInTimescale: return "NotInTimescale";
        case ErrorCode::EmptyInterval: return "EmptyInterval";
        case ErrorCode::OutOfDomain: return "OutOfDomain";
        case ErrorCode::KappaViolation: return "KappaViolation";
        case ErrorCode::Branch: return "BranchError";
        case ErrorCode::Regressivity: return "RegressivityError";
        case ErrorCode::MissingBound: return "MissingBound";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::BallExit: return "BallExit";
        case ErrorCode::WindowTooSmall: return "WindowTooSmall";
        case ErrorCode::Snap: return "SnapError";
        case ErrorCode::Domain: return "DomainError";
        case ErrorCode::Evaluation: return "EvaluationError";
        case ErrorCode::Envelope: return "EnvelopeViolation";
        case ErrorCode::Syntax: return "SyntaxError";
        case ErrorCode::UnknownFunction: return "UnknownFunction";
        case ErrorCode::Arity: return "ArityError";
        case ErrorCode::UnboundVariable: return "UnboundVariable";
        case ErrorCode::MathDomain: return "MathDomain";
        case ErrorCode::Parse: return "ParseError";
        case ErrorCode::Validation: return "ValidationError";
    }
    return "TsError";
}

} // namespace tsdelay
