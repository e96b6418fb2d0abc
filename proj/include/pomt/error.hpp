#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pomt {

/// Machine-readable failure category. The CLI maps these onto exit codes.
enum class ErrorCode {
    validation,
    singularity,
    model_violation,
    undefined_optimum,
    parse,
    io,
};

inline constexpr std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::validation: return "validation";
    case ErrorCode::singularity: return "singularity";
    case ErrorCode::model_violation: return "model-violation";
    case ErrorCode::undefined_optimum: return "undefined-optimum";
    case ErrorCode::parse: return "parse";
    case ErrorCode::io: return "io";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

struct ValidationError : Error {
    explicit ValidationError(const std::string& m) : Error(ErrorCode::validation, m) {}
};

/// Raised when a linear network is singular at the requested frequency.
struct SingularityError : Error {
    SingularityError(const std::string& m, double omega)
        : Error(ErrorCode::singularity, m), omega(omega) {}
    double omega;
};

struct ModelViolation : Error {
    explicit ModelViolation(const std::string& m) : Error(ErrorCode::model_violation, m) {}
};

struct UndefinedOptimum : Error {
    explicit UndefinedOptimum(const std::string& m) : Error(ErrorCode::undefined_optimum, m) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& m) : Error(ErrorCode::parse, m) {}
};

} // namespace pomt
