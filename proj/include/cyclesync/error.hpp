#pragma once

#include <stdexcept>
#include <string>

namespace cyclesync {

// Error categories. The numeric values are shared with the C API status codes.
enum class ErrorCode : int {
    InvalidArgument = 1,
    NonOscillatory = 2,
    ZeroOutput = 3,
    MissingFinalDemand = 4,
    Disconnected = 5,
    ComplexSpectrum = 6,
    NonConvergence = 7,
    Reducible = 8,
    NumericalBlowup = 9,
    TooFewPeaks = 10,
    PhaseUndefined = 11,
    DegenerateSeries = 12,
    EntrainmentFailure = 13,
    NotOscillating = 14,
    DegenerateTangent = 15,
    IllConditioned = 16,
    ConsistencyBreach = 17,
    DuplicateKey = 18,
    MalformedRow = 19,
    SeriesTooShort = 20,
    MissingJoinYear = 21,
    NonPositiveValue = 22,
    InsufficientOverlap = 23,
    EmptyGroup = 24,
    Io = 25,
    Config = 26,
};

const char* error_name(ErrorCode code) noexcept;

enum class ErrorKind { Config, Numerical, Data };

// Coarse classification used by the CLI exit codes.
ErrorKind error_kind(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, const std::string& what) {
    if (!cond) fail(ErrorCode::InvalidArgument, what);
}

}  // namespace cyclesync
