#include "cyclesync/error.hpp"

namespace cyclesync {

const char* error_name(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::NonOscillatory: return "NonOscillatory";
        case ErrorCode::ZeroOutput: return "ZeroOutput";
        case ErrorCode::MissingFinalDemand: return "MissingFinalDemand";
        case ErrorCode::Disconnected: return "Disconnected";
        case ErrorCode::ComplexSpectrum: return "ComplexSpectrum";
        case ErrorCode::NonConvergence: return "NonConvergence";
        case ErrorCode::Reducible: return "Reducible";
        case ErrorCode::NumericalBlowup: return "NumericalBlowup";
        case ErrorCode::TooFewPeaks: return "TooFewPeaks";
        case ErrorCode::PhaseUndefined: return "PhaseUndefined";
        case ErrorCode::DegenerateSeries: return "DegenerateSeries";
        case ErrorCode::EntrainmentFailure: return "EntrainmentFailure";
        case ErrorCode::NotOscillating: return "NotOscillating";
        case ErrorCode::DegenerateTangent: return "DegenerateTangent";
        case ErrorCode::IllConditioned: return "IllConditioned";
        case ErrorCode::ConsistencyBreach: return "ConsistencyBreach";
        case ErrorCode::DuplicateKey: return "DuplicateKey";
        case ErrorCode::MalformedRow: return "MalformedRow";
        case ErrorCode::SeriesTooShort: return "SeriesTooShort";
        case ErrorCode::MissingJoinYear: return "MissingJoinYear";
        case ErrorCode::NonPositiveValue: return "NonPositiveValue";
        case ErrorCode::InsufficientOverlap: return "InsufficientOverlap";
        case ErrorCode::EmptyGroup: return "EmptyGroup";
        case ErrorCode::Io: return "Io";
        case ErrorCode::Config: return "Config";
    }
    return "Unknown";
}

ErrorKind error_kind(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument:
        case ErrorCode::Config:
            return ErrorKind::Config;
        case ErrorCode::ZeroOutput:
        case ErrorCode::MissingFinalDemand:
        case ErrorCode::DuplicateKey:
        case ErrorCode::MalformedRow:
        case ErrorCode::SeriesTooShort:
        case ErrorCode::MissingJoinYear:
        case ErrorCode::NonPositiveValue:
        case ErrorCode::InsufficientOverlap:
        case ErrorCode::EmptyGroup:
        case ErrorCode::Io:
            return ErrorKind::Data;
        default:
            return ErrorKind::Numerical;
    }
}

}  // namespace cyclesync
