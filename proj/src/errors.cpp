#include "lindblad_modes/errors.hpp"

namespace lindblad {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::DimensionMismatch: return "dimension-mismatch";
    case ErrorCode::IndexOutOfRange: return "index-out-of-range";
    case ErrorCode::NonHermitian: return "non-hermitian";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::Divergence: return "divergence";
    case ErrorCode::TruncationStrict: return "truncation-strict";
    case ErrorCode::Degeneracy: return "degeneracy";
    case ErrorCode::DimensionCap: return "dimension-cap";
    case ErrorCode::Unsupported: return "unsupported";
    }
    return "unknown";
}

int exit_code(ErrorCode code) {
    switch (code) {
    case ErrorCode::Parse: return 2;
    case ErrorCode::Divergence: return 3;
    case ErrorCode::TruncationStrict: return 4;
    case ErrorCode::Degeneracy: return 5;
    case ErrorCode::DimensionCap: return 6;
    case ErrorCode::InvalidArgument:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::IndexOutOfRange:
    case ErrorCode::NonHermitian:
    case ErrorCode::Unsupported: return 7;
    }
    return 1;
}

} // namespace lindblad
