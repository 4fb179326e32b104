#include "starscatter/errors.hpp"

namespace starscatter {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotHermitian: return "not_hermitian";
    case ErrorCode::NoConvergence: return "no_convergence";
    case ErrorCode::Singular: return "singular";
    case ErrorCode::BadParameter: return "bad_parameter";
    case ErrorCode::NotSkewHermitian: return "not_skew_hermitian";
    case ErrorCode::Degenerate: return "degenerate";
    case ErrorCode::DimensionMismatch: return "dimension_mismatch";
    case ErrorCode::NotCanonical: return "not_canonical";
    case ErrorCode::OddDimension: return "odd_dimension";
    case ErrorCode::NotUnitary: return "not_unitary";
    case ErrorCode::NotLagrange: return "not_lagrange";
    case ErrorCode::RankDeficient: return "rank_deficient";
    case ErrorCode::NotSelfAdjointPair: return "not_self_adjoint_pair";
    case ErrorCode::UnknownPreset: return "unknown_preset";
    case ErrorCode::KTooSmall: return "k_too_small";
    case ErrorCode::KMismatch: return "k_mismatch";
    case ErrorCode::IntegrationFailure: return "integration_failure";
    case ErrorCode::InsufficientRange: return "insufficient_range";
    case ErrorCode::NonFiniteSample: return "non_finite_sample";
    case ErrorCode::NegativeSupport: return "negative_support";
    case ErrorCode::ParseError: return "parse_error";
    case ErrorCode::ValidationError: return "validation_error";
    case ErrorCode::IoError: return "io_error";
  }
  return "unknown_error";
}

}  // namespace starscatter
