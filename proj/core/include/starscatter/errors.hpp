#pragma once

#include <stdexcept>
#include <string>

namespace starscatter {

enum class ErrorCode {
  // matrix kernel
  NotHermitian,
  NoConvergence,
  Singular,
  BadParameter,
  // hermitian symplectic geometry
  NotSkewHermitian,
  Degenerate,
  DimensionMismatch,
  NotCanonical,
  OddDimension,
  NotUnitary,
  NotLagrange,
  // boundary conditions
  RankDeficient,
  NotSelfAdjointPair,
  UnknownPreset,
  // scattering
  KTooSmall,
  KMismatch,
  IntegrationFailure,
  InsufficientRange,
  NonFiniteSample,
  NegativeSupport,
  // configuration / io
  ParseError,
  ValidationError,
  IoError,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Configuration error tied to a named field, e.g. "kgrid.k_min".
class ValidationError : public Error {
 public:
  ValidationError(const std::string& field, const std::string& reason)
      : Error(ErrorCode::ValidationError, field + ": " + reason), field_(field) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& reason)
      : Error(ErrorCode::ParseError,
              "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + reason),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace starscatter
