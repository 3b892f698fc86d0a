#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hypsearch {

enum class Errc {
  SyntaxError,
  UnknownFunction,
  IllegalVariable,
  DuplicateParam,
  MissingDefault,
  UnboundVariable,
  EmptyInput,
  MissingCell,
  NoSuccessfulRuns,
  DegenerateTraining,
  LengthMismatch,
  ZeroVariance,
  MissingData,
  ChecksumMismatch,
  ShapeMismatch,
  KindMismatch,
  MissingFile,
  NotEnoughEntries,
  TransportError,
  AuthError,
  RateLimited,
  GeneratorExhausted,
  UnknownId,
  EmptyCandidates,
  CorruptRecord,
  NoEvaluations,
  InvalidConfig,
  IoError,
};

std::string_view errc_name(Errc code);

// Single exception type for all domain errors; `code()` identifies the
// condition, `position()` is a byte offset into the offending text for
// parse-level errors (-1 otherwise).
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message, long position = -1)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code),
        position_(position) {}

  Errc code() const { return code_; }
  long position() const { return position_; }

 private:
  Errc code_;
  long position_;
};

}  // namespace hypsearch
