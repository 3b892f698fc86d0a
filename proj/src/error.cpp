#include "hypsearch/error.hpp"

namespace hypsearch {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::UnknownFunction: return "UnknownFunction";
    case Errc::IllegalVariable: return "IllegalVariable";
    case Errc::DuplicateParam: return "DuplicateParam";
    case Errc::MissingDefault: return "MissingDefault";
    case Errc::UnboundVariable: return "UnboundVariable";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::MissingCell: return "MissingCell";
    case Errc::NoSuccessfulRuns: return "NoSuccessfulRuns";
    case Errc::DegenerateTraining: return "DegenerateTraining";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::ZeroVariance: return "ZeroVariance";
    case Errc::MissingData: return "MissingData";
    case Errc::ChecksumMismatch: return "ChecksumMismatch";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::KindMismatch: return "KindMismatch";
    case Errc::MissingFile: return "MissingFile";
    case Errc::NotEnoughEntries: return "NotEnoughEntries";
    case Errc::TransportError: return "TransportError";
    case Errc::AuthError: return "AuthError";
    case Errc::RateLimited: return "RateLimited";
    case Errc::GeneratorExhausted: return "GeneratorExhausted";
    case Errc::UnknownId: return "UnknownId";
    case Errc::EmptyCandidates: return "EmptyCandidates";
    case Errc::CorruptRecord: return "CorruptRecord";
    case Errc::NoEvaluations: return "NoEvaluations";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::IoError: return "IoError";
  }
  return "UnknownError";
}

}  // namespace hypsearch
