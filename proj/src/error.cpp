#include "strata/error.hpp"

namespace strata {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::DimensionMismatch: return "dimension mismatch";
    case ErrorKind::NotDirectSum: return "not a direct sum";
    case ErrorKind::PreconditionFailed: return "precondition failed";
    case ErrorKind::RankMismatch: return "rank mismatch";
    case ErrorKind::NumericallySingular: return "numerically singular";
    case ErrorKind::NoComplementDirection: return "no complement direction";
    case ErrorKind::DisconnectedComponents: return "disconnected components";
    case ErrorKind::WitnessViolation: return "witness violation";
    case ErrorKind::OutOfRange: return "out of range";
    case ErrorKind::InternalConsistency: return "internal consistency";
    case ErrorKind::Parse: return "parse error";
  }
  return "unknown";
}

}  // namespace strata
