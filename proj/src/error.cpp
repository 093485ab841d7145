#include "entcert/error.hpp"

namespace entcert {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ValueOutOfRange: return "ValueOutOfRange";
    case ErrorKind::BadKey: return "BadKey";
    case ErrorKind::BadNoiseLevel: return "BadNoiseLevel";
    case ErrorKind::MissingData: return "MissingData";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::NotNormalized: return "NotNormalized";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::SchemeMismatch: return "SchemeMismatch";
    case ErrorKind::NotEntangled: return "NotEntangled";
    case ErrorKind::NotDensity: return "NotDensity";
    case ErrorKind::BadSize: return "BadSize";
    case ErrorKind::WrongSize: return "WrongSize";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace entcert
