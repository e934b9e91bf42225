#include "dvr/error.hpp"

namespace dvr {

std::string_view error_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NoFrames: return "NoFrames";
    case ErrorKind::CorruptFrame: return "CorruptFrame";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::ShapeError: return "ShapeError";
    case ErrorKind::SequenceTooShort: return "SequenceTooShort";
    case ErrorKind::EmptyFragmentSet: return "EmptyFragmentSet";
    case ErrorKind::MissingView: return "MissingView";
    case ErrorKind::NumericalError: return "NumericalError";
    case ErrorKind::EmptyGallery: return "EmptyGallery";
    case ErrorKind::MissingMatch: return "MissingMatch";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::ModelFormat: return "ModelFormat";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(error_name(kind)) + ": " + message), kind_(kind) {}

}  // namespace dvr
