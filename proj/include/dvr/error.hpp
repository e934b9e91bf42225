#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dvr {

/// Failure categories raised across the library. The CLI reports them by
/// name, so renaming an enumerator changes user-visible output.
enum class ErrorKind {
  NoFrames,
  CorruptFrame,
  InsufficientData,
  ShapeError,
  SequenceTooShort,
  EmptyFragmentSet,
  MissingView,
  NumericalError,
  EmptyGallery,
  MissingMatch,
  ConfigError,
  ModelFormat,
  IoError,
};

std::string_view error_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }
  std::string_view name() const noexcept { return error_name(kind_); }

 private:
  ErrorKind kind_;
};

}  // namespace dvr
