#pragma once

#include <stdexcept>
#include <string>

namespace tmrc {

/// Coarse classification used by the CLI to pick an exit code.
enum class ErrorKind {
  Argument,
  SingularPoint,
  Instability,
  Size,
  State,
  DisconnectedCloud,
  ImprobableFailure,
  EmptyCounts,
  Numeric,
  Io,
  Config,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct ArgumentError : Error {
  explicit ArgumentError(const std::string& w) : Error(ErrorKind::Argument, w) {}
};
struct SingularPointError : Error {
  explicit SingularPointError(const std::string& w) : Error(ErrorKind::SingularPoint, w) {}
};
struct InstabilityError : Error {
  explicit InstabilityError(const std::string& w) : Error(ErrorKind::Instability, w) {}
};
struct SizeError : Error {
  explicit SizeError(const std::string& w) : Error(ErrorKind::Size, w) {}
};
struct StateError : Error {
  explicit StateError(const std::string& w) : Error(ErrorKind::State, w) {}
};
struct DisconnectedCloudError : Error {
  explicit DisconnectedCloudError(const std::string& w) : Error(ErrorKind::DisconnectedCloud, w) {}
};
struct ImprobableFailureError : Error {
  explicit ImprobableFailureError(const std::string& w) : Error(ErrorKind::ImprobableFailure, w) {}
};
struct EmptyCountsError : Error {
  explicit EmptyCountsError(const std::string& w) : Error(ErrorKind::EmptyCounts, w) {}
};
struct NumericError : Error {
  explicit NumericError(const std::string& w) : Error(ErrorKind::Numeric, w) {}
};
struct IoError : Error {
  explicit IoError(const std::string& w) : Error(ErrorKind::Io, w) {}
};
struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error(ErrorKind::Config, w) {}
};

/// Process exit code for an error kind: 2 config, 3 numeric, 4 I/O.
int exit_code_for(ErrorKind kind) noexcept;

}  // namespace tmrc
