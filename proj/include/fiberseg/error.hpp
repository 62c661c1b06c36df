#pragma once

#include <stdexcept>
#include <string>

namespace fiberseg {

// Base class for all pipeline errors; the CLI maps these to exit code 1.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct InvalidTensorError : Error {
  using Error::Error;
};

struct InvalidDirectionError : Error {
  using Error::Error;
};

struct OutOfBoundsError : Error {
  using Error::Error;
};

struct InvalidSpecError : Error {
  using Error::Error;
};

struct InvalidRegionError : Error {
  using Error::Error;
};

struct EmptyBundleError : Error {
  using Error::Error;
};

struct InvalidParameterError : Error {
  using Error::Error;
};

struct DegenerateTangentError : Error {
  using Error::Error;
};

struct InvalidGridError : Error {
  using Error::Error;
};

struct DegenerateFaceError : Error {
  using Error::Error;
};

struct InternalConsistencyError : Error {
  using Error::Error;
};

struct IncompatibleMasksError : Error {
  using Error::Error;
};

struct EmptyReportError : Error {
  using Error::Error;
};

struct FileError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace fiberseg
