#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace curblabel {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite coordinates, out-of-range parameters and similar caller mistakes.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Malformed file contents. Carries the path and the byte offset of the problem.
class FormatError : public Error {
 public:
  FormatError(std::string path, std::uint64_t offset, const std::string& what)
      : Error(path + " @" + std::to_string(offset) + ": " + what), path_(std::move(path)), offset_(offset) {}

  const std::string& path() const noexcept { return path_; }
  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::string path_;
  std::uint64_t offset_;
};

/// Two inputs that must agree (cloud vs. labels, mask vs. cloud) do not.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class CalibrationError : public Error {
 public:
  using Error::Error;
};

/// Input data that parses but violates a physical invariant (e.g. a non-rotation pose).
class DataError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// A pipeline stage aborted; the message names the stage and, when known, the tile or frame.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& context, const std::string& what)
      : Error(stage + (context.empty() ? "" : " [" + context + "]") + ": " + what), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace curblabel
