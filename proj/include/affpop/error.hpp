#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace affpop {

/// Bad caller input (wrong lengths, unsupported bar counts).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A configuration that fails validation. Carries every violation found.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> violations)
      : std::runtime_error(join(violations)), violations_(std::move(violations)) {}
  explicit ConfigError(const std::string& what) : ConfigError(std::vector<std::string>{what}) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out = "invalid configuration";
    for (const auto& s : v) out += "\n  - " + s;
    return out;
  }
  std::vector<std::string> violations_;
};

/// Malformed SMF input; offset is the byte position where decoding failed.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, const std::string& what)
      : std::runtime_error("offset " + std::to_string(offset) + ": " + what), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Event stream that cannot be encoded (unsorted, overlapping, out of range).
class SerializationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad rows in a ratings table, or an analysis that cannot be fitted.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file or directory that cannot be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace affpop
