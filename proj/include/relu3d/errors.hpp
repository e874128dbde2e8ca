#pragma once

#include <stdexcept>
#include <string>

namespace relu3d {

// Structural or dimensional violation of a network or argument contract.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A NaN or infinity appeared during evaluation.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed network or parameter document. `path()` is a JSON-pointer-like
// location such as "/layers/2/floors/0/neurons/5/w".
class FormatError : public std::runtime_error {
 public:
  FormatError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace relu3d
