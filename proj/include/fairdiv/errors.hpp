// Apache License, Version 2.0, refer to LICENSE.txt

#ifndef FAIRDIV_ERRORS_HPP
#define FAIRDIV_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fairdiv {

// Invalid arguments, malformed configuration or rejected input data.
// The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// A quota constraint that cannot be met by the dataset at hand, or a
// kernel block whose rank is too low to support the requested draw.
// The CLI maps this to exit code 3.
class InfeasibleError : public std::runtime_error {
 public:
  explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem failures. The CLI maps this to exit code 4.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fairdiv

#endif  // FAIRDIV_ERRORS_HPP
