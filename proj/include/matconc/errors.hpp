#pragma once

#include <stdexcept>
#include <string>

namespace matconc {

// Iterative routine failed to converge or produced non-finite output.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Function evaluated outside its domain (e.g. log of a negative eigenvalue).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Requested computation exceeds an enumeration or size cap.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace matconc
