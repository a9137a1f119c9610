#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ineqcert {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed potential source. position() is a 0-based byte offset into the source.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " (at offset " + std::to_string(position) + ")"), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

// Evaluation outside the domain of a partial function (log of a nonpositive number,
// polar symbols at the origin, non-finite results, negative densities).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Parameters outside their admissible range (a >= 1 for exp(aV), Phi(0) <= 0, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Inconsistent inputs such as mismatched marginals or empty audit domains.
class InputError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace ineqcert
