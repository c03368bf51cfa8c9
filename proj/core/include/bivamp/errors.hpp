#pragma once

#include <stdexcept>
#include <string>

namespace bivamp {

// Raised when a factorization, trace or precision leaves the finite positive
// range required by the message updates.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when an adaptive quadrature cannot reach its tolerance.
class AccuracyError : public std::runtime_error {
 public:
  explicit AccuracyError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bivamp
