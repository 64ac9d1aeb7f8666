#pragma once

#include <stdexcept>
#include <string>

namespace playerkern {

// Malformed or inconsistent input data (CSV rows, lineups, odds, model files).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Cholesky failure, non-convergence, or a zero-probability outcome.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace playerkern
