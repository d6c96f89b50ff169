#pragma once

#include <stdexcept>
#include <string>

namespace shiftval {

// Bad or inconsistent input data (shape mismatch, malformed file, invalid labels).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical procedure failed (non-PD covariance, diverged training).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace shiftval
