#pragma once

#include <stdexcept>
#include <string>

namespace policylens {

// Bad or inconsistent input data (malformed files, degenerate datasets,
// vocabulary/model mismatch). Maps to CLI exit code 3.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Misuse of a programmatic contract (dimension mismatch, invalid
// hyperparameters). Maps to CLI exit code 2.
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace policylens
