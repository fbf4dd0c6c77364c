#pragma once

#include <stdexcept>
#include <string>

namespace pt {

// Invalid model construction or parameters (bad distributions, shape
// mismatches, unstable settings). CLI maps this to exit code 2.
class ModelError : public std::runtime_error {
 public:
  explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

// Data inconsistent with an otherwise valid model (impossible observation,
// particle collapse, degenerate input). CLI maps this to exit code 2.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pt
