#pragma once

#include <stdexcept>
#include <string>

namespace mtt {

// Error taxonomy mirrored by the CLI exit codes:
//   usage/config problems -> 1, violated model assumptions -> 2,
//   numerical failures (singular systems, bad dimensions) -> 3.

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AssumptionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DistributionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SingularMatrixError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mtt
