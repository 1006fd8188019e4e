#pragma once

#include <stdexcept>

namespace symdisc {

struct AngleOutOfDomain : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NonPositiveCoefficient : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct CoefficientNotNormalized : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ZeroCoefficient : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ProbabilityOutOfRange : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DimensionNotPowerOfTwo : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct MalformedNetlist : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidConfig : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct EmptyRecords : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace symdisc
