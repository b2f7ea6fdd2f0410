#pragma once

#include <stdexcept>
#include <string>

namespace fermat {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// bad scenario data or configuration (CLI exit 2)
struct InvalidScenario : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};

// point not in a chart domain or not in an overlap
struct DomainError : Error {
  using Error::Error;
};

// integrator or solver failure (CLI exit 3)
struct NumericalFailure : Error {
  using Error::Error;
};

// endpoint conjugacy or other violated nondegeneracy hypothesis (CLI exit 4)
struct DegenerateHypothesis : Error {
  using Error::Error;
};

}  // namespace fermat
