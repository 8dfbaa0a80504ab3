#pragma once

#include <stdexcept>
#include <string>

namespace cardio {

// Error taxonomy shared by the whole library. The CLI maps these onto its
// exit-code discipline: ConfigError -> 2, Parse/Schema/ValueError -> 3,
// FitError -> 4.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValueError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace cardio
