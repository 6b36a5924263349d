#pragma once

#include <stdexcept>
#include <string>

namespace acldp {

// Invalid parameters or inputs; the CLI maps this to exit code 2.
class ConfigError : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

// A computation that ran but could not produce a trustworthy result
// (blow-up, non-convergence, failed self-consistency). Exit code 1.
class NumericalError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace acldp
