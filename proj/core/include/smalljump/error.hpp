#pragma once

#include <stdexcept>
#include <string>

namespace smalljump {

//! Invalid argument or configuration. Maps to CLI exit code 2.
class ValidationError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

//! A numerical routine failed to meet its tolerance or hit an unusable regime
//! (quadrature non-convergence, division by a vanishing characteristic
//! function, ...). Maps to CLI exit code 3.
class NumericError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

} // namespace smalljump
