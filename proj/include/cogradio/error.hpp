#pragma once

#include <stdexcept>
#include <string>

namespace cogradio {

/// A parameter is outside the range where the model is defined.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Non-finite or otherwise unusable numeric input.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A caller broke a precondition that the types cannot express.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace cogradio
