#pragma once

#include <stdexcept>
#include <string>

namespace hybridrd {

/// A precondition on a public operation was not met (bad index, negative
/// count, malformed grid, ...).
class ContractViolation : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A simulation could not continue (non-finite rates, ODE blow-up, an
/// internal invariant broke).
class SimulationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw ContractViolation(what);
}

}  // namespace hybridrd
