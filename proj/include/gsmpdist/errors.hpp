#pragma once

#include <stdexcept>
#include <string>

namespace gsmpdist {

// Domain errors. Anything deriving Error maps to CLI exit code 2;
// model/input validation failures are reported as data (ValidationReport)
// and map to exit code 1.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A generalized state whose first-expiring clock is not unique (tie within
// the tie tolerance), or whose clock keys do not match the state's events.
struct UniquenessViolation : Error {
  using Error::Error;
};

// advance() asked to move past the first scheduled expiry.
struct AdvanceBeyondExpiry : Error {
  using Error::Error;
};

// Resampling could not produce a valid successor within the retry budget.
struct DegenerateModel : Error {
  using Error::Error;
};

// More events than the Zeno guard allows within one sampled trace.
struct ZenoGuardExceeded : Error {
  using Error::Error;
};

// Trace evaluation outside [0, horizon).
struct OutOfHorizon : Error {
  using Error::Error;
};

// A discrete distribution whose weights are negative or do not sum to one.
struct BadDistribution : Error {
  using Error::Error;
};

// Dual witness violating its Lipschitz/box constraints.
struct InfeasibleWitness : Error {
  using Error::Error;
};

// Recursive estimation exceeded the configured work limit.
struct WorkLimitExceeded : Error {
  using Error::Error;
};

// Candidate metric fails lattice membership (prop-differing pair not at 1).
struct NotInLattice : Error {
  using Error::Error;
};

// Malformed input file (JSON/JSONL/expression); message carries line/column.
struct ParseError : Error {
  using Error::Error;
};

// An expression queries a time beyond the configured trace horizon.
struct HorizonTooShort : Error {
  using Error::Error;
};

}  // namespace gsmpdist
