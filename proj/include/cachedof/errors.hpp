#pragma once

#include <stdexcept>
#include <string>

namespace cachedof {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parameter tuple violates a model invariant (e.g. N < K_R).
struct InvalidParams : Error {
  using Error::Error;
};

// Requested delivery cannot be carried out (u = 0 with uncached content).
struct InfeasibleDelivery : Error {
  using Error::Error;
};

// Fronthaul transfer required but r = 0.
struct InfeasibleFronthaul : Error {
  using Error::Error;
};

// No feasible allocation exists for the converse constraint system.
struct Infeasible : Error {
  using Error::Error;
};

// mu_T*K_T or mu_R*K_R is not an integer; combinatorial placement undefined.
struct NonIntegerRegime : Error {
  using Error::Error;
};

// mu_R = 1: every user caches the whole library.
struct DegenerateAllCached : Error {
  using Error::Error;
};

// Requested multiplicity exceeds K_T.
struct InvalidMultiplicity : Error {
  using Error::Error;
};

// Stacked target channels span the whole beam space (probability-zero for
// continuous fading unless the slot is overloaded).
struct RankDeficientChannel : Error {
  using Error::Error;
};

// Decode system numerically singular; message carries the seed.
struct SingularDecodeSystem : Error {
  using Error::Error;
};

}  // namespace cachedof
