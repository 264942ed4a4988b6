#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace dfsim {

using cx = std::complex<double>;

// Qubit position inside a register. MSB-first: qubit 0 owns the highest bit of
// a basis index, so |q0 q1 ... q_{n-1}> has index q0*2^{n-1} + ... + q_{n-1}.
using QubitId = std::size_t;

namespace tol {
// Norms and unitarity.
inline constexpr double kNorm = 1e-12;
// Probability sums, channel contracts, fidelity gates.
inline constexpr double kContract = 1e-10;
// Branches below this probability are treated as impossible.
inline constexpr double kBranchCutoff = 1e-12;
}  // namespace tol

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Bad sizes, ranges, non-unitary matrices, malformed configs.
struct InvalidArgumentError : Error {
  using Error::Error;
};

// A forced measurement outcome whose Born probability is below cutoff.
struct ZeroProbabilityBranchError : Error {
  using Error::Error;
};

// discard/factor requested across an entangled cut.
struct EntangledDiscardError : Error {
  EntangledDiscardError(const std::string& what, double residual_)
      : Error(what), residual(residual_) {}
  double residual;
};

// Population escaped the logical subspace where the protocol forbids it.
struct LeakageError : Error {
  LeakageError(const std::string& what, double weight)
      : Error(what), leaked_weight(weight) {}
  double leaked_weight;
};

// A protocol entry contract was violated (ancilla not fresh, input not in the
// required product form, ...).
struct PreconditionError : Error {
  using Error::Error;
};

// Branch enumeration exceeded its configured limit.
struct BranchLimitError : Error {
  using Error::Error;
};

}  // namespace dfsim
