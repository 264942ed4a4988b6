#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <sstream>
#include <vector>

#include "dfsim/state.hpp"
#include "dfsim/types.hpp"

namespace dfsim {

// One logical qubit = an ordered pair of physical qubits.
// Logical |0> = |01>, logical |1> = |10> on (first, second).
struct LogicalQubit {
  QubitId first;
  QubitId second;
};

struct LogicalAmplitudes {
  cx alpha{1.0, 0.0};  // coefficient of logical |0> = |01>
  cx beta{0.0, 0.0};   // coefficient of logical |1> = |10>
};

inline void require_normalized(const LogicalAmplitudes& a) {
  const double n2 = std::norm(a.alpha) + std::norm(a.beta);
  if (std::abs(n2 - 1.0) > 1e-9) {
    std::ostringstream os;
    os << "logical amplitudes have norm^2 = " << n2;
    throw InvalidArgumentError(os.str());
  }
}

// Two-qubit state alpha|01> + beta|10>.
inline PureState encode_logical(const LogicalAmplitudes& a) {
  require_normalized(a);
  return PureState::unchecked({cx{0, 0}, a.alpha, a.beta, cx{0, 0}}, 2);
}

// Reads (alpha, beta) back off a pair. The pair must be unentangled with the
// rest of the register (else EntangledDiscardError) and must carry no |00> or
// |11> population (else LeakageError). When the pair is extracted from a
// larger register the returned amplitudes carry an arbitrary global phase.
inline LogicalAmplitudes decode_logical(const PureState& s, const LogicalQubit& pair) {
  if (pair.first == pair.second)
    throw InvalidArgumentError("logical pair uses the same qubit twice");
  const QubitId lo = std::min(pair.first, pair.second);
  const QubitId hi = std::max(pair.first, pair.second);
  const std::vector<QubitId> keep{lo, hi};
  PureState two = factor_out(s, keep);
  cx a01 = two.amplitude(1);
  cx a10 = two.amplitude(2);
  if (pair.first > pair.second) std::swap(a01, a10);
  const double leak = std::norm(two.amplitude(0)) + std::norm(two.amplitude(3));
  if (leak > tol::kContract) {
    std::ostringstream os;
    os << "pair (" << pair.first << "," << pair.second
       << ") carries population outside the logical subspace";
    throw LeakageError(os.str(), leak);
  }
  const double n2 = std::norm(a01) + std::norm(a10);
  const double inv = 1.0 / std::sqrt(n2);
  return LogicalAmplitudes{a01 * inv, a10 * inv};
}

// Total probability weight of the subspace where every listed pair is
// antiparallel (one 0, one 1). Pairs must be disjoint; unlisted qubits are
// unconstrained.
inline double dfs_weight(const PureState& s, std::span<const LogicalQubit> pairs) {
  if (pairs.empty()) throw InvalidArgumentError("dfs_weight: no pairs given");
  std::vector<QubitId> used;
  for (const LogicalQubit& p : pairs) {
    require_qubit(s, p.first);
    require_qubit(s, p.second);
    used.push_back(p.first);
    used.push_back(p.second);
  }
  std::sort(used.begin(), used.end());
  if (std::adjacent_find(used.begin(), used.end()) != used.end())
    throw InvalidArgumentError("dfs_weight: pairs overlap");
  const std::size_t n = s.num_qubits();
  double w = 0.0;
  const std::vector<cx>& a = s.amplitudes();
  for (std::size_t i = 0; i < a.size(); ++i) {
    bool ok = true;
    for (const LogicalQubit& p : pairs) {
      const int b1 = static_cast<int>((i >> (n - 1 - p.first)) & 1u);
      const int b2 = static_cast<int>((i >> (n - 1 - p.second)) & 1u);
      if (b1 == b2) { ok = false; break; }
    }
    if (ok) w += std::norm(a[i]);
  }
  return w;
}

enum class BellKind { psi_plus, psi_minus, phi_plus, phi_minus };

// Four-qubit logical Bell states on pairs (0,1) and (2,3):
//   psi_pm = (|0_L 1_L> pm |1_L 0_L>)/sqrt2 = (|0110> pm |1001>)/sqrt2
//   phi_pm = (|0_L 0_L> pm |1_L 1_L>)/sqrt2 = (|0101> pm |1010>)/sqrt2
inline PureState logical_bell(BellKind kind) {
  const double s = 1.0 / std::numbers::sqrt2;
  std::vector<cx> a(16, cx{0, 0});
  switch (kind) {
    case BellKind::psi_plus:  a[0b0110] = s; a[0b1001] = s;  break;
    case BellKind::psi_minus: a[0b0110] = s; a[0b1001] = -s; break;
    case BellKind::phi_plus:  a[0b0101] = s; a[0b1010] = s;  break;
    case BellKind::phi_minus: a[0b0101] = s; a[0b1010] = -s; break;
  }
  return PureState::unchecked(std::move(a), 4);
}

}  // namespace dfsim
