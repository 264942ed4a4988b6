#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dfsim/gates.hpp"
#include "dfsim/logical.hpp"
#include "dfsim/outcomes.hpp"
#include "dfsim/state.hpp"

namespace dfsim {

// Collective dephasing U(phi) = exp(i phi/2 * sum_q sigma_z^q) over the listed
// qubits (all qubits when the list is empty). Diagonal in the computational
// basis: each basis state picks up phase phi * (n0 - n1) / 2, so balanced
// bitstrings (every logical pair antiparallel) are left bit-exactly unchanged.
inline PureState apply_collective_dephasing(const PureState& s, double phi,
                                            std::span<const QubitId> qubits = {}) {
  const std::size_t n = s.num_qubits();
  std::vector<QubitId> qs(qubits.begin(), qubits.end());
  if (qs.empty())
    for (QubitId q = 0; q < n; ++q) qs.push_back(q);
  for (QubitId q : qs) require_qubit(s, q);
  std::vector<cx> out = s.amplitudes();
  for (std::size_t i = 0; i < out.size(); ++i) {
    int imbalance = 0;  // n0 - n1 over the affected qubits
    for (QubitId q : qs)
      imbalance += ((i >> (n - 1 - q)) & 1u) ? -1 : 1;
    if (imbalance != 0)
      out[i] *= std::polar(1.0, 0.5 * phi * static_cast<double>(imbalance));
  }
  return PureState::unchecked(std::move(out), n);
}

enum class PhaseDistribution { uniform, fixed, gaussian };

struct CollectiveDephasingSpec {
  PhaseDistribution distribution = PhaseDistribution::uniform;
  double value = 0.0;  // fixed: the phase; gaussian: the mean
  double sigma = 0.0;  // gaussian only
};

inline double sample_phase(const CollectiveDephasingSpec& spec, std::mt19937_64& rng) {
  switch (spec.distribution) {
    case PhaseDistribution::uniform:
      return 2.0 * std::numbers::pi * uniform01(rng);
    case PhaseDistribution::fixed:
      return spec.value;
    case PhaseDistribution::gaussian: {
      // Box-Muller on the portable uniform, so runs are reproducible.
      double u1 = uniform01(rng);
      while (u1 <= 0.0) u1 = uniform01(rng);
      const double u2 = uniform01(rng);
      const double z = std::sqrt(-2.0 * std::log(u1)) *
                       std::cos(2.0 * std::numbers::pi * u2);
      return spec.value + spec.sigma * z;
    }
  }
  throw InvalidArgumentError("unknown phase distribution");
}

struct DephasingBench {
  double mean_fidelity;
  double std_error;
  std::size_t samples;
};

// Monte-Carlo estimate of E_phi |<psi| U(phi) |psi>| for a given input state.
// A perfectly protected state gives mean 1 with zero spread.
inline DephasingBench fidelity_under_dephasing(const PureState& s,
                                               const CollectiveDephasingSpec& spec,
                                               std::size_t samples,
                                               std::uint64_t seed) {
  if (samples == 0) throw InvalidArgumentError("need at least one sample");
  std::mt19937_64 rng(seed);
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double phi = sample_phase(spec, rng);
    const double f = fidelity_up_to_global_phase(s, apply_collective_dephasing(s, phi));
    sum += f;
    sum2 += f * f;
  }
  const double mean = sum / static_cast<double>(samples);
  const double var = std::max(0.0, sum2 / static_cast<double>(samples) - mean * mean);
  const double se = samples > 1
      ? std::sqrt(var / static_cast<double>(samples - 1))
      : 0.0;
  return DephasingBench{mean, se, samples};
}

// Single- and two-qubit Pauli errors on one logical pair. "first"/"second"
// name the pair qubit hit by a lone Pauli; two-letter kinds act on
// (first, second) in that order.
enum class ErrorKind {
  x_first, x_second, y_first, y_second,
  xx, yy, zz,
  xz, zx, yz, zy,
};

inline const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::x_first:  return "x-first";
    case ErrorKind::x_second: return "x-second";
    case ErrorKind::y_first:  return "y-first";
    case ErrorKind::y_second: return "y-second";
    case ErrorKind::xx: return "xx";
    case ErrorKind::yy: return "yy";
    case ErrorKind::zz: return "zz";
    case ErrorKind::xz: return "xz";
    case ErrorKind::zx: return "zx";
    case ErrorKind::yz: return "yz";
    case ErrorKind::zy: return "zy";
  }
  return "?";
}

inline std::optional<ErrorKind> parse_error_kind(const std::string& s) {
  for (ErrorKind k : {ErrorKind::x_first, ErrorKind::x_second, ErrorKind::y_first,
                      ErrorKind::y_second, ErrorKind::xx, ErrorKind::yy,
                      ErrorKind::zz, ErrorKind::xz, ErrorKind::zx, ErrorKind::yz,
                      ErrorKind::zy})
    if (s == error_kind_name(k)) return k;
  return std::nullopt;
}

// The two single-qubit factors (on pair.first, pair.second) of an error kind.
inline std::pair<Mat2, Mat2> error_factors(ErrorKind k) {
  using namespace gates;
  switch (k) {
    case ErrorKind::x_first:  return {X, I};
    case ErrorKind::x_second: return {I, X};
    case ErrorKind::y_first:  return {Y, I};
    case ErrorKind::y_second: return {I, Y};
    case ErrorKind::xx: return {X, X};
    case ErrorKind::yy: return {Y, Y};
    case ErrorKind::zz: return {Z, Z};
    case ErrorKind::xz: return {X, Z};
    case ErrorKind::zx: return {Z, X};
    case ErrorKind::yz: return {Y, Z};
    case ErrorKind::zy: return {Z, Y};
  }
  throw InvalidArgumentError("unknown error kind");
}

inline PureState apply_error_operator(const PureState& s, const LogicalQubit& pair,
                                      ErrorKind kind) {
  auto [m1, m2] = error_factors(kind);
  return apply_1q(apply_1q(s, pair.first, m1), pair.second, m2);
}

enum class ErrorClass {
  logic,    // maps the logical subspace to itself
  leakage,  // moves population out of span{|01>,|10>}
};

inline const char* error_class_name(ErrorClass c) {
  return c == ErrorClass::logic ? "logic" : "leakage";
}

// Classifies a kind by acting with it on the logical basis states and checking
// whether any population lands outside span{|01>,|10>}.
inline ErrorClass error_class(ErrorKind kind) {
  const LogicalQubit pair{0, 1};
  for (const cx beta : {cx{0, 0}, cx{1, 0}}) {
    const cx alpha = beta == cx{0, 0} ? cx{1, 0} : cx{0, 0};
    const PureState mapped =
        apply_error_operator(encode_logical({alpha, beta}), pair, kind);
    const double outside =
        std::norm(mapped.amplitude(0)) + std::norm(mapped.amplitude(3));
    if (outside > tol::kContract) return ErrorClass::leakage;
  }
  return ErrorClass::logic;
}

struct ErrorOperatorSpec {
  ErrorKind kind = ErrorKind::x_first;
  double probability = 0.0;  // chance the operator hits at all
};

struct LeakageBench {
  double mean_dfs_weight;
  double std_error;
  std::size_t samples;
};

// Monte-Carlo estimate of the surviving logical-subspace weight when the error
// hits an encoded pair with the given probability.
inline LeakageBench dfs_weight_under_error(const LogicalAmplitudes& amps,
                                           const ErrorOperatorSpec& spec,
                                           std::size_t samples,
                                           std::uint64_t seed) {
  if (samples == 0) throw InvalidArgumentError("need at least one sample");
  if (spec.probability < 0.0 || spec.probability > 1.0)
    throw InvalidArgumentError("error probability must lie in [0, 1]");
  std::mt19937_64 rng(seed);
  const PureState clean = encode_logical(amps);
  const LogicalQubit pair{0, 1};
  const double hit_weight =
      dfs_weight(apply_error_operator(clean, pair, spec.kind), {&pair, 1});
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const bool hit = uniform01(rng) < spec.probability;
    const double w = hit ? hit_weight : 1.0;
    sum += w;
    sum2 += w * w;
  }
  const double mean = sum / static_cast<double>(samples);
  const double var = std::max(0.0, sum2 / static_cast<double>(samples) - mean * mean);
  const double se = samples > 1
      ? std::sqrt(var / static_cast<double>(samples - 1))
      : 0.0;
  return LeakageBench{mean, se, samples};
}

}  // namespace dfsim
