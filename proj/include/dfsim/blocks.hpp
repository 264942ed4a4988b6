#pragma once

#include <array>
#include <numbers>
#include <vector>

#include "dfsim/logical.hpp"
#include "dfsim/outcomes.hpp"
#include "dfsim/state.hpp"

namespace dfsim {

// Optional classical fault model for parity readout: the reported parity is
// flipped with this probability (the post-measurement state still follows the
// actual projection).
struct DetectorModel {
  double misreport_probability = 0.0;
};

enum class ParityOutcome { antiparallel = 0, aligned = 1 };

struct ParityResult {
  ParityOutcome outcome;  // reported parity
  double probability;     // Born probability of the actual projection
  bool misreported = false;
  PureState state;
};

// Nondestructive two-qubit parity measurement: aligned keeps span{|00>,|11>},
// antiparallel keeps span{|01>,|10>}. Outcome index equals the parity value
// (0 = antiparallel, 1 = aligned).
inline ParityResult parity_check(const PureState& s, QubitId a, QubitId b,
                                 OutcomeSource& out,
                                 const DetectorModel& model = {}) {
  if (a == b) throw InvalidArgumentError("parity_check needs two distinct qubits");
  const std::array<std::size_t, 2> anti{1, 2};
  const std::array<std::size_t, 2> same{0, 3};
  std::vector<Projector> ps;
  ps.push_back(diagonal_projector("P=0", {a, b}, anti));
  ps.push_back(diagonal_projector("P=1", {a, b}, same));
  const std::vector<double> probs = measurement_probabilities(s, ps);
  MeasureResult m = collapse_onto(s, ps, out.choose(probs), probs);
  bool flipped = false;
  if (model.misreport_probability > 0.0) {
    const double p = model.misreport_probability;
    flipped = out.choose({1.0 - p, p}) == 1;
  }
  const std::size_t reported = flipped ? 1 - m.outcome : m.outcome;
  return ParityResult{static_cast<ParityOutcome>(reported), m.probability,
                      flipped, std::move(m.state)};
}

enum class DetectorLabel {
  d1 = 0,    // pair collapsed onto (|01> + |10>)/sqrt2
  d2 = 1,    // pair collapsed onto (|01> - |10>)/sqrt2
  leak = 2,  // pair found outside the logical subspace
};

struct DetectorResult {
  DetectorLabel label;
  double probability;
  PureState state;
};

// Three-outcome detector on a pair: the two single-pair Bell states inside
// the logical subspace, plus the leaked span{|00>,|11>} complement.
inline DetectorResult detector_D(const PureState& s, const LogicalQubit& pair,
                                 OutcomeSource& out) {
  const double r = 1.0 / std::numbers::sqrt2;
  const std::array<cx, 4> plus{cx{0, 0}, cx{r, 0}, cx{r, 0}, cx{0, 0}};
  const std::array<cx, 4> minus{cx{0, 0}, cx{r, 0}, cx{-r, 0}, cx{0, 0}};
  const std::array<std::size_t, 2> outside{0, 3};
  std::vector<Projector> ps;
  ps.push_back(rank1_projector("D1", {pair.first, pair.second}, plus));
  ps.push_back(rank1_projector("D2", {pair.first, pair.second}, minus));
  ps.push_back(diagonal_projector("leak", {pair.first, pair.second}, outside));
  const std::vector<double> probs = measurement_probabilities(s, ps);
  MeasureResult m = collapse_onto(s, ps, out.choose(probs), probs);
  return DetectorResult{static_cast<DetectorLabel>(m.outcome), m.probability,
                        std::move(m.state)};
}

enum class DressedOutcome { plus = 0, minus = 1 };

struct DressedResult {
  DressedOutcome outcome;
  double probability;
  PureState state;
};

// Single-qubit measurement in the dressed basis {|+>, |->}.
inline DressedResult dressed_measure(const PureState& s, QubitId q,
                                     OutcomeSource& out) {
  const double r = 1.0 / std::numbers::sqrt2;
  const std::array<cx, 2> plus{cx{r, 0}, cx{r, 0}};
  const std::array<cx, 2> minus{cx{r, 0}, cx{-r, 0}};
  std::vector<Projector> ps;
  ps.push_back(rank1_projector("+", {q}, plus));
  ps.push_back(rank1_projector("-", {q}, minus));
  const std::vector<double> probs = measurement_probabilities(s, ps);
  MeasureResult m = collapse_onto(s, ps, out.choose(probs), probs);
  return DressedResult{static_cast<DressedOutcome>(m.outcome), m.probability,
                       std::move(m.state)};
}

struct ReadoutResult {
  int bits;  // 0..3, first listed qubit is the high bit
  double probability;
  PureState state;
};

// Destructive-style computational readout of a pair (the state collapses to
// the measured bit pattern; the qubits stay in the register).
inline ReadoutResult readout_pair(const PureState& s, const LogicalQubit& pair,
                                  OutcomeSource& out) {
  std::vector<Projector> ps;
  for (std::size_t k = 0; k < 4; ++k) {
    const std::array<std::size_t, 1> kept{k};
    std::string label{static_cast<char>('0' + (k >> 1)),
                      static_cast<char>('0' + (k & 1))};
    ps.push_back(diagonal_projector(label, {pair.first, pair.second}, kept));
  }
  const std::vector<double> probs = measurement_probabilities(s, ps);
  MeasureResult m = collapse_onto(s, ps, out.choose(probs), probs);
  return ReadoutResult{static_cast<int>(m.outcome), m.probability,
                       std::move(m.state)};
}

}  // namespace dfsim
