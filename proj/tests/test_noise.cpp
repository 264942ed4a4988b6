#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "dfsim/gates.hpp"
#include "dfsim/logical.hpp"
#include "dfsim/noise.hpp"
#include "dfsim/state.hpp"

using namespace dfsim;

namespace {
const double kR = 1.0 / std::numbers::sqrt2;
}

TEST(Noise, CollectiveDephasingIsExactlyTrivialOnEncodedStates) {
  const PureState s = encode_logical(LogicalAmplitudes{cx{0.6, 0}, cx{0, 0.8}});
  for (double phi : {0.1, 1.7, 3.9, 6.1}) {
    const PureState t = apply_collective_dephasing(s, phi);
    // Bit-for-bit identical, not merely close.
    EXPECT_EQ(t.amplitude(0b01), s.amplitude(0b01));
    EXPECT_EQ(t.amplitude(0b10), s.amplitude(0b10));
  }
}

TEST(Noise, CollectiveDephasingPhasesUnbalancedStrings) {
  // |00> picks up e^{i phi} under exp(i phi sum(sigma_z)/2) on two qubits.
  const PureState s = new_basis_state(2, "00");
  const double phi = 0.83;
  const PureState t = apply_collective_dephasing(s, phi);
  EXPECT_NEAR(std::arg(t.amplitude(0b00)), phi, 1e-12);
  const PureState u = apply_collective_dephasing(new_basis_state(2, "11"), phi);
  EXPECT_NEAR(std::arg(u.amplitude(0b11)), -phi, 1e-12);
}

TEST(Noise, CollectiveDephasingOnSubsetOnly) {
  // Restricting the kick to a balanced subset leaves the state alone even if
  // the rest of the register is unbalanced.
  const PureState s = tensor(encode_logical(LogicalAmplitudes{cx{kR, 0}, cx{kR, 0}}),
                             new_basis_state(1, "1"));
  const std::vector<QubitId> subset{0, 1};
  const PureState t = apply_collective_dephasing(s, 2.3, subset);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(t.amplitude(i), s.amplitude(i));
}

TEST(Noise, UniformDephasingBareQubitMeanFidelity) {
  // E_phi |cos(phi/2)| = 2/pi for a bare equal superposition.
  const PureState bare = PureState::unchecked(std::vector<cx>{cx{kR, 0}, cx{kR, 0}}, 1);
  const CollectiveDephasingSpec spec{PhaseDistribution::uniform, 0, 0};
  const DephasingBench b = fidelity_under_dephasing(bare, spec, 10000, 99);
  EXPECT_EQ(b.samples, 10000u);
  EXPECT_GT(b.std_error, 0.0);
  EXPECT_NEAR(b.mean_fidelity, 2.0 / std::numbers::pi, 0.02);
  EXPECT_LT(std::abs(b.mean_fidelity - 2.0 / std::numbers::pi), 4.0 * b.std_error);
}

TEST(Noise, EncodedStateKeepsUnitFidelityUnderAnyDephasing) {
  const PureState enc = encode_logical(LogicalAmplitudes{cx{kR, 0}, cx{kR, 0}});
  const CollectiveDephasingSpec spec{PhaseDistribution::uniform, 0, 0};
  const DephasingBench b = fidelity_under_dephasing(enc, spec, 500, 7);
  // The state is bit-exactly invariant; the overlap still picks up a few ulp
  // from the input's own normalization, so the bound is rounding-level.
  EXPECT_NEAR(b.mean_fidelity, 1.0, 1e-14);
  EXPECT_LT(b.std_error, 1e-8);
}

TEST(Noise, FixedAndGaussianDistributions) {
  const PureState bare = PureState::unchecked(std::vector<cx>{cx{kR, 0}, cx{kR, 0}}, 1);
  const CollectiveDephasingSpec fixed{PhaseDistribution::fixed, std::numbers::pi, 0};
  const DephasingBench bf = fidelity_under_dephasing(bare, fixed, 100, 1);
  EXPECT_NEAR(bf.mean_fidelity, 0.0, 1e-12);

  const CollectiveDephasingSpec gauss{PhaseDistribution::gaussian, 0.0, 0.1};
  const DephasingBench bg = fidelity_under_dephasing(bare, gauss, 2000, 1);
  EXPECT_GT(bg.mean_fidelity, 0.9);  // narrow kick barely moves it
  EXPECT_LE(bg.mean_fidelity, 1.0 + 1e-12);
}

TEST(Noise, SameSeedSameBench) {
  const PureState bare = PureState::unchecked(std::vector<cx>{cx{kR, 0}, cx{kR, 0}}, 1);
  const CollectiveDephasingSpec spec{PhaseDistribution::uniform, 0, 0};
  const DephasingBench a = fidelity_under_dephasing(bare, spec, 500, 5);
  const DephasingBench b = fidelity_under_dephasing(bare, spec, 500, 5);
  EXPECT_EQ(a.mean_fidelity, b.mean_fidelity);
  EXPECT_EQ(a.std_error, b.std_error);
}

TEST(Noise, ErrorTaxonomy) {
  // Two-sided Pauli products keep the pair inside the code space; anything
  // with a lone x or y factor pushes it out.
  EXPECT_EQ(error_class(ErrorKind::xx), ErrorClass::logic);
  EXPECT_EQ(error_class(ErrorKind::yy), ErrorClass::logic);
  EXPECT_EQ(error_class(ErrorKind::zz), ErrorClass::logic);
  for (ErrorKind k : {ErrorKind::x_first, ErrorKind::x_second, ErrorKind::y_first,
                      ErrorKind::y_second, ErrorKind::xz, ErrorKind::zx,
                      ErrorKind::yz, ErrorKind::zy})
    EXPECT_EQ(error_class(k), ErrorClass::leakage) << error_kind_name(k);
}

TEST(Noise, ErrorKindNamesRoundTrip) {
  for (ErrorKind k : {ErrorKind::x_first, ErrorKind::x_second, ErrorKind::y_first,
                      ErrorKind::y_second, ErrorKind::xx, ErrorKind::yy,
                      ErrorKind::zz, ErrorKind::xz, ErrorKind::zx, ErrorKind::yz,
                      ErrorKind::zy}) {
    const auto parsed = parse_error_kind(error_kind_name(k));
    ASSERT_TRUE(parsed.has_value());
    EXPECT_EQ(*parsed, k);
  }
  EXPECT_FALSE(parse_error_kind("w-first").has_value());
}

TEST(Noise, LogicErrorsActAsLogicalOperators) {
  // xx maps |0_L> to |1_L>: a logical bit flip, no leakage.
  const PureState zero = encode_logical(LogicalAmplitudes{cx{1, 0}, cx{0, 0}});
  const PureState flipped = apply_error_operator(zero, LogicalQubit{0, 1}, ErrorKind::xx);
  EXPECT_NEAR(std::abs(flipped.amplitude(0b10)), 1.0, 1e-12);
  // zz acts as a phase on the code space, weight stays 1.
  const PureState phased = apply_error_operator(zero, LogicalQubit{0, 1}, ErrorKind::zz);
  const LogicalQubit pair{0, 1};
  EXPECT_NEAR(dfs_weight(phased, {&pair, 1}), 1.0, 1e-15);
}

TEST(Noise, LeakageBenchMatchesErrorProbability) {
  // A bit flip on one carrier zeroes the protected weight, so the mean weight
  // is 1 - p up to sampling error.
  const LeakageBench b = dfs_weight_under_error(
      LogicalAmplitudes{cx{kR, 0}, cx{kR, 0}},
      ErrorOperatorSpec{ErrorKind::x_first, 0.1}, 10000, 31);
  EXPECT_NEAR(b.mean_dfs_weight, 0.9, 0.02);
  EXPECT_LT(std::abs(b.mean_dfs_weight - 0.9), 4.0 * b.std_error);
}

TEST(Noise, LeakageBenchLogicErrorKeepsFullWeight) {
  const LeakageBench b = dfs_weight_under_error(
      LogicalAmplitudes{cx{kR, 0}, cx{kR, 0}},
      ErrorOperatorSpec{ErrorKind::zz, 0.5}, 300, 8);
  EXPECT_EQ(b.mean_dfs_weight, 1.0);
}
