#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "dfsim/gates.hpp"
#include "dfsim/logical.hpp"
#include "dfsim/state.hpp"

using namespace dfsim;

namespace {
const double kR = 1.0 / std::numbers::sqrt2;
}

TEST(Logical, EncodeProducesAntiparallelPair) {
  const PureState s = encode_logical(LogicalAmplitudes{cx{0.6, 0.0}, cx{0.0, 0.8}});
  EXPECT_EQ(s.num_qubits(), 2u);
  EXPECT_NEAR(s.amplitude(0b01).real(), 0.6, 1e-15);
  EXPECT_NEAR(s.amplitude(0b10).imag(), 0.8, 1e-15);
  EXPECT_EQ(s.amplitude(0b00), cx(0.0, 0.0));
  EXPECT_EQ(s.amplitude(0b11), cx(0.0, 0.0));
}

TEST(Logical, EncodeRejectsUnnormalizedInput) {
  EXPECT_THROW(encode_logical(LogicalAmplitudes{cx{1.0, 0.0}, cx{1.0, 0.0}}),
               InvalidArgumentError);
}

TEST(Logical, DecodeRoundTripsUpToGlobalPhase) {
  const LogicalAmplitudes in{cx{0.6, 0.0}, cx{0.0, 0.8}};
  PureState s = encode_logical(in);
  s = apply_1q(s, 0, gates::Rz(0.0));  // no-op, keeps the register intact
  const LogicalAmplitudes out = decode_logical(s, LogicalQubit{0, 1});
  const cx ov = std::conj(out.alpha) * in.alpha + std::conj(out.beta) * in.beta;
  EXPECT_NEAR(std::abs(ov), 1.0, 1e-12);
}

TEST(Logical, DecodeDetectsLeakage) {
  // X on the first carrier pushes |01> to |11>: outside the code space.
  PureState s = encode_logical(LogicalAmplitudes{cx{1.0, 0.0}, cx{0.0, 0.0}});
  s = apply_1q(s, 0, gates::X);
  EXPECT_THROW(decode_logical(s, LogicalQubit{0, 1}), LeakageError);
}

TEST(Logical, DfsWeightCountsAntiparallelSectors) {
  const PureState clean = encode_logical(LogicalAmplitudes{cx{kR, 0}, cx{kR, 0}});
  const LogicalQubit pair{0, 1};
  EXPECT_NEAR(dfs_weight(clean, {&pair, 1}), 1.0, 1e-15);

  const PureState mixed = apply_1q(clean, 0, gates::H());
  const double w = dfs_weight(mixed, {&pair, 1});
  EXPECT_GT(w, 0.0);
  EXPECT_LT(w, 1.0);
}

TEST(Logical, DfsWeightRejectsOverlappingPairs) {
  const PureState s = new_basis_state(3, "010");
  const std::array<LogicalQubit, 2> pairs{LogicalQubit{0, 1}, LogicalQubit{1, 2}};
  EXPECT_THROW(dfs_weight(s, pairs), InvalidArgumentError);
}

TEST(Logical, BellStatesHaveExpectedAmplitudes) {
  const PureState psi_p = logical_bell(BellKind::psi_plus);
  EXPECT_EQ(psi_p.num_qubits(), 4u);
  EXPECT_NEAR(psi_p.amplitude(0b0110).real(), kR, 1e-15);
  EXPECT_NEAR(psi_p.amplitude(0b1001).real(), kR, 1e-15);

  const PureState psi_m = logical_bell(BellKind::psi_minus);
  EXPECT_NEAR(psi_m.amplitude(0b1001).real(), -kR, 1e-15);

  const PureState phi_p = logical_bell(BellKind::phi_plus);
  EXPECT_NEAR(phi_p.amplitude(0b0101).real(), kR, 1e-15);
  EXPECT_NEAR(phi_p.amplitude(0b1010).real(), kR, 1e-15);

  const PureState phi_m = logical_bell(BellKind::phi_minus);
  EXPECT_NEAR(phi_m.amplitude(0b1010).real(), -kR, 1e-15);

  // All four live entirely inside the two-pair code space.
  const std::array<LogicalQubit, 2> pairs{LogicalQubit{0, 1}, LogicalQubit{2, 3}};
  for (const PureState* s : {&psi_p, &psi_m, &phi_p, &phi_m})
    EXPECT_NEAR(dfs_weight(*s, pairs), 1.0, 1e-15);
}
