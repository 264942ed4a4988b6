#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "dfsim/blocks.hpp"
#include "dfsim/logical.hpp"
#include "dfsim/state.hpp"

using namespace dfsim;

namespace {
const double kR = 1.0 / std::numbers::sqrt2;
}

TEST(Blocks, ParityCheckSeparatesSectors) {
  // (|00> + |01>)/sqrt2: half aligned, half antiparallel.
  std::vector<cx> amps{cx{kR, 0}, cx{kR, 0}, cx{0, 0}, cx{0, 0}};
  const PureState s = PureState::unchecked(std::move(amps), 2);

  ScriptedOutcomes anti({0});
  const ParityResult r0 = parity_check(s, 0, 1, anti);
  EXPECT_EQ(r0.outcome, ParityOutcome::antiparallel);
  EXPECT_NEAR(r0.probability, 0.5, 1e-15);
  EXPECT_NEAR(std::abs(r0.state.amplitude(0b01)), 1.0, 1e-15);

  ScriptedOutcomes same({1});
  const ParityResult r1 = parity_check(s, 0, 1, same);
  EXPECT_EQ(r1.outcome, ParityOutcome::aligned);
  EXPECT_NEAR(std::abs(r1.state.amplitude(0b00)), 1.0, 1e-15);
  EXPECT_FALSE(r1.misreported);
}

TEST(Blocks, ParityCheckIsNondestructiveInsideASector) {
  // A superposition within the antiparallel sector must survive unchanged.
  const PureState s = encode_logical(LogicalAmplitudes{cx{0.6, 0}, cx{0, 0.8}});
  ScriptedOutcomes src({0});
  const ParityResult r = parity_check(s, 0, 1, src);
  EXPECT_NEAR(r.probability, 1.0, 1e-15);
  EXPECT_EQ(r.state.amplitude(0b01), s.amplitude(0b01));
  EXPECT_EQ(r.state.amplitude(0b10), s.amplitude(0b10));
}

TEST(Blocks, ParityMisreportFlipsLabelNotState) {
  const PureState s = encode_logical(LogicalAmplitudes{cx{1, 0}, cx{0, 0}});
  // Site 1 is the sector draw, site 2 the misreport draw.
  ScriptedOutcomes src({0, 1});
  DetectorModel noisy{1.0};
  const ParityResult r = parity_check(s, 0, 1, src, noisy);
  EXPECT_TRUE(r.misreported);
  EXPECT_EQ(r.outcome, ParityOutcome::aligned);  // reported wrongly
  // but the state collapsed onto the true antiparallel sector
  EXPECT_NEAR(std::abs(r.state.amplitude(0b01)), 1.0, 1e-15);
}

TEST(Blocks, ParityMisreportSiteAbsentWhenClean) {
  const PureState s = encode_logical(LogicalAmplitudes{cx{1, 0}, cx{0, 0}});
  ScriptedOutcomes src({0});
  (void)parity_check(s, 0, 1, src);
  EXPECT_EQ(src.taken().size(), 1u);  // no misreport draw at p = 0
}

TEST(Blocks, DetectorDistinguishesPairBellStates) {
  // (|01> + |10>)/sqrt2 triggers D1 deterministically.
  const PureState sym = encode_logical(LogicalAmplitudes{cx{kR, 0}, cx{kR, 0}});
  ScriptedOutcomes s1({0});
  const DetectorResult r1 = detector_D(sym, LogicalQubit{0, 1}, s1);
  EXPECT_EQ(r1.label, DetectorLabel::d1);
  EXPECT_NEAR(r1.probability, 1.0, 1e-12);

  const PureState asym = encode_logical(LogicalAmplitudes{cx{kR, 0}, cx{-kR, 0}});
  ScriptedOutcomes s2({1});
  const DetectorResult r2 = detector_D(asym, LogicalQubit{0, 1}, s2);
  EXPECT_EQ(r2.label, DetectorLabel::d2);
  EXPECT_NEAR(r2.probability, 1.0, 1e-12);

  const PureState aligned = new_basis_state(2, "00");
  ScriptedOutcomes s3({2});
  const DetectorResult r3 = detector_D(aligned, LogicalQubit{0, 1}, s3);
  EXPECT_EQ(r3.label, DetectorLabel::leak);
  EXPECT_NEAR(r3.probability, 1.0, 1e-12);
}

TEST(Blocks, DressedMeasureProjectsOntoPlusMinus) {
  const PureState s = new_basis_state(1, "0");
  ScriptedOutcomes plus({0});
  const DressedResult rp = dressed_measure(s, 0, plus);
  EXPECT_EQ(rp.outcome, DressedOutcome::plus);
  EXPECT_NEAR(rp.probability, 0.5, 1e-15);
  EXPECT_NEAR(rp.state.amplitude(0).real(), rp.state.amplitude(1).real(), 1e-15);

  ScriptedOutcomes minus({1});
  const DressedResult rm = dressed_measure(s, 0, minus);
  EXPECT_EQ(rm.outcome, DressedOutcome::minus);
  EXPECT_NEAR(rm.probability, 0.5, 1e-15);
  EXPECT_NEAR(rm.state.amplitude(0).real(), -rm.state.amplitude(1).real(), 1e-15);
}

TEST(Blocks, ReadoutPairReportsBitPattern) {
  const PureState s = encode_logical(LogicalAmplitudes{cx{0.6, 0}, cx{0.8, 0}});
  ScriptedOutcomes lo({1});
  const ReadoutResult r1 = readout_pair(s, LogicalQubit{0, 1}, lo);
  EXPECT_EQ(r1.bits, 0b01);
  EXPECT_NEAR(r1.probability, 0.36, 1e-12);

  ScriptedOutcomes hi({2});
  const ReadoutResult r2 = readout_pair(s, LogicalQubit{0, 1}, hi);
  EXPECT_EQ(r2.bits, 0b10);
  EXPECT_NEAR(r2.probability, 0.64, 1e-12);
}
