// Acceptance suite: one test per top-level guarantee, each printing a single
// PASS/FAIL line so the run reads as a checklist. Tolerances are pinned here.

#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "dfsim/cli.hpp"
#include "dfsim/dfsim.hpp"

namespace {

using namespace dfsim;

constexpr double kTight = 1e-10;  // algebraic identities, channel agreement
constexpr double kStat = 0.02;    // Monte-Carlo means

void announce(int n, const char* name, bool ok) {
  std::printf("[ACCEPTANCE %d] %-34s %s\n", n, name, ok ? "PASS" : "FAIL");
  std::fflush(stdout);
}

double overlap(const std::vector<cx>& a, const std::vector<cx>& b) {
  cx ov{0, 0};
  for (std::size_t i = 0; i < a.size(); ++i) ov += std::conj(a[i]) * b[i];
  return std::abs(ov);
}

// The two-logical-qubit channel is rebuilt from 36 tomography inputs times
// 16384 branches, which dominates the suite's runtime; criteria 4 and 7 share
// one computation.
const ChoiMatrix& engine_cphase_choi() {
  static const ChoiMatrix c =
      protocol_channel(ProtocolDescriptor{"cphase", 0.0, {0.8, 1.9}, false});
  return c;
}

// Random register of k encoded qubits on pairs (0,1),(2,3),(4,5): every basis
// word is a product of one-hole pair patterns, so each word is balanced.
PureState random_encoded_register(std::size_t k, std::mt19937_64& rng) {
  const std::size_t n = 2 * k;
  const std::size_t words = std::size_t{1} << k;
  std::vector<cx> coef(words);
  double norm2 = 0.0;
  for (cx& c : coef) {
    const LogicalAmplitudes g = random_amplitudes(rng);
    c = g.alpha;  // two fresh gaussians, already finite
    norm2 += std::norm(c);
  }
  const double inv = 1.0 / std::sqrt(norm2);
  std::vector<cx> amps(std::size_t{1} << n, cx{0, 0});
  for (std::size_t w = 0; w < words; ++w) {
    std::size_t idx = 0;
    for (std::size_t p = 0; p < k; ++p) {
      const std::size_t bit = (w >> (k - 1 - p)) & 1u;
      idx |= bit << (n - 1 - 2 * p);          // pair.first
      idx |= (1u - bit) << (n - 1 - (2 * p + 1));  // pair.second
    }
    amps[idx] = coef[w] * inv;
  }
  return PureState::unchecked(std::move(amps), n);
}

}  // namespace

TEST(Acceptance, C1_StateContracts) {
  bool ok = true;
  std::ostringstream detail;
  std::uint64_t salt = 0;
  for (ContractId id : all_contracts()) {
    const ContractCheck c = check_contract_random(id, 20, 0xAC5E0000ull + salt++);
    if (!c.pass) {
      ok = false;
      detail << c.contract << " min_fidelity=" << c.min_fidelity << "\n";
    }
  }
  announce(1, "checkpoint state contracts", ok);
  EXPECT_TRUE(ok) << detail.str();
}

TEST(Acceptance, C2_CorrectionTableClosure) {
  bool ok = true;
  std::ostringstream detail;
  for (const TableCellCheck& cell : check_correction_table(100, 0xAC5E0002ull)) {
    if (cell.pass) continue;
    ok = false;
    const auto [ac, at] =
        cr_correction_phases(cell.parity_control, cell.parity_target, {0.7, 2.1});
    detail << "cell (P1=" << cell.parity_control << ", P2=" << cell.parity_target
           << ", dressed=" << cell.dressed << ") min_fidelity=" << cell.min_fidelity
           << "; correction phases at (0.7, 2.1): control=" << ac
           << " target=" << at << "\n";
  }
  announce(2, "correction-table closure", ok);
  EXPECT_TRUE(ok) << detail.str();
}

TEST(Acceptance, C3_BranchDeterminism) {
  bool ok = true;
  std::ostringstream detail;
  std::mt19937_64 rng(0xAC5E0003ull);
  for (const char* name : {"rz", "hadamard", "cphase"}) {
    for (int trial = 0; trial < 20; ++trial) {
      ProtocolDescriptor d{name, 2.0 * std::numbers::pi * uniform01(rng),
                           random_phases(rng), false};
      ProtocolInput in{random_amplitudes(rng), random_amplitudes(rng)};
      const BranchTree tree = enumerate_branches(d, protocol_initial_state(d, in));
      if (std::abs(tree.probability_sum() - 1.0) > kTight) {
        ok = false;
        detail << name << " trial " << trial
               << " probability_sum=" << tree.probability_sum() << "\n";
      }
      const std::vector<cx> ideal = ideal_output_amplitudes(d, in);
      for (const Branch& b : tree.branches) {
        const double f = overlap(ideal,
                                 extract_output_amplitudes(b.state, b.output_pairs));
        if (f < 1.0 - kTight) {
          ok = false;
          detail << name << " trial " << trial << " branch " << b.record.key()
                 << " fidelity=" << f << "\n";
        }
      }
    }
  }
  announce(3, "per-branch gate determinism", ok);
  EXPECT_TRUE(ok) << detail.str();
}

TEST(Acceptance, C4_ChannelMatchesIdealGate) {
  bool ok = true;
  std::ostringstream detail;
  auto check = [&](const char* label, const ChoiMatrix& got, const ChoiMatrix& want) {
    const double f = choi_fidelity(got, want);
    const double tp = trace_preservation_deviation(got);
    const double eig = min_choi_eigenvalue(got);
    if (f < 1.0 - kTight || tp > kTight || eig < -kTight) {
      ok = false;
      detail << label << " fidelity=" << f << " tp_dev=" << tp
             << " min_eig=" << eig << "\n";
    }
  };
  std::mt19937_64 rng(0xAC5E0004ull);
  for (int i = 0; i < 5; ++i) {
    ProtocolDescriptor d{"rz", 2.0 * std::numbers::pi * uniform01(rng), {}, false};
    check("rz", protocol_channel(d), ideal_channel_choi(d));
  }
  const ProtocolDescriptor h{"hadamard", 0.0, {0.8, 1.9}, false};
  check("hadamard", protocol_channel(h), ideal_channel_choi(h));
  const ProtocolDescriptor cz{"cphase", 0.0, {0.8, 1.9}, false};
  check("cphase", engine_cphase_choi(), ideal_channel_choi(cz));
  announce(4, "channel equals ideal gate", ok);
  EXPECT_TRUE(ok) << detail.str();
}

TEST(Acceptance, C5_DephasingImmunity) {
  bool ok = true;
  std::ostringstream detail;
  std::mt19937_64 rng(0xAC5E0005ull);
  for (int i = 0; i < 50; ++i) {
    const std::size_t k = 1 + static_cast<std::size_t>(i % 3);
    const PureState s = random_encoded_register(k, rng);
    const double phi = 2.0 * std::numbers::pi * uniform01(rng);
    const PureState kicked = apply_collective_dephasing(s, phi);
    for (std::size_t idx = 0; idx < (std::size_t{1} << s.num_qubits()); ++idx) {
      if (kicked.amplitude(idx) != s.amplitude(idx)) {
        ok = false;
        detail << "k=" << k << " phi=" << phi << " amplitude " << idx
               << " moved\n";
        break;
      }
    }
  }
  const double r = 1.0 / std::numbers::sqrt2;
  const PureState bare = PureState::unchecked({cx{r, 0}, cx{r, 0}}, 1);
  const DephasingBench bench = fidelity_under_dephasing(
      bare, CollectiveDephasingSpec{PhaseDistribution::uniform, 0.0, 0.0}, 10000,
      0xAC5E0035ull);
  const double expect_mean = 2.0 / std::numbers::pi;
  if (std::abs(bench.mean_fidelity - expect_mean) > kStat) {
    ok = false;
    detail << "bare mean_fidelity=" << bench.mean_fidelity << " want "
           << expect_mean << " +/- " << kStat << "\n";
  }
  announce(5, "encoded-subspace immunity", ok);
  EXPECT_TRUE(ok) << detail.str();
}

TEST(Acceptance, C6_ErrorTaxonomy) {
  bool ok = true;
  std::ostringstream detail;
  const auto expect_class = [&](ErrorKind kind, ErrorClass want) {
    const ErrorClass got = error_class(kind);
    if (got != want) {
      ok = false;
      detail << error_kind_name(kind) << " classified " << error_class_name(got)
             << " want " << error_class_name(want) << "\n";
    }
  };
  for (ErrorKind kind : {ErrorKind::xx, ErrorKind::yy, ErrorKind::zz})
    expect_class(kind, ErrorClass::logic);
  for (ErrorKind kind : {ErrorKind::x_first, ErrorKind::x_second,
                         ErrorKind::y_first, ErrorKind::y_second, ErrorKind::xz,
                         ErrorKind::zx, ErrorKind::yz, ErrorKind::zy})
    expect_class(kind, ErrorClass::leakage);
  announce(6, "error taxonomy", ok);
  EXPECT_TRUE(ok) << detail.str();
}

TEST(Acceptance, C7_CrossRouteAgreement) {
  bool ok = true;
  std::ostringstream detail;
  auto check = [&](const char* label, const ChoiMatrix& eng, const ChoiMatrix& orc) {
    const double f = choi_fidelity(eng, orc);
    if (f < 1.0 - kTight) {
      ok = false;
      detail << label << " engine-vs-oracle fidelity=" << f << "\n";
    }
  };
  const ProtocolDescriptor rz{"rz", 1.234, {}, false};
  check("rz", protocol_channel(rz), oracle_channel(rz));
  const ProtocolDescriptor h{"hadamard", 0.0, {0.8, 1.9}, false};
  check("hadamard", protocol_channel(h), oracle_channel(h));
  const ProtocolDescriptor cz{"cphase", 0.0, {0.8, 1.9}, false};
  check("cphase", engine_cphase_choi(), oracle_channel(cz));
  announce(7, "cross-route channel agreement", ok);
  EXPECT_TRUE(ok) << detail.str();
}

TEST(Acceptance, C8_Reproducibility) {
  bool ok = true;
  std::ostringstream detail;

  const std::vector<const char*> argv{"dfsim", "run", "--protocol", "hadamard",
                                      "--alpha", "0.6,0", "--beta", "0,0.8",
                                      "--phases", "0.4,1.7", "--seed", "7"};
  std::string first, second;
  for (std::string* text : {&first, &second}) {
    std::ostringstream out, err;
    const int rc = cli::run_main(static_cast<int>(argv.size()), argv.data(), out,
                                 err);
    if (rc != 0) {
      ok = false;
      detail << "run exited " << rc << ": " << err.str() << "\n";
    }
    *text = out.str();
  }
  if (first != second || first.empty()) {
    ok = false;
    detail << "reports differ between identical invocations\n";
  }

  const ProtocolDescriptor d{"hadamard", 0.0, {0.4, 1.7}, false};
  const ProtocolInput in{{cx{0.6, 0}, cx{0, 0.8}}, {}};
  std::map<std::string, double> expected;
  for (const Branch& b : enumerate_branches(d, protocol_initial_state(d, in)).branches)
    expected[b.record.key()] = b.probability;
  const std::size_t samples = 100000;
  std::map<std::string, std::size_t> counts;
  for (std::size_t s = 0; s < samples; ++s)
    ++counts[run_protocol_sampled(d, in, s).record.key()];
  for (const auto& [key, p] : expected) {
    const double freq =
        static_cast<double>(counts[key]) / static_cast<double>(samples);
    const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
    if (std::abs(freq - p) > 3.0 * sigma) {
      ok = false;
      detail << "branch " << key << " freq=" << freq << " want " << p
             << " +/- " << 3.0 * sigma << "\n";
    }
  }
  for (const auto& [key, n] : counts) {
    if (!expected.count(key)) {
      ok = false;
      detail << "sampled unknown branch " << key << "\n";
    }
  }
  announce(8, "seeded reproducibility", ok);
  EXPECT_TRUE(ok) << detail.str();
}
