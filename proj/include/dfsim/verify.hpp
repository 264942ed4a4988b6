#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "dfsim/branch.hpp"
#include "dfsim/outcomes.hpp"
#include "dfsim/protocols.hpp"
#include "dfsim/state.hpp"

namespace dfsim {

// Closed-form targets for the intermediate states of the gate protocols,
// checked against trace captures of actual runs. Contract ids name the
// checkpoint role:
//   cr-entry            dressed ancilla attached, nothing measured yet
//   cr-parity-control   after the control-side parity check (aligned branch)
//   cr-rotated          after the mid-block ancilla Hadamard + phase
//   cr-parity-target    after the target-side parity check (aligned branch)
//   cr-dressed          after the dressed measurement (+ branch), ancilla gone
//   cr-corrected        after the phase corrections (block output)
//   pair-link           ancilla pair linked to pair A inside the two-pair gate
//   merge-aligned       pre-readout state, merge parity aligned
//   merge-antialigned   pre-readout state, merge parity antiparallel
enum class ContractId {
  cr_entry,
  cr_parity_control,
  cr_rotated,
  cr_parity_target,
  cr_dressed,
  cr_corrected,
  pair_link,
  merge_aligned,
  merge_antialigned,
};

inline const char* contract_name(ContractId id) {
  switch (id) {
    case ContractId::cr_entry: return "cr-entry";
    case ContractId::cr_parity_control: return "cr-parity-control";
    case ContractId::cr_rotated: return "cr-rotated";
    case ContractId::cr_parity_target: return "cr-parity-target";
    case ContractId::cr_dressed: return "cr-dressed";
    case ContractId::cr_corrected: return "cr-corrected";
    case ContractId::pair_link: return "pair-link";
    case ContractId::merge_aligned: return "merge-aligned";
    case ContractId::merge_antialigned: return "merge-antialigned";
  }
  return "?";
}

inline std::vector<ContractId> all_contracts() {
  return {ContractId::cr_entry,          ContractId::cr_parity_control,
          ContractId::cr_rotated,        ContractId::cr_parity_target,
          ContractId::cr_dressed,        ContractId::cr_corrected,
          ContractId::pair_link,         ContractId::merge_aligned,
          ContractId::merge_antialigned};
}

inline std::optional<ContractId> parse_contract(const std::string& s) {
  for (ContractId id : all_contracts())
    if (s == contract_name(id)) return id;
  return std::nullopt;
}

struct ContractParams {
  LogicalAmplitudes a{};  // (alpha, beta) of the first logical input
  LogicalAmplitudes b{cx{1, 0}, cx{0, 0}};  // (c, d) of the second
  PhaseParams phases{};
};

namespace detail {

struct Term {
  const char* bits;
  cx coef;
};

inline PureState build_normalized(std::size_t n, std::span<const Term> terms) {
  std::vector<cx> amps(std::size_t{1} << n, cx{0, 0});
  for (const Term& t : terms) {
    std::size_t idx = 0;
    for (const char* c = t.bits; *c; ++c) idx = (idx << 1) | (*c == '1');
    amps[idx] += t.coef;
  }
  double n2 = 0.0;
  for (const cx& a : amps) n2 += std::norm(a);
  const double inv = 1.0 / std::sqrt(n2);
  for (cx& a : amps) a *= inv;
  return PureState::unchecked(std::move(amps), n);
}

}  // namespace detail

// The expected (normalized) state at a contract's checkpoint, for the branch
// path the contract pins down. Registers: cr-* contracts live in the
// teleported-Hadamard layout (input pair 0-1, fresh pair 2-3, block ancilla
// 4, removed from cr-dressed on); link/merge contracts live in the two-pair
// gate layout (pair A 0-1, ancilla pair 2-3, pair B 4-5).
inline PureState contract_rhs(ContractId id, const ContractParams& p) {
  const cx al = p.a.alpha, be = p.a.beta;
  const cx c = p.b.alpha, dd = p.b.beta;
  const cx et = std::polar(1.0, p.phases.phi_t);
  const cx ep = std::polar(1.0, p.phases.phi_tp);
  using detail::Term;
  switch (id) {
    case ContractId::cr_entry: {
      const std::array<Term, 8> t{
          Term{"01010", al},      Term{"01011", al * et},
          Term{"01100", al},      Term{"01101", al * et},
          Term{"10010", be},      Term{"10011", be * et},
          Term{"10100", be},      Term{"10101", be * et}};
      return detail::build_normalized(5, t);
    }
    case ContractId::cr_parity_control: {
      const std::array<Term, 4> t{
          Term{"01010", al}, Term{"01100", al},
          Term{"10011", be * et}, Term{"10101", be * et}};
      return detail::build_normalized(5, t);
    }
    case ContractId::cr_rotated: {
      const std::array<Term, 8> t{
          Term{"01010", al},      Term{"01011", al * ep},
          Term{"01100", al},      Term{"01101", al * ep},
          Term{"10010", be * et}, Term{"10011", -be * et * ep},
          Term{"10100", be * et}, Term{"10101", -be * et * ep}};
      return detail::build_normalized(5, t);
    }
    case ContractId::cr_parity_target: {
      const std::array<Term, 4> t{
          Term{"01010", al}, Term{"01101", al * ep},
          Term{"10010", be * et}, Term{"10101", -be * et * ep}};
      return detail::build_normalized(5, t);
    }
    case ContractId::cr_dressed: {
      const std::array<Term, 4> t{
          Term{"0101", al}, Term{"0110", al * ep},
          Term{"1001", be * et}, Term{"1010", -be * et * ep}};
      return detail::build_normalized(4, t);
    }
    case ContractId::cr_corrected: {
      const std::array<Term, 4> t{
          Term{"0101", al}, Term{"0110", al},
          Term{"1001", be}, Term{"1010", -be}};
      return detail::build_normalized(4, t);
    }
    case ContractId::pair_link: {
      const std::array<Term, 4> t{
          Term{"010101", al * c}, Term{"010110", al * dd},
          Term{"101001", be * c}, Term{"101010", be * dd}};
      return detail::build_normalized(6, t);
    }
    case ContractId::merge_aligned: {
      const std::array<Term, 8> t{
          Term{"010101", al * c},  Term{"010110", al * dd},
          Term{"100101", be * c},  Term{"100110", -be * dd},
          Term{"011001", al * c},  Term{"011010", -al * dd},
          Term{"101001", be * c},  Term{"101010", be * dd}};
      return detail::build_normalized(6, t);
    }
    case ContractId::merge_antialigned: {
      const std::array<Term, 8> t{
          Term{"010101", al * c},  Term{"010110", al * dd},
          Term{"100101", -be * c}, Term{"100110", be * dd},
          Term{"011001", -al * c}, Term{"011010", al * dd},
          Term{"101001", be * c},  Term{"101010", be * dd}};
      return detail::build_normalized(6, t);
    }
  }
  throw InvalidArgumentError("unknown contract id");
}

// The post-readout line of the pre-readout contracts: the normalized piece of
// the merge state with the ancilla pair collapsed to |01> (low = true) or
// |10>, before any correction is applied.
inline PureState contract_readout_line(ContractId id, bool low,
                                       const ContractParams& p) {
  const cx al = p.a.alpha, be = p.a.beta;
  const cx c = p.b.alpha, dd = p.b.beta;
  using detail::Term;
  if (id == ContractId::merge_aligned) {
    if (low) {
      const std::array<Term, 4> t{
          Term{"010101", al * c}, Term{"010110", al * dd},
          Term{"100101", be * c}, Term{"100110", -be * dd}};
      return detail::build_normalized(6, t);
    }
    const std::array<Term, 4> t{
        Term{"011001", al * c}, Term{"011010", -al * dd},
        Term{"101001", be * c}, Term{"101010", be * dd}};
    return detail::build_normalized(6, t);
  }
  if (id == ContractId::merge_antialigned) {
    if (low) {
      const std::array<Term, 4> t{
          Term{"010101", al * c}, Term{"010110", al * dd},
          Term{"100101", -be * c}, Term{"100110", be * dd}};
      return detail::build_normalized(6, t);
    }
    const std::array<Term, 4> t{
        Term{"011001", -al * c}, Term{"011010", al * dd},
        Term{"101001", be * c}, Term{"101010", be * dd}};
    return detail::build_normalized(6, t);
  }
  throw InvalidArgumentError("contract has no readout line");
}

struct SingleCheck {
  double fidelity = 0.0;
  std::vector<cx> expected;
  std::vector<cx> actual;
};

namespace detail {

inline SingleCheck compare_states(const PureState& expected, const PureState& actual) {
  SingleCheck r;
  r.fidelity = fidelity_up_to_global_phase(expected, actual);
  r.expected = expected.amplitudes();
  r.actual = actual.amplitudes();
  return r;
}

inline SingleCheck worse(SingleCheck a, SingleCheck b) {
  return a.fidelity <= b.fidelity ? std::move(a) : std::move(b);
}

inline const PureState& require_capture(const TraceSink& trace,
                                        std::string_view label) {
  const PureState* s = trace.last(label);
  if (!s)
    throw InvalidArgumentError("protocol run did not reach checkpoint '" +
                               std::string(label) + "'");
  return *s;
}

}  // namespace detail

// Runs the protocol that owns the contract with the outcome path the contract
// pins down, captures the checkpoint, and compares against the closed form.
// Fidelity is up-to-global-phase; 1 within 1e-10 when the implementation
// matches.
inline SingleCheck check_contract(ContractId id, const ContractParams& p) {
  const bool is_cr = id == ContractId::cr_entry ||
                     id == ContractId::cr_parity_control ||
                     id == ContractId::cr_rotated ||
                     id == ContractId::cr_parity_target ||
                     id == ContractId::cr_dressed ||
                     id == ContractId::cr_corrected;
  if (is_cr) {
    ProtocolDescriptor d{"hadamard", 0.0, p.phases, false};
    TraceSink trace;
    ProtocolOptions opts;
    opts.trace = &trace;
    // prep antiparallel, both parities aligned, dressed +, first detector.
    ScriptedOutcomes src({0, 1, 1, 0, 0});
    (void)run_protocol(d, protocol_initial_state(d, ProtocolInput{p.a, {}}), src,
                       &opts);
    std::string_view label;
    switch (id) {
      case ContractId::cr_entry: label = checkpoint::kCrEntry; break;
      case ContractId::cr_parity_control: label = checkpoint::kCrParityControl; break;
      case ContractId::cr_rotated: label = checkpoint::kCrRotated; break;
      case ContractId::cr_parity_target: label = checkpoint::kCrParityTarget; break;
      case ContractId::cr_dressed: label = checkpoint::kCrDressed; break;
      default: label = checkpoint::kCrCorrected; break;
    }
    return detail::compare_states(contract_rhs(id, p),
                                  detail::require_capture(trace, label));
  }
  ProtocolDescriptor d{"cphase", 0.0, p.phases, false};
  const ProtocolInput in{p.a, p.b};
  if (id == ContractId::pair_link) {
    SingleCheck worst{2.0, {}, {}};
    for (std::size_t link : {std::size_t{1}, std::size_t{0}}) {
      TraceSink trace;
      ProtocolOptions opts;
      opts.trace = &trace;
      ScriptedOutcomes src({0, link});
      (void)run_protocol(d, protocol_initial_state(d, in), src, &opts);
      worst = detail::worse(
          std::move(worst),
          detail::compare_states(contract_rhs(id, p),
                                 detail::require_capture(trace, checkpoint::kPairLink)));
    }
    return worst;
  }
  // merge contracts: force the merge parity, check the pre-readout state and
  // both readout lines.
  const std::size_t parity = id == ContractId::merge_aligned ? 1 : 0;
  SingleCheck worst{2.0, {}, {}};
  {
    TraceSink trace;
    ProtocolOptions opts;
    opts.trace = &trace;
    ScriptedOutcomes src({0, 1, 0, 0, 0, 0, 0, parity});
    (void)run_protocol(d, protocol_initial_state(d, in), src, &opts);
    worst = detail::worse(
        std::move(worst),
        detail::compare_states(contract_rhs(id, p),
                               detail::require_capture(trace, checkpoint::kPreReadout)));
  }
  for (std::size_t bits : {std::size_t{1}, std::size_t{2}}) {
    TraceSink trace;
    ProtocolOptions opts;
    opts.trace = &trace;
    ScriptedOutcomes src({0, 1, 0, 0, 0, 0, 0, parity, 0, 0, 0, 0, 0, bits});
    (void)run_protocol(d, protocol_initial_state(d, in), src, &opts);
    worst = detail::worse(
        std::move(worst),
        detail::compare_states(
            contract_readout_line(id, bits == 1, p),
            detail::require_capture(trace, checkpoint::kReadoutBranch)));
  }
  return worst;
}

// Haar-ish random normalized amplitude pair from four gaussians.
inline LogicalAmplitudes random_amplitudes(std::mt19937_64& rng) {
  auto gauss = [&rng]() {
    double u1 = uniform01(rng);
    while (u1 <= 0.0) u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  };
  cx a{gauss(), gauss()}, b{gauss(), gauss()};
  const double n = std::sqrt(std::norm(a) + std::norm(b));
  return LogicalAmplitudes{a / n, b / n};
}

inline PhaseParams random_phases(std::mt19937_64& rng) {
  return PhaseParams{2.0 * std::numbers::pi * uniform01(rng),
                     2.0 * std::numbers::pi * uniform01(rng)};
}

struct ContractCheck {
  std::string contract;
  std::size_t draws = 0;
  double min_fidelity = 1.0;
  bool pass = true;
  std::vector<cx> worst_expected;  // populated on failure
  std::vector<cx> worst_actual;
};

inline ContractCheck check_contract_random(ContractId id, std::size_t draws,
                                           std::uint64_t seed) {
  ContractCheck out;
  out.contract = contract_name(id);
  out.draws = draws;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < draws; ++i) {
    ContractParams p;
    p.a = random_amplitudes(rng);
    p.b = random_amplitudes(rng);
    p.phases = random_phases(rng);
    SingleCheck c = check_contract(id, p);
    if (c.fidelity < out.min_fidelity) {
      out.min_fidelity = c.fidelity;
      if (c.fidelity < 1.0 - tol::kContract) {
        out.worst_expected = std::move(c.expected);
        out.worst_actual = std::move(c.actual);
      }
    }
  }
  out.pass = out.min_fidelity >= 1.0 - tol::kContract;
  return out;
}

// Every (parity, parity, dressed) branch of the standalone controlled-phase
// block must land on the ideal diag(1,1,1,-1) output up to a branch-global
// phase, for any phase knobs and any input.
struct TableCellCheck {
  int parity_control;
  int parity_target;
  int dressed;
  std::size_t draws = 0;
  double min_fidelity = 1.0;
  bool pass = true;
};

inline std::vector<TableCellCheck> check_correction_table(std::size_t draws,
                                                          std::uint64_t seed) {
  std::vector<TableCellCheck> cells;
  for (int p1 = 0; p1 < 2; ++p1)
    for (int p2 = 0; p2 < 2; ++p2)
      for (int m = 0; m < 2; ++m) {
        TableCellCheck cell{p1, p2, m, draws, 1.0, true};
        std::mt19937_64 rng(seed ^ (static_cast<std::uint64_t>(p1 * 4 + p2 * 2 + m)
                                    << 32));
        for (std::size_t i = 0; i < draws; ++i) {
          ProtocolDescriptor d{"cr-block", 0.0, random_phases(rng), false};
          const ProtocolInput in{random_amplitudes(rng), random_amplitudes(rng)};
          ScriptedOutcomes src({static_cast<std::size_t>(p1),
                                static_cast<std::size_t>(p2),
                                static_cast<std::size_t>(m)});
          const ProtocolResult r =
              run_protocol(d, protocol_initial_state(d, in), src);
          cell.min_fidelity = std::min(cell.min_fidelity, branch_fidelity(r, d, in));
        }
        cell.pass = cell.min_fidelity >= 1.0 - tol::kContract;
        cells.push_back(cell);
      }
  return cells;
}

struct VerifyReport {
  std::vector<ContractCheck> contracts;
  std::vector<TableCellCheck> table;
  bool pass = true;
};

inline VerifyReport run_verify_suite(std::size_t draws, std::uint64_t seed) {
  VerifyReport rep;
  std::uint64_t salt = 0;
  for (ContractId id : all_contracts()) {
    rep.contracts.push_back(check_contract_random(id, draws, seed + (salt++)));
    rep.pass = rep.pass && rep.contracts.back().pass;
  }
  rep.table = check_correction_table(draws, seed ^ 0x9e3779b97f4a7c15ull);
  for (const TableCellCheck& c : rep.table) rep.pass = rep.pass && c.pass;
  return rep;
}

}  // namespace dfsim
