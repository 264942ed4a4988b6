#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dfsim/blocks.hpp"
#include "dfsim/gates.hpp"
#include "dfsim/logical.hpp"
#include "dfsim/outcomes.hpp"
#include "dfsim/state.hpp"

namespace dfsim {

// The two phase knobs of the ancilla-mediated controlled-phase block:
// phi_t accumulates on the ancilla |1> component before the first parity
// check, phi_tp is folded in after the mid-block ancilla Hadamard.
struct PhaseParams {
  double phi_t = 0.0;
  double phi_tp = 0.0;
};

struct MeasurementEntry {
  std::string block;    // e.g. "cr-parity[0,4]"
  std::string outcome;  // e.g. "P=1"
  double probability;   // Born probability at that site
};

struct MeasurementRecord {
  std::vector<MeasurementEntry> entries;

  double branch_probability() const {
    double p = 1.0;
    for (const MeasurementEntry& e : entries) p *= e.probability;
    return p;
  }

  // Stable identity of a branch: the outcome sequence without probabilities.
  std::string key() const {
    std::string k;
    for (const MeasurementEntry& e : entries) {
      if (!k.empty()) k += ';';
      k += e.block;
      k += '=';
      k += e.outcome;
    }
    return k;
  }
};

struct AppliedCorrection {
  std::string op;  // "sigma_x", "sigma_z", "rz(angle)"
  QubitId target;  // id at the time the correction was applied
};

struct ProtocolResult {
  PureState state;
  MeasurementRecord record;
  std::vector<AppliedCorrection> corrections;
  // Where the logical outputs live in the final register.
  std::vector<LogicalQubit> output_pairs;
};

// Named intermediate states a protocol run can expose.
namespace checkpoint {
inline constexpr std::string_view kCrEntry = "cr-entry";
inline constexpr std::string_view kCrParityControl = "cr-parity-control";
inline constexpr std::string_view kCrRotated = "cr-rotated";
inline constexpr std::string_view kCrParityTarget = "cr-parity-target";
inline constexpr std::string_view kCrDressed = "cr-dressed";
inline constexpr std::string_view kCrCorrected = "cr-corrected";
inline constexpr std::string_view kPairLink = "pair-link";
inline constexpr std::string_view kPreReadout = "pre-readout";
inline constexpr std::string_view kReadoutBranch = "readout-branch";
}  // namespace checkpoint

// Collects labeled state snapshots during a run.
struct TraceSink {
  std::vector<std::pair<std::string, PureState>> captures;

  void add(std::string_view label, const PureState& s) {
    captures.emplace_back(std::string(label), s);
  }

  // Latest capture with this label, or nullptr.
  const PureState* last(std::string_view label) const {
    for (auto it = captures.rbegin(); it != captures.rend(); ++it)
      if (it->first == label) return &it->second;
    return nullptr;
  }
};

// Optional transformation injected at every checkpoint (noise-robustness
// studies replace the state here).
using StepHook = std::function<PureState(const PureState&, std::string_view)>;

// (control angle, target angle) to undo the residual phases left by the
// controlled-phase block, keyed by the two parity outcomes.
using CorrectionPhaseFn =
    std::function<std::pair<double, double>(int, int, const PhaseParams&)>;

struct ProtocolOptions {
  TraceSink* trace = nullptr;
  StepHook step_hook;
  CorrectionPhaseFn phase_table;  // override for fault-injection tests
  bool full_transfer = false;     // cphase: keep consumed pairs in the register
};

// The correction table of the controlled-phase block. Along with the printed
// phases each cell leaves a branch-global factor (1, e^{i phi_tp},
// e^{i phi_t}, -e^{i(phi_t+phi_tp)} in the order below) that no correction
// needs to touch.
inline std::pair<double, double> cr_correction_phases(int p_control, int p_target,
                                                      const PhaseParams& ph) {
  const double pi = std::numbers::pi;
  if (p_control == 1 && p_target == 1) return {-ph.phi_t, -ph.phi_tp};
  if (p_control == 1 && p_target == 0) return {pi - ph.phi_t, ph.phi_tp};
  if (p_control == 0 && p_target == 1) return {ph.phi_t, pi - ph.phi_tp};
  return {ph.phi_t + pi, ph.phi_tp + pi};
}

namespace detail {

inline PureState run_checkpoint(PureState s, std::string_view label,
                                const ProtocolOptions* opts) {
  if (opts && opts->step_hook) s = opts->step_hook(s, label);
  if (opts && opts->trace) opts->trace->add(label, s);
  return s;
}

inline void merge_into(ProtocolResult& dst, ProtocolResult&& src) {
  dst.state = std::move(src.state);
  for (MeasurementEntry& e : src.record.entries)
    dst.record.entries.push_back(std::move(e));
  for (AppliedCorrection& c : src.corrections)
    dst.corrections.push_back(std::move(c));
}

inline std::string block_name(std::string_view kind, QubitId a, QubitId b) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*s[%zu,%zu]", static_cast<int>(kind.size()),
                kind.data(), a, b);
  return buf;
}

inline std::string block_name(std::string_view kind, QubitId a) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*s[%zu]", static_cast<int>(kind.size()),
                kind.data(), a);
  return buf;
}

inline std::string rz_name(double angle) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "rz(%.12g)", angle);
  return buf;
}

inline QubitId after_discard(QubitId q, QubitId removed) {
  return q > removed ? q - 1 : q;
}

inline void require_distinct(std::initializer_list<QubitId> ids) {
  std::vector<QubitId> v(ids);
  std::sort(v.begin(), v.end());
  if (std::adjacent_find(v.begin(), v.end()) != v.end())
    throw InvalidArgumentError("protocol qubit ids must be distinct");
}

// Weight of the (|01>+|10>)/sqrt2 component of a pair.
inline double psi_plus_weight(const PureState& s, const LogicalQubit& pair) {
  const double r = 1.0 / std::numbers::sqrt2;
  const std::array<cx, 4> plus{cx{0, 0}, cx{r, 0}, cx{r, 0}, cx{0, 0}};
  const Projector p = rank1_projector("psi+", {pair.first, pair.second}, plus);
  const std::vector<cx> v = project_unnormalized(s, p);
  double n2 = 0.0;
  for (const cx& a : v) n2 += std::norm(a);
  return n2;
}

}  // namespace detail

// Logical R_z(theta): diag(1, e^{i theta}) in the logical basis, realized as a
// plain R_z on the pair's first physical qubit. Deterministic, no ancillas.
inline ProtocolResult logical_rz(PureState s, const LogicalQubit& pair, double theta,
                                 const ProtocolOptions* /*opts*/ = nullptr) {
  detail::require_distinct({pair.first, pair.second});
  require_qubit(s, pair.first);
  require_qubit(s, pair.second);
  if (dfs_weight(s, {&pair, 1}) < 1.0 - tol::kContract)
    throw PreconditionError("logical_rz: pair is not inside the logical subspace");
  ProtocolResult res;
  s = apply_1q(s, pair.first, gates::Rz(theta));
  res.state = std::move(s);
  res.output_pairs = {pair};
  return res;
}

// Turns a |00> pair into (|01>+|10>)/sqrt2: Hadamard both qubits, parity-check
// them, and flip the second qubit when the aligned sector was found.
inline ProtocolResult prepare_ancilla_pair(PureState s, const LogicalQubit& pair,
                                           OutcomeSource& out,
                                           const ProtocolOptions* /*opts*/ = nullptr) {
  detail::require_distinct({pair.first, pair.second});
  require_qubit(s, pair.first);
  require_qubit(s, pair.second);
  for (QubitId q : {pair.first, pair.second})
    if (bit_probability(s, q, 1) > tol::kContract)
      throw PreconditionError("prepare_ancilla_pair: pair must start in |00>");
  ProtocolResult res;
  s = apply_1q(s, pair.first, gates::H());
  s = apply_1q(s, pair.second, gates::H());
  ParityResult pr = parity_check(s, pair.first, pair.second, out);
  res.record.entries.push_back(
      {detail::block_name("prep-parity", pair.first, pair.second),
       pr.outcome == ParityOutcome::aligned ? "P=1" : "P=0", pr.probability});
  s = std::move(pr.state);
  if (pr.outcome == ParityOutcome::aligned) {
    s = apply_1q(s, pair.second, gates::X);
    res.corrections.push_back({"sigma_x", pair.second});
  }
  res.state = std::move(s);
  res.output_pairs = {pair};
  return res;
}

// Ancilla-mediated controlled phase between two physical qubits. The ancilla
// must arrive in |0>; it is dressed internally, routed through both parity
// checks, measured out in {|+>,|->}, and removed from the register. The final
// state equals diag(1,1,1,-1) on (control, target) up to a branch-global
// phase, for every parity/dressed outcome combination.
inline ProtocolResult cr_block(PureState s, QubitId control, QubitId target,
                               QubitId ancilla, const PhaseParams& ph,
                               OutcomeSource& out,
                               const ProtocolOptions* opts = nullptr) {
  detail::require_distinct({control, target, ancilla});
  for (QubitId q : {control, target, ancilla}) require_qubit(s, q);
  if (bit_probability(s, ancilla, 1) > tol::kContract)
    throw PreconditionError("cr_block: ancilla must arrive in |0>");
  ProtocolResult res;

  s = apply_1q(s, ancilla, gates::H());
  s = apply_1q(s, ancilla, gates::Rz(ph.phi_t));
  s = detail::run_checkpoint(std::move(s), checkpoint::kCrEntry, opts);

  ParityResult p1 = parity_check(s, control, ancilla, out);
  res.record.entries.push_back(
      {detail::block_name("cr-parity", control, ancilla),
       p1.outcome == ParityOutcome::aligned ? "P=1" : "P=0", p1.probability});
  s = detail::run_checkpoint(std::move(p1.state), checkpoint::kCrParityControl, opts);

  s = apply_1q(s, ancilla, gates::H());
  s = apply_1q(s, ancilla, gates::Rz(ph.phi_tp));
  s = detail::run_checkpoint(std::move(s), checkpoint::kCrRotated, opts);

  ParityResult p2 = parity_check(s, target, ancilla, out);
  res.record.entries.push_back(
      {detail::block_name("cr-parity", target, ancilla),
       p2.outcome == ParityOutcome::aligned ? "P=1" : "P=0", p2.probability});
  s = detail::run_checkpoint(std::move(p2.state), checkpoint::kCrParityTarget, opts);

  DressedResult dm = dressed_measure(s, ancilla, out);
  res.record.entries.push_back(
      {detail::block_name("dressed", ancilla),
       dm.outcome == DressedOutcome::plus ? "+" : "-", dm.probability});
  s = std::move(dm.state);
  if (dm.outcome == DressedOutcome::minus) {
    s = apply_1q(s, target, gates::Z);
    res.corrections.push_back({"sigma_z", target});
  }
  s = discard_qubit(s, ancilla);
  const QubitId c = detail::after_discard(control, ancilla);
  const QubitId t = detail::after_discard(target, ancilla);
  s = detail::run_checkpoint(std::move(s), checkpoint::kCrDressed, opts);

  const CorrectionPhaseFn& table =
      (opts && opts->phase_table) ? opts->phase_table
                                  : CorrectionPhaseFn(cr_correction_phases);
  const auto [ac, at] =
      table(static_cast<int>(p1.outcome), static_cast<int>(p2.outcome), ph);
  s = apply_1q(s, c, gates::Rz(ac));
  res.corrections.push_back({detail::rz_name(ac), c});
  s = apply_1q(s, t, gates::Rz(at));
  res.corrections.push_back({detail::rz_name(at), t});
  s = detail::run_checkpoint(std::move(s), checkpoint::kCrCorrected, opts);

  res.state = std::move(s);
  return res;
}

// Logical Hadamard by teleportation: entangle in_pair with a fresh
// (|01>+|10>)/sqrt2 pair through the controlled-phase block, then measure
// in_pair in the single-pair Bell basis. The result lives on anc_pair
// (sigma_x sigma_x corrected when the odd detector fires). The block ancilla
// is removed from the register, so ids above it shift down by one.
inline ProtocolResult logical_hadamard(PureState s, const LogicalQubit& in_pair,
                                       const LogicalQubit& anc_pair, QubitId ancilla,
                                       const PhaseParams& ph, OutcomeSource& out,
                                       const ProtocolOptions* opts = nullptr) {
  detail::require_distinct(
      {in_pair.first, in_pair.second, anc_pair.first, anc_pair.second, ancilla});
  if (dfs_weight(s, {&in_pair, 1}) < 1.0 - tol::kContract)
    throw PreconditionError("logical_hadamard: input pair is not inside the logical subspace");
  if (detail::psi_plus_weight(s, anc_pair) < 1.0 - tol::kContract)
    throw PreconditionError("logical_hadamard: ancilla pair must be (|01>+|10>)/sqrt2");

  ProtocolResult res;
  detail::merge_into(
      res, cr_block(std::move(s), in_pair.first, anc_pair.first, ancilla, ph, out, opts));
  const LogicalQubit in2{detail::after_discard(in_pair.first, ancilla),
                         detail::after_discard(in_pair.second, ancilla)};
  const LogicalQubit anc2{detail::after_discard(anc_pair.first, ancilla),
                          detail::after_discard(anc_pair.second, ancilla)};

  DetectorResult d = detector_D(res.state, in2, out);
  if (d.label == DetectorLabel::leak)
    throw LeakageError("logical_hadamard: detector found the input pair outside the logical subspace",
                       d.probability);
  res.record.entries.push_back(
      {detail::block_name("detector", in2.first, in2.second),
       d.label == DetectorLabel::d1 ? "D1" : "D2", d.probability});
  PureState st = std::move(d.state);
  if (d.label == DetectorLabel::d2) {
    st = apply_1q(st, anc2.first, gates::X);
    st = apply_1q(st, anc2.second, gates::X);
    res.corrections.push_back({"sigma_x", anc2.first});
    res.corrections.push_back({"sigma_x", anc2.second});
  }
  res.state = std::move(st);
  res.output_pairs = {anc2};
  return res;
}

namespace detail {

// In-protocol logical Hadamard on `cur`: allocates a fresh pair + block
// ancilla at the top of the register, teleports, and (unless full_transfer)
// contracts the consumed pair out and moves the fresh pair back into its
// place so downstream ids stay valid.
inline PureState hadamard_in_place(PureState s, LogicalQubit& cur,
                                   const PhaseParams& ph, OutcomeSource& out,
                                   const ProtocolOptions* opts, ProtocolResult& res) {
  const std::size_t n = s.num_qubits();
  s = tensor(std::move(s), new_basis_state(3, "000"));
  const LogicalQubit fresh{n, n + 1};
  detail::merge_into(res, prepare_ancilla_pair(std::move(s), fresh, out, opts));
  detail::merge_into(res, logical_hadamard(std::move(res.state), cur, fresh,
                                           n + 2, ph, out, opts));
  PureState st = std::move(res.state);
  if (opts && opts->full_transfer) {
    cur = fresh;
    return st;
  }
  // Contract the measured-out pair; the fresh pair slides into its slots.
  std::vector<QubitId> keep;
  for (QubitId q = 0; q < n + 2; ++q)
    if (q != cur.first && q != cur.second) keep.push_back(q);
  st = factor_out(st, keep);
  std::vector<QubitId> contracted_pos(n, 0);
  {
    QubitId pos = 0;
    for (QubitId q = 0; q < n; ++q)
      if (q != cur.first && q != cur.second) contracted_pos[q] = pos++;
  }
  std::vector<QubitId> order(n);
  for (QubitId p = 0; p < n; ++p) {
    if (p == cur.first) order[p] = n - 2;
    else if (p == cur.second) order[p] = n - 1;
    else order[p] = contracted_pos[p];
  }
  return permute_qubits(st, order);
}

}  // namespace detail

// Logical controlled phase diag(1,1,1,-1) between pair_a and pair_b, mediated
// by an ancilla pair prepared in (|01>+|10>)/sqrt2. The ancilla pair is
// parity-linked to pair_a, Hadamard-transformed, parity-linked to pair_b,
// Hadamard-transformed again, and read out; sigma_z corrections keyed by the
// link parity and the readout bits finish the gate.
inline ProtocolResult logical_cphase(PureState s, const LogicalQubit& pair_a,
                                     const LogicalQubit& anc_pair,
                                     const LogicalQubit& pair_b,
                                     const PhaseParams& ph, OutcomeSource& out,
                                     const ProtocolOptions* opts = nullptr) {
  detail::require_distinct({pair_a.first, pair_a.second, anc_pair.first,
                            anc_pair.second, pair_b.first, pair_b.second});
  try {
    (void)decode_logical(s, pair_a);
    (void)decode_logical(s, pair_b);
  } catch (const Error& e) {
    throw PreconditionError(std::string("logical_cphase: input pairs must be "
                                        "unentangled logical states: ") + e.what());
  }
  if (detail::psi_plus_weight(s, anc_pair) < 1.0 - tol::kContract)
    throw PreconditionError("logical_cphase: ancilla pair must be (|01>+|10>)/sqrt2");

  ProtocolResult res;
  ParityResult link = parity_check(s, pair_a.first, anc_pair.first, out);
  res.record.entries.push_back(
      {detail::block_name("link-parity", pair_a.first, anc_pair.first),
       link.outcome == ParityOutcome::aligned ? "P=1" : "P=0", link.probability});
  s = std::move(link.state);
  if (link.outcome == ParityOutcome::antiparallel) {
    s = apply_1q(s, anc_pair.first, gates::X);
    s = apply_1q(s, anc_pair.second, gates::X);
    res.corrections.push_back({"sigma_x", anc_pair.first});
    res.corrections.push_back({"sigma_x", anc_pair.second});
  }
  s = detail::run_checkpoint(std::move(s), checkpoint::kPairLink, opts);

  LogicalQubit cur = anc_pair;
  res.state = std::move(s);
  PureState st = detail::hadamard_in_place(std::move(res.state), cur, ph, out, opts, res);

  ParityResult merge = parity_check(st, cur.second, pair_b.second, out);
  res.record.entries.push_back(
      {detail::block_name("merge-parity", cur.second, pair_b.second),
       merge.outcome == ParityOutcome::aligned ? "P=1" : "P=0", merge.probability});
  res.state = std::move(merge.state);

  st = detail::hadamard_in_place(std::move(res.state), cur, ph, out, opts, res);
  st = detail::run_checkpoint(std::move(st), checkpoint::kPreReadout, opts);

  ReadoutResult ro = readout_pair(st, cur, out);
  {
    std::string bits{static_cast<char>('0' + (ro.bits >> 1)),
                     static_cast<char>('0' + (ro.bits & 1))};
    res.record.entries.push_back(
        {detail::block_name("readout", cur.first, cur.second), bits, ro.probability});
  }
  st = detail::run_checkpoint(std::move(ro.state), checkpoint::kReadoutBranch, opts);
  if (ro.bits == 0b00 || ro.bits == 0b11)
    throw LeakageError("logical_cphase: readout found the ancilla pair outside the logical subspace",
                       ro.probability);

  const bool aligned = merge.outcome == ParityOutcome::aligned;
  const bool high = ro.bits == 0b10;
  if (!aligned) {
    st = apply_1q(st, pair_a.first, gates::Z);
    res.corrections.push_back({"sigma_z", pair_a.first});
  }
  if (high) {
    st = apply_1q(st, pair_b.first, gates::Z);
    res.corrections.push_back({"sigma_z", pair_b.first});
  }
  res.state = std::move(st);
  res.output_pairs = {pair_a, pair_b};
  return res;
}

// ---------------------------------------------------------------------------
// Named protocol registry: uniform construction, execution, ideal targets.

struct ProtocolInput {
  LogicalAmplitudes a{};  // single input / control
  LogicalAmplitudes b{};  // target (cphase, cr-block)
};

struct ProtocolDescriptor {
  std::string name;  // "rz" | "hadamard" | "cphase" | "cr-block"
  double theta = 0.0;
  PhaseParams phases{};
  bool full_transfer = false;
};

inline bool protocol_known(const std::string& name) {
  return name == "rz" || name == "hadamard" || name == "cphase" ||
         name == "cr-block";
}

// Number of logical qubits the protocol's channel acts on; cr-block counts
// its two bare physical qubits.
inline std::size_t protocol_logical_width(const ProtocolDescriptor& d) {
  if (d.name == "rz" || d.name == "hadamard") return 1;
  if (d.name == "cphase" || d.name == "cr-block") return 2;
  throw InvalidArgumentError("unknown protocol: " + d.name);
}

inline PureState protocol_initial_state(const ProtocolDescriptor& d,
                                        const ProtocolInput& in) {
  require_normalized(in.a);
  if (d.name == "rz") return encode_logical(in.a);
  if (d.name == "hadamard")
    return tensor(encode_logical(in.a), new_basis_state(3, "000"));
  if (d.name == "cphase") {
    require_normalized(in.b);
    return tensor(tensor(encode_logical(in.a), new_basis_state(2, "00")),
                  encode_logical(in.b));
  }
  if (d.name == "cr-block") {
    require_normalized(in.b);
    const PureState qa = PureState::unchecked({in.a.alpha, in.a.beta}, 1);
    const PureState qb = PureState::unchecked({in.b.alpha, in.b.beta}, 1);
    return tensor(tensor(qa, qb), new_basis_state(1, "0"));
  }
  throw InvalidArgumentError("unknown protocol: " + d.name);
}

inline ProtocolResult run_protocol(const ProtocolDescriptor& d, PureState initial,
                                   OutcomeSource& out,
                                   const ProtocolOptions* opts = nullptr) {
  ProtocolOptions local;
  if (opts) local = *opts;
  local.full_transfer = (opts && opts->full_transfer) || d.full_transfer;
  if (d.name == "rz")
    return logical_rz(std::move(initial), LogicalQubit{0, 1}, d.theta, &local);
  if (d.name == "hadamard") {
    ProtocolResult res;
    detail::merge_into(res, prepare_ancilla_pair(std::move(initial),
                                                 LogicalQubit{2, 3}, out, &local));
    ProtocolResult h = logical_hadamard(std::move(res.state), LogicalQubit{0, 1},
                                        LogicalQubit{2, 3}, 4, d.phases, out, &local);
    res.output_pairs = h.output_pairs;
    detail::merge_into(res, std::move(h));
    return res;
  }
  if (d.name == "cphase") {
    ProtocolResult res;
    detail::merge_into(res, prepare_ancilla_pair(std::move(initial),
                                                 LogicalQubit{2, 3}, out, &local));
    ProtocolResult cz = logical_cphase(std::move(res.state), LogicalQubit{0, 1},
                                       LogicalQubit{2, 3}, LogicalQubit{4, 5},
                                       d.phases, out, &local);
    res.output_pairs = cz.output_pairs;
    detail::merge_into(res, std::move(cz));
    return res;
  }
  if (d.name == "cr-block")
    return cr_block(std::move(initial), 0, 1, 2, d.phases, out, &local);
  throw InvalidArgumentError("unknown protocol: " + d.name);
}

inline ProtocolResult run_protocol_sampled(const ProtocolDescriptor& d,
                                           const ProtocolInput& in,
                                           std::uint64_t seed,
                                           const ProtocolOptions* opts = nullptr) {
  SampledOutcomes out(seed);
  return run_protocol(d, protocol_initial_state(d, in), out, opts);
}

// Target amplitudes of the ideal gate on the given input, in the logical
// basis (physical two-qubit basis for cr-block).
inline std::vector<cx> ideal_output_amplitudes(const ProtocolDescriptor& d,
                                               const ProtocolInput& in) {
  const cx a = in.a.alpha, b = in.a.beta;
  if (d.name == "rz") return {a, std::polar(1.0, d.theta) * b};
  if (d.name == "hadamard") {
    const double r = 1.0 / std::numbers::sqrt2;
    return {r * (a + b), r * (a - b)};
  }
  const cx c = in.b.alpha, e = in.b.beta;
  if (d.name == "cphase" || d.name == "cr-block")
    return {a * c, a * e, b * c, -b * e};
  throw InvalidArgumentError("unknown protocol: " + d.name);
}

// Reads the logical output amplitudes off a finished state. The listed pairs
// are extracted (they must be unentangled with the rest of the register); an
// empty pair list returns the raw state vector.
inline std::vector<cx> extract_output_amplitudes(
    const PureState& state, std::span<const LogicalQubit> pairs) {
  if (pairs.empty()) return state.amplitudes();
  std::vector<QubitId> keep;
  for (const LogicalQubit& p : pairs) {
    keep.push_back(p.first);
    keep.push_back(p.second);
  }
  std::vector<QubitId> sorted = keep;
  std::sort(sorted.begin(), sorted.end());
  const PureState sub = factor_out(state, sorted);
  // Position of each pair qubit inside the extracted register.
  std::vector<std::size_t> pos(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i)
    pos[i] = static_cast<std::size_t>(
        std::lower_bound(sorted.begin(), sorted.end(), keep[i]) - sorted.begin());
  const std::size_t width = pairs.size();
  const std::size_t m = sorted.size();
  std::vector<cx> amps(std::size_t{1} << width);
  double captured = 0.0;
  for (std::size_t logical = 0; logical < amps.size(); ++logical) {
    std::size_t idx = 0;
    for (std::size_t p = 0; p < width; ++p) {
      const int bit = static_cast<int>((logical >> (width - 1 - p)) & 1u);
      // logical 0 -> |01>, logical 1 -> |10> on (first, second)
      const int b1 = bit, b2 = 1 - bit;
      idx |= static_cast<std::size_t>(b1) << (m - 1 - pos[2 * p]);
      idx |= static_cast<std::size_t>(b2) << (m - 1 - pos[2 * p + 1]);
    }
    amps[logical] = sub.amplitude(idx);
    captured += std::norm(amps[logical]);
  }
  if (captured < 1.0 - tol::kContract)
    throw LeakageError("output pairs carry population outside the logical subspace",
                       1.0 - captured);
  if (std::abs(captured - 1.0) > tol::kBranchCutoff) {
    const double inv = 1.0 / std::sqrt(captured);
    for (cx& v : amps) v *= inv;
  }
  return amps;
}

inline std::vector<cx> extract_output_amplitudes(const ProtocolResult& r) {
  return extract_output_amplitudes(r.state, r.output_pairs);
}

// |<ideal|actual>| for one finished branch.
inline double branch_fidelity(const ProtocolResult& r, const ProtocolDescriptor& d,
                              const ProtocolInput& in) {
  const std::vector<cx> actual = extract_output_amplitudes(r);
  const std::vector<cx> ideal = ideal_output_amplitudes(d, in);
  if (actual.size() != ideal.size())
    throw InvalidArgumentError("branch_fidelity: output dimension mismatch");
  cx ov{0, 0};
  for (std::size_t i = 0; i < ideal.size(); ++i)
    ov += std::conj(ideal[i]) * actual[i];
  return std::abs(ov);
}

}  // namespace dfsim
