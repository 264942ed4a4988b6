#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dfsim/gates.hpp"
#include "dfsim/types.hpp"

namespace dfsim {

// Normalized pure state over n qubits, 2^n amplitudes, MSB-first basis
// ordering: amplitude index q0*2^{n-1} + q1*2^{n-2} + ... + q_{n-1}.
// Global phase is physical here and is never normalized away; comparisons that
// should ignore it go through fidelity_up_to_global_phase.
class PureState {
 public:
  PureState() = default;

  explicit PureState(std::vector<cx> amps) : amps_(std::move(amps)) {
    std::size_t n = 0;
    while ((std::size_t{1} << n) < amps_.size()) ++n;
    if ((std::size_t{1} << n) != amps_.size() || amps_.empty())
      throw InvalidArgumentError("amplitude vector length must be a power of two");
    n_ = n;
    check_norm();
  }

  std::size_t num_qubits() const { return n_; }
  std::size_t dim() const { return amps_.size(); }
  const std::vector<cx>& amplitudes() const { return amps_; }
  cx amplitude(std::size_t idx) const { return amps_.at(idx); }

  double norm2() const {
    double s = 0.0;
    for (const cx& a : amps_) s += std::norm(a);
    return s;
  }

  int bit(std::size_t index, QubitId q) const {
    return static_cast<int>((index >> (n_ - 1 - q)) & 1u);
  }

  std::string basis_label(std::size_t index) const {
    std::string s(n_, '0');
    for (QubitId q = 0; q < n_; ++q) s[q] = bit(index, q) ? '1' : '0';
    return s;
  }

  // Internal mutable access for the operations below.
  std::vector<cx>& raw() { return amps_; }

  static PureState unchecked(std::vector<cx> amps, std::size_t n) {
    PureState s;
    s.amps_ = std::move(amps);
    s.n_ = n;
    return s;
  }

 private:
  void check_norm() const {
    double n2 = norm2();
    if (std::abs(n2 - 1.0) > 1e-9) {
      std::ostringstream os;
      os << "state norm^2 = " << n2 << ", expected 1";
      throw InvalidArgumentError(os.str());
    }
  }

  std::vector<cx> amps_;
  std::size_t n_ = 0;
};

// |bits> with bits given MSB-first, e.g. new_basis_state(4, "0110").
inline PureState new_basis_state(std::size_t num_qubits, const std::string& bits) {
  if (bits.size() != num_qubits)
    throw InvalidArgumentError("basis label length does not match qubit count");
  std::size_t idx = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') throw InvalidArgumentError("basis label must be binary");
    idx = (idx << 1) | static_cast<std::size_t>(c - '0');
  }
  std::vector<cx> amps(std::size_t{1} << num_qubits, cx{0.0, 0.0});
  amps[idx] = cx{1.0, 0.0};
  return PureState::unchecked(std::move(amps), num_qubits);
}

inline PureState new_basis_state(std::size_t num_qubits, std::size_t index) {
  if (index >= (std::size_t{1} << num_qubits))
    throw InvalidArgumentError("basis index out of range");
  std::vector<cx> amps(std::size_t{1} << num_qubits, cx{0.0, 0.0});
  amps[index] = cx{1.0, 0.0};
  return PureState::unchecked(std::move(amps), num_qubits);
}

inline void require_qubit(const PureState& s, QubitId q) {
  if (q >= s.num_qubits()) throw InvalidArgumentError("qubit id out of range");
}

// Applies a single-qubit unitary to qubit q. Rejects non-unitary matrices.
inline PureState apply_1q(const PureState& s, QubitId q, const Mat2& u) {
  require_qubit(s, q);
  if (!is_unitary(u))
    throw InvalidArgumentError("apply_1q: matrix is not unitary within tolerance");
  const std::size_t n = s.num_qubits();
  const std::size_t mask = std::size_t{1} << (n - 1 - q);
  std::vector<cx> out = s.amplitudes();
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (i & mask) continue;
    const cx a0 = out[i];
    const cx a1 = out[i | mask];
    out[i] = u(0, 0) * a0 + u(0, 1) * a1;
    out[i | mask] = u(1, 0) * a0 + u(1, 1) * a1;
  }
  return PureState::unchecked(std::move(out), n);
}

// Projector supported on an ordered list of qubits. The matrix is
// 2^k x 2^k row-major over the support, MSB-first in listed order.
struct Projector {
  std::string label;
  std::vector<QubitId> support;
  std::vector<cx> matrix;
  // Set when the projector is |v><v| for a normalized v; enables the direct
  // probability formula without materializing the projected vector.
  std::vector<cx> rank1;

  std::size_t sub_dim() const { return std::size_t{1} << support.size(); }

  bool is_diagonal_01() const {
    const std::size_t d = sub_dim();
    if (matrix.size() != d * d) return false;
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c) {
        const cx v = matrix[r * d + c];
        if (r != c && std::abs(v) != 0.0) return false;
        if (r == c && v != cx{0.0, 0.0} && v != cx{1.0, 0.0}) return false;
      }
    return true;
  }
};

// Diagonal projector keeping the listed support bitstrings.
inline Projector diagonal_projector(std::string label, std::vector<QubitId> support,
                                    std::span<const std::size_t> kept) {
  Projector p{std::move(label), std::move(support), {}, {}};
  const std::size_t d = p.sub_dim();
  p.matrix.assign(d * d, cx{0.0, 0.0});
  for (std::size_t k : kept) {
    if (k >= d) throw InvalidArgumentError("kept sub-index out of range");
    p.matrix[k * d + k] = cx{1.0, 0.0};
  }
  return p;
}

// |v><v| for a (not necessarily normalized) support-space vector v.
inline Projector rank1_projector(std::string label, std::vector<QubitId> support,
                                 std::span<const cx> v) {
  Projector p{std::move(label), std::move(support), {}, {}};
  const std::size_t d = p.sub_dim();
  if (v.size() != d) throw InvalidArgumentError("rank1 vector has wrong dimension");
  double n2 = 0.0;
  for (const cx& a : v) n2 += std::norm(a);
  if (n2 <= 0.0) throw InvalidArgumentError("rank1 vector is zero");
  p.matrix.resize(d * d);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c)
      p.matrix[r * d + c] = v[r] * std::conj(v[c]) / n2;
  const double inv = 1.0 / std::sqrt(n2);
  p.rank1.assign(v.begin(), v.end());
  for (cx& a : p.rank1) a *= inv;
  return p;
}

namespace detail {

inline void check_support(const PureState& s, const std::vector<QubitId>& support) {
  if (support.empty()) throw InvalidArgumentError("empty projector support");
  for (QubitId q : support) require_qubit(s, q);
  std::vector<QubitId> sorted = support;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw InvalidArgumentError("projector support lists a qubit twice");
}

// out = (M on support) * state, for an arbitrary support-space matrix.
inline std::vector<cx> apply_support_matrix(const PureState& s,
                                            const std::vector<QubitId>& support,
                                            const std::vector<cx>& matrix) {
  const std::size_t n = s.num_qubits();
  const std::size_t k = support.size();
  const std::size_t d = std::size_t{1} << k;
  if (matrix.size() != d * d)
    throw InvalidArgumentError("support matrix has wrong dimension");
  std::vector<std::size_t> bitmask(k);
  std::size_t support_mask = 0;
  for (std::size_t j = 0; j < k; ++j) {
    bitmask[j] = std::size_t{1} << (n - 1 - support[j]);
    support_mask |= bitmask[j];
  }
  const std::vector<cx>& in = s.amplitudes();
  std::vector<cx> out(in.size(), cx{0.0, 0.0});
  std::vector<std::size_t> addr(d);
  std::vector<cx> sub(d);
  for (std::size_t base = 0; base < in.size(); ++base) {
    if (base & support_mask) continue;
    for (std::size_t sidx = 0; sidx < d; ++sidx) {
      std::size_t a = base;
      for (std::size_t j = 0; j < k; ++j)
        if ((sidx >> (k - 1 - j)) & 1u) a |= bitmask[j];
      addr[sidx] = a;
      sub[sidx] = in[a];
    }
    for (std::size_t r = 0; r < d; ++r) {
      cx acc{0.0, 0.0};
      for (std::size_t c = 0; c < d; ++c) acc += matrix[r * d + c] * sub[c];
      out[addr[r]] = acc;
    }
  }
  return out;
}

}  // namespace detail

// Returns P|psi> without normalization.
inline std::vector<cx> project_unnormalized(const PureState& s, const Projector& p) {
  detail::check_support(s, p.support);
  if (p.is_diagonal_01()) {
    // Zero out the discarded sectors; kept amplitudes are copied bit-exactly.
    const std::size_t n = s.num_qubits();
    const std::size_t k = p.support.size();
    const std::size_t d = p.sub_dim();
    std::vector<cx> out = s.amplitudes();
    for (std::size_t i = 0; i < out.size(); ++i) {
      std::size_t sidx = 0;
      for (std::size_t j = 0; j < k; ++j)
        sidx = (sidx << 1) |
               ((i >> (n - 1 - p.support[j])) & 1u);
      if (p.matrix[sidx * d + sidx] == cx{0.0, 0.0}) out[i] = cx{0.0, 0.0};
    }
    return out;
  }
  return detail::apply_support_matrix(s, p.support, p.matrix);
}

struct MeasureResult {
  std::size_t outcome;      // index into the projector list
  double probability;       // Born probability of that outcome
  PureState state;          // collapsed, renormalized state
};

// Born probability <psi|P|psi> without materializing P|psi> when a fast
// structure (diagonal 0/1 or rank-1) is available.
inline double probability_of(const PureState& s, const Projector& p) {
  detail::check_support(s, p.support);
  const std::size_t n = s.num_qubits();
  const std::size_t k = p.support.size();
  const std::size_t d = p.sub_dim();
  const std::vector<cx>& a = s.amplitudes();
  if (p.is_diagonal_01()) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      std::size_t sidx = 0;
      for (std::size_t j = 0; j < k; ++j)
        sidx = (sidx << 1) | ((i >> (n - 1 - p.support[j])) & 1u);
      if (p.matrix[sidx * d + sidx] != cx{0.0, 0.0}) acc += std::norm(a[i]);
    }
    return acc;
  }
  if (!p.rank1.empty()) {
    std::vector<std::size_t> bitmask(k);
    std::size_t support_mask = 0;
    for (std::size_t j = 0; j < k; ++j) {
      bitmask[j] = std::size_t{1} << (n - 1 - p.support[j]);
      support_mask |= bitmask[j];
    }
    double acc = 0.0;
    for (std::size_t base = 0; base < a.size(); ++base) {
      if (base & support_mask) continue;
      cx ov{0.0, 0.0};
      for (std::size_t sidx = 0; sidx < d; ++sidx) {
        std::size_t addr = base;
        for (std::size_t j = 0; j < k; ++j)
          if ((sidx >> (k - 1 - j)) & 1u) addr |= bitmask[j];
        ov += std::conj(p.rank1[sidx]) * a[addr];
      }
      acc += std::norm(ov);
    }
    return acc;
  }
  std::vector<cx> v = project_unnormalized(s, p);
  double n2 = 0.0;
  for (const cx& c : v) n2 += std::norm(c);
  return n2;
}

inline std::vector<double> measurement_probabilities(
    const PureState& s, std::span<const Projector> projectors) {
  std::vector<double> probs;
  probs.reserve(projectors.size());
  for (const Projector& p : projectors) probs.push_back(probability_of(s, p));
  double sum = 0.0;
  for (double p : probs) sum += p;
  if (std::abs(sum - 1.0) > tol::kContract)
    throw InvalidArgumentError("projector set is not complete on this state");
  return probs;
}

// Collapse onto projectors[outcome]. Rejects outcomes whose probability is
// below the branch cutoff. When the projection removes only negligible weight
// the amplitudes are left untouched, which keeps repeated measurements
// bit-stable.
inline MeasureResult collapse_onto(const PureState& s,
                                   std::span<const Projector> projectors,
                                   std::size_t outcome,
                                   const std::vector<double>& probs) {
  if (outcome >= projectors.size())
    throw InvalidArgumentError("measurement outcome index out of range");
  const double p = probs[outcome];
  if (p < tol::kBranchCutoff) {
    std::ostringstream os;
    os << "forced outcome '" << projectors[outcome].label
       << "' has probability " << p;
    throw ZeroProbabilityBranchError(os.str());
  }
  std::vector<cx> v = project_unnormalized(s, projectors[outcome]);
  if (std::abs(p - 1.0) > tol::kBranchCutoff) {
    const double inv = 1.0 / std::sqrt(p);
    for (cx& a : v) a *= inv;
  }
  return MeasureResult{outcome, p, PureState::unchecked(std::move(v), s.num_qubits())};
}

// Removes qubit q from the register. The qubit must be unentangled with the
// rest (reduced purity within 1e-10 of 1), otherwise EntangledDiscardError.
inline PureState discard_qubit(const PureState& s, QubitId q) {
  require_qubit(s, q);
  const std::size_t n = s.num_qubits();
  if (n == 1) throw InvalidArgumentError("cannot discard the last qubit");
  const std::size_t mask = std::size_t{1} << (n - 1 - q);
  // 2x2 reduced density matrix of q.
  cx r00{0, 0}, r01{0, 0}, r11{0, 0};
  const std::vector<cx>& a = s.amplitudes();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i & mask) continue;
    const cx a0 = a[i];
    const cx a1 = a[i | mask];
    r00 += a0 * std::conj(a0);
    r11 += a1 * std::conj(a1);
    r01 += a0 * std::conj(a1);
  }
  const double purity = std::norm(r00) + std::norm(r11) + 2.0 * std::norm(r01);
  if (purity < 1.0 - tol::kContract) {
    std::ostringstream os;
    os << "discard of qubit " << q << ": reduced purity " << purity
       << " (qubit is entangled with the rest)";
    throw EntangledDiscardError(os.str(), 1.0 - purity);
  }
  // Dominant single-qubit component (v0, v1): eigenvector of the 2x2 density.
  cx v0, v1;
  if (std::abs(r01) < 1e-15) {
    const bool one = r11.real() > r00.real();
    v0 = one ? cx{0, 0} : cx{1, 0};
    v1 = one ? cx{1, 0} : cx{0, 0};
  } else {
    const double tr = r00.real() + r11.real();
    const double det = (r00 * r11 - r01 * std::conj(r01)).real();
    const double lam = 0.5 * (tr + std::sqrt(std::max(0.0, tr * tr - 4.0 * det)));
    // (rho - lam I) v = 0  =>  v = (r01, lam - r00)
    v0 = r01;
    v1 = cx{lam, 0.0} - r00;
    const double vn = std::sqrt(std::norm(v0) + std::norm(v1));
    v0 /= vn;
    v1 /= vn;
  }
  // Contract: rest[j] = <v|psi_j>, where psi_j groups the two amplitudes of
  // basis state j of the remaining register.
  std::vector<cx> rest;
  rest.reserve(a.size() / 2);
  const std::size_t low = mask - 1;  // bits below the removed position
  for (std::size_t j = 0; j < a.size() / 2; ++j) {
    const std::size_t base = ((j & ~low) << 1) | (j & low);
    rest.push_back(std::conj(v0) * a[base] + std::conj(v1) * a[base | mask]);
  }
  double n2 = 0.0;
  for (const cx& c : rest) n2 += std::norm(c);
  const double inv = 1.0 / std::sqrt(n2);
  if (std::abs(n2 - 1.0) > tol::kBranchCutoff)
    for (cx& c : rest) c *= inv;
  return PureState::unchecked(std::move(rest), n - 1);
}

// Keeps the listed qubits (strictly increasing) and removes the rest, which
// must be unentangled with the kept part as a whole.
inline PureState factor_out(const PureState& s, std::span<const QubitId> keep) {
  const std::size_t n = s.num_qubits();
  if (keep.empty()) throw InvalidArgumentError("factor_out: keep list is empty");
  for (std::size_t i = 0; i < keep.size(); ++i) {
    require_qubit(s, keep[i]);
    if (i > 0 && keep[i] <= keep[i - 1])
      throw InvalidArgumentError("factor_out: keep list must be strictly increasing");
  }
  if (keep.size() == n) return s;
  std::vector<bool> kept(n, false);
  for (QubitId q : keep) kept[q] = true;
  const std::size_t dk = std::size_t{1} << keep.size();
  const std::size_t dr = std::size_t{1} << (n - keep.size());
  // M[k][r]: amplitude with kept qubits in sub-state k, removed qubits in r.
  std::vector<cx> M(dk * dr);
  const std::vector<cx>& a = s.amplitudes();
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::size_t ki = 0, ri = 0;
    for (QubitId q = 0; q < n; ++q) {
      const std::size_t b = (i >> (n - 1 - q)) & 1u;
      if (kept[q]) ki = (ki << 1) | b; else ri = (ri << 1) | b;
    }
    M[ki * dr + ri] = a[i];
  }
  // Product extraction: pick the kept row with the largest norm, read the
  // removed-factor direction from it, contract to get the kept factor, and
  // verify the rank-1 reconstruction.
  std::size_t kbest = 0;
  double best = -1.0;
  for (std::size_t k = 0; k < dk; ++k) {
    double rn = 0.0;
    for (std::size_t r = 0; r < dr; ++r) rn += std::norm(M[k * dr + r]);
    if (rn > best) { best = rn; kbest = k; }
  }
  std::vector<cx> v(dr);
  const double vinv = 1.0 / std::sqrt(best);
  for (std::size_t r = 0; r < dr; ++r) v[r] = M[kbest * dr + r] * vinv;
  std::vector<cx> u(dk);
  for (std::size_t k = 0; k < dk; ++k) {
    cx acc{0.0, 0.0};
    for (std::size_t r = 0; r < dr; ++r) acc += M[k * dr + r] * std::conj(v[r]);
    u[k] = acc;
  }
  double residual = 0.0;
  for (std::size_t k = 0; k < dk; ++k)
    for (std::size_t r = 0; r < dr; ++r)
      residual += std::norm(M[k * dr + r] - u[k] * v[r]);
  if (residual > tol::kContract) {
    std::ostringstream os;
    os << "factor_out: removed qubits are entangled with the kept ones "
       << "(residual " << residual << ")";
    throw EntangledDiscardError(os.str(), residual);
  }
  double n2 = 0.0;
  for (const cx& c : u) n2 += std::norm(c);
  if (std::abs(n2 - 1.0) > tol::kBranchCutoff) {
    const double inv = 1.0 / std::sqrt(n2);
    for (cx& c : u) c *= inv;
  }
  return PureState::unchecked(std::move(u), keep.size());
}

// Reorders the register: new qubit position i holds what old position
// order[i] held.
inline PureState permute_qubits(const PureState& s, std::span<const QubitId> order) {
  const std::size_t n = s.num_qubits();
  if (order.size() != n)
    throw InvalidArgumentError("permutation must list every qubit once");
  std::vector<bool> seen(n, false);
  for (QubitId q : order) {
    require_qubit(s, q);
    if (seen[q]) throw InvalidArgumentError("permutation repeats a qubit");
    seen[q] = true;
  }
  const std::vector<cx>& a = s.amplitudes();
  std::vector<cx> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::size_t j = 0;
    for (std::size_t pos = 0; pos < n; ++pos)
      j = (j << 1) | ((i >> (n - 1 - order[pos])) & 1u);
    out[j] = a[i];
  }
  return PureState::unchecked(std::move(out), n);
}

inline PureState tensor(const PureState& a, const PureState& b) {
  std::vector<cx> out(a.dim() * b.dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < b.dim(); ++j)
      out[i * b.dim() + j] = a.amplitude(i) * b.amplitude(j);
  return PureState::unchecked(std::move(out), a.num_qubits() + b.num_qubits());
}

// |<a|b>|: 1 iff the states agree up to a global phase.
inline double fidelity_up_to_global_phase(const PureState& a, const PureState& b) {
  if (a.dim() != b.dim())
    throw InvalidArgumentError("fidelity: dimension mismatch");
  cx ov{0.0, 0.0};
  for (std::size_t i = 0; i < a.dim(); ++i)
    ov += std::conj(a.amplitude(i)) * b.amplitude(i);
  return std::abs(ov);
}

// Probability that qubit q reads `bit` in the computational basis.
inline double bit_probability(const PureState& s, QubitId q, int bit) {
  require_qubit(s, q);
  const std::size_t n = s.num_qubits();
  const std::size_t mask = std::size_t{1} << (n - 1 - q);
  double p = 0.0;
  const std::vector<cx>& a = s.amplitudes();
  for (std::size_t i = 0; i < a.size(); ++i)
    if (static_cast<int>((i & mask) != 0) == bit) p += std::norm(a[i]);
  return p;
}

}  // namespace dfsim
