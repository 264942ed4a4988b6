#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "dfsim/gates.hpp"
#include "dfsim/types.hpp"

namespace dfsim {

// Dense density operator over n qubits, row-major, MSB-first basis indexing
// (same convention as PureState). Not required to be normalized: the oracle
// channel builders evolve sector-conditioned pieces and sum them at the end.
class DensityState {
 public:
  DensityState() = default;
  DensityState(std::size_t num_qubits, std::vector<cx> entries)
      : n_(num_qubits), m_(std::move(entries)) {
    const std::size_t d = dim();
    if (m_.size() != d * d)
      throw InvalidArgumentError("density matrix has wrong size");
  }

  static DensityState zero(std::size_t num_qubits) {
    const std::size_t d = std::size_t{1} << num_qubits;
    return DensityState(num_qubits, std::vector<cx>(d * d, cx{0, 0}));
  }

  // |r><c| matrix unit on the full register.
  static DensityState matrix_unit(std::size_t num_qubits, std::size_t r,
                                  std::size_t c) {
    DensityState rho = zero(num_qubits);
    rho.at(r, c) = cx{1.0, 0.0};
    return rho;
  }

  std::size_t num_qubits() const { return n_; }
  std::size_t dim() const { return std::size_t{1} << n_; }
  cx& at(std::size_t r, std::size_t c) { return m_[r * dim() + c]; }
  const cx& at(std::size_t r, std::size_t c) const { return m_[r * dim() + c]; }
  std::vector<cx>& raw() { return m_; }
  const std::vector<cx>& raw() const { return m_; }

  cx trace() const {
    cx t{0, 0};
    const std::size_t d = dim();
    for (std::size_t i = 0; i < d; ++i) t += m_[i * d + i];
    return t;
  }

  DensityState& operator+=(const DensityState& o) {
    if (o.n_ != n_) throw InvalidArgumentError("density dimension mismatch");
    for (std::size_t i = 0; i < m_.size(); ++i) m_[i] += o.m_[i];
    return *this;
  }

 private:
  std::size_t n_ = 0;
  std::vector<cx> m_;
};

// rho -> U rho U^dag for a single-qubit U.
inline void conjugate_1q(DensityState& rho, QubitId q, const Mat2& u) {
  const std::size_t n = rho.num_qubits();
  if (q >= n) throw InvalidArgumentError("qubit id out of range");
  const std::size_t d = rho.dim();
  const std::size_t mask = std::size_t{1} << (n - 1 - q);
  std::vector<cx>& m = rho.raw();
  // Left multiply rows.
  for (std::size_t r = 0; r < d; ++r) {
    if (r & mask) continue;
    const std::size_t r1 = r | mask;
    for (std::size_t c = 0; c < d; ++c) {
      const cx a0 = m[r * d + c];
      const cx a1 = m[r1 * d + c];
      m[r * d + c] = u(0, 0) * a0 + u(0, 1) * a1;
      m[r1 * d + c] = u(1, 0) * a0 + u(1, 1) * a1;
    }
  }
  // Right multiply columns by U^dag.
  for (std::size_t c = 0; c < d; ++c) {
    if (c & mask) continue;
    const std::size_t c1 = c | mask;
    for (std::size_t r = 0; r < d; ++r) {
      const cx a0 = m[r * d + c];
      const cx a1 = m[r * d + c1];
      m[r * d + c] = a0 * std::conj(u(0, 0)) + a1 * std::conj(u(0, 1));
      m[r * d + c1] = a0 * std::conj(u(1, 0)) + a1 * std::conj(u(1, 1));
    }
  }
}

namespace detail {

inline int density_bit(std::size_t idx, QubitId q, std::size_t n) {
  return static_cast<int>((idx >> (n - 1 - q)) & 1u);
}

}  // namespace detail

// rho -> P rho P for the parity projector keeping the given parity sector
// (1 = aligned {00,11}, 0 = antiparallel {01,10}) on qubits (a, b).
inline void project_parity(DensityState& rho, QubitId a, QubitId b, int parity) {
  const std::size_t n = rho.num_qubits();
  const std::size_t d = rho.dim();
  std::vector<cx>& m = rho.raw();
  std::vector<char> in_sector(d);
  for (std::size_t i = 0; i < d; ++i) {
    const int same =
        detail::density_bit(i, a, n) == detail::density_bit(i, b, n) ? 1 : 0;
    in_sector[i] = same == parity;
  }
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c)
      if (!in_sector[r] || !in_sector[c]) m[r * d + c] = cx{0, 0};
}

// rho -> P rho P for the basis projector |bits><bits| on qubits (a, b).
inline void project_pair_basis(DensityState& rho, QubitId a, QubitId b, int bits) {
  const std::size_t n = rho.num_qubits();
  const std::size_t d = rho.dim();
  std::vector<cx>& m = rho.raw();
  std::vector<char> keep(d);
  for (std::size_t i = 0; i < d; ++i) {
    const int v = (detail::density_bit(i, a, n) << 1) | detail::density_bit(i, b, n);
    keep[i] = v == bits;
  }
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c)
      if (!keep[r] || !keep[c]) m[r * d + c] = cx{0, 0};
}

// rho -> P rho P for P = |v><v| on an ordered qubit list (v normalized,
// MSB-first over the listed qubits).
inline void project_rank1(DensityState& rho, std::span<const QubitId> qubits,
                          std::span<const cx> v) {
  const std::size_t n = rho.num_qubits();
  const std::size_t k = qubits.size();
  const std::size_t sub = std::size_t{1} << k;
  if (v.size() != sub) throw InvalidArgumentError("rank1 vector has wrong size");
  const std::size_t d = rho.dim();
  std::vector<std::size_t> bitmask(k);
  std::size_t support_mask = 0;
  for (std::size_t j = 0; j < k; ++j) {
    if (qubits[j] >= n) throw InvalidArgumentError("qubit id out of range");
    bitmask[j] = std::size_t{1} << (n - 1 - qubits[j]);
    support_mask |= bitmask[j];
  }
  std::vector<cx>& m = rho.raw();
  std::vector<std::size_t> addr(sub);
  // Left: rows -> v <v|rows>.
  for (std::size_t base = 0; base < d; ++base) {
    if (base & support_mask) continue;
    for (std::size_t sidx = 0; sidx < sub; ++sidx) {
      std::size_t a = base;
      for (std::size_t j = 0; j < k; ++j)
        if ((sidx >> (k - 1 - j)) & 1u) a |= bitmask[j];
      addr[sidx] = a;
    }
    for (std::size_t c = 0; c < d; ++c) {
      cx ov{0, 0};
      for (std::size_t sidx = 0; sidx < sub; ++sidx)
        ov += std::conj(v[sidx]) * m[addr[sidx] * d + c];
      for (std::size_t sidx = 0; sidx < sub; ++sidx)
        m[addr[sidx] * d + c] = v[sidx] * ov;
    }
  }
  // Right: columns -> <cols|v> v^dag.
  for (std::size_t base = 0; base < d; ++base) {
    if (base & support_mask) continue;
    for (std::size_t sidx = 0; sidx < sub; ++sidx) {
      std::size_t a = base;
      for (std::size_t j = 0; j < k; ++j)
        if ((sidx >> (k - 1 - j)) & 1u) a |= bitmask[j];
      addr[sidx] = a;
    }
    for (std::size_t r = 0; r < d; ++r) {
      cx ov{0, 0};
      for (std::size_t sidx = 0; sidx < sub; ++sidx)
        ov += m[r * d + addr[sidx]] * v[sidx];
      for (std::size_t sidx = 0; sidx < sub; ++sidx)
        m[r * d + addr[sidx]] = ov * std::conj(v[sidx]);
    }
  }
}

// Appends k fresh qubits in |0...0> at the bottom of the register.
inline DensityState extend_with_zeros(const DensityState& rho, std::size_t k) {
  const std::size_t n = rho.num_qubits();
  const std::size_t d = rho.dim();
  DensityState out = DensityState::zero(n + k);
  const std::size_t dd = out.dim();
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c)
      out.raw()[(r << k) * dd + (c << k)] = rho.at(r, c);
  return out;
}

// Traces out the listed qubits.
inline DensityState partial_trace(const DensityState& rho,
                                  std::span<const QubitId> remove) {
  const std::size_t n = rho.num_qubits();
  std::vector<bool> gone(n, false);
  for (QubitId q : remove) {
    if (q >= n) throw InvalidArgumentError("qubit id out of range");
    if (gone[q]) throw InvalidArgumentError("qubit listed twice");
    gone[q] = true;
  }
  const std::size_t nk = n - remove.size();
  if (nk == 0) throw InvalidArgumentError("cannot trace out the whole register");
  DensityState out = DensityState::zero(nk);
  const std::size_t d = rho.dim();
  std::vector<std::size_t> kept_of(d), removed_of(d);
  for (std::size_t i = 0; i < d; ++i) {
    std::size_t ki = 0, ri = 0;
    for (QubitId q = 0; q < n; ++q) {
      const std::size_t b = (i >> (n - 1 - q)) & 1u;
      if (gone[q]) ri = (ri << 1) | b; else ki = (ki << 1) | b;
    }
    kept_of[i] = ki;
    removed_of[i] = ri;
  }
  const std::size_t dk = out.dim();
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) {
      if (removed_of[r] != removed_of[c]) continue;
      out.raw()[kept_of[r] * dk + kept_of[c]] += rho.at(r, c);
    }
  return out;
}

// Reorders the register: new position i holds what old position order[i] held.
inline DensityState permute_density(const DensityState& rho,
                                    std::span<const QubitId> order) {
  const std::size_t n = rho.num_qubits();
  if (order.size() != n)
    throw InvalidArgumentError("permutation must list every qubit once");
  const std::size_t d = rho.dim();
  std::vector<std::size_t> map(d);
  for (std::size_t i = 0; i < d; ++i) {
    std::size_t j = 0;
    for (std::size_t pos = 0; pos < n; ++pos)
      j = (j << 1) | ((i >> (n - 1 - order[pos])) & 1u);
    map[i] = j;
  }
  DensityState out = DensityState::zero(n);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c)
      out.raw()[map[r] * d + map[c]] = rho.at(r, c);
  return out;
}

}  // namespace dfsim
