#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "dfsim/branch.hpp"
#include "dfsim/protocols.hpp"
#include "dfsim/types.hpp"

namespace dfsim {

// Choi matrix of a channel E from a dim_in- to a dim_out-dimensional space,
// built on the unnormalized pair state sum_j |jj>: the (j,k) input block of
// the matrix is E(|j><k|). Row index = j * dim_out + m. Under this convention
// a trace-preserving channel satisfies Tr_out(C) = identity on the input
// space, and complete positivity is positivity of C as a matrix.
struct ChoiMatrix {
  std::size_t dim_in = 0;
  std::size_t dim_out = 0;
  std::vector<cx> m;  // row-major, (dim_in*dim_out)^2 entries

  std::size_t dim() const { return dim_in * dim_out; }

  cx& at(std::size_t r, std::size_t c) { return m[r * dim() + c]; }
  const cx& at(std::size_t r, std::size_t c) const { return m[r * dim() + c]; }

  static ChoiMatrix zero(std::size_t dim_in, std::size_t dim_out) {
    ChoiMatrix c{dim_in, dim_out, {}};
    c.m.assign(c.dim() * c.dim(), cx{0, 0});
    return c;
  }
};

// Choi matrix of rho -> U rho U^dag for a d x d unitary (row-major).
inline ChoiMatrix choi_of_unitary(std::span<const cx> u, std::size_t d) {
  if (u.size() != d * d) throw InvalidArgumentError("unitary has wrong size");
  ChoiMatrix c = ChoiMatrix::zero(d, d);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t k = 0; k < d; ++k)
      for (std::size_t m = 0; m < d; ++m)
        for (std::size_t n = 0; n < d; ++n)
          c.at(j * d + m, k * d + n) = u[m * d + j] * std::conj(u[n * d + k]);
  return c;
}

// Choi matrix of rho -> sum_i K_i rho K_i^dag for square Kraus operators.
inline ChoiMatrix choi_of_kraus(std::span<const std::vector<cx>> kraus,
                                std::size_t d) {
  ChoiMatrix c = ChoiMatrix::zero(d, d);
  for (const std::vector<cx>& k_op : kraus) {
    if (k_op.size() != d * d)
      throw InvalidArgumentError("kraus operator has wrong size");
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t k = 0; k < d; ++k)
        for (std::size_t m = 0; m < d; ++m)
          for (std::size_t n = 0; n < d; ++n)
            c.at(j * d + m, k * d + n) +=
                k_op[m * d + j] * std::conj(k_op[n * d + k]);
  }
  return c;
}

// tr(A^dag B) / sqrt(tr(A^dag A) tr(B^dag B)); 1 iff the channels are equal
// (up to overall scale). Stated on the raw matrices, so it applies to any
// pair of same-shaped Chois.
inline double choi_fidelity(const ChoiMatrix& a, const ChoiMatrix& b) {
  if (a.dim_in != b.dim_in || a.dim_out != b.dim_out)
    throw InvalidArgumentError("choi_fidelity: shape mismatch");
  cx ip{0, 0};
  double na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.m.size(); ++i) {
    ip += std::conj(a.m[i]) * b.m[i];
    na += std::norm(a.m[i]);
    nb += std::norm(b.m[i]);
  }
  if (na <= 0.0 || nb <= 0.0)
    throw InvalidArgumentError("choi_fidelity: zero matrix");
  return ip.real() / std::sqrt(na * nb);
}

// Max deviation of Tr_out(C) from the identity on the input space; ~0 for a
// trace-preserving channel under the unnormalized-pair convention.
inline double trace_preservation_deviation(const ChoiMatrix& c) {
  double worst = 0.0;
  for (std::size_t j = 0; j < c.dim_in; ++j)
    for (std::size_t k = 0; k < c.dim_in; ++k) {
      cx acc{0, 0};
      for (std::size_t m = 0; m < c.dim_out; ++m)
        acc += c.at(j * c.dim_out + m, k * c.dim_out + m);
      const cx want = (j == k) ? cx{1, 0} : cx{0, 0};
      worst = std::max(worst, std::abs(acc - want));
    }
  return worst;
}

inline double hermiticity_deviation(const ChoiMatrix& c) {
  double worst = 0.0;
  const std::size_t d = c.dim();
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t s = r; s < d; ++s)
      worst = std::max(worst, std::abs(c.at(r, s) - std::conj(c.at(s, r))));
  return worst;
}

// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations.
inline std::vector<double> hermitian_eigenvalues(std::vector<cx> a,
                                                 std::size_t n) {
  if (a.size() != n * n) throw InvalidArgumentError("matrix has wrong size");
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a[p * n + q]);
    if (off < 1e-26) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cx apq = a[p * n + q];
        const double r = std::abs(apq);
        if (r < 1e-18) continue;
        const double phi = std::arg(apq);
        const double app = a[p * n + p].real();
        const double aqq = a[q * n + q].real();
        const double theta = 0.5 * std::atan2(2.0 * r, app - aqq);
        const double cth = std::cos(theta), sth = std::sin(theta);
        const cx eip = std::polar(1.0, phi);
        const cx eim = std::conj(eip);
        // Columns: A <- A V with V mixing columns p, q.
        for (std::size_t i = 0; i < n; ++i) {
          const cx aip = a[i * n + p];
          const cx aiq = a[i * n + q];
          a[i * n + p] = aip * cth + aiq * eip * sth;
          a[i * n + q] = -aip * sth + aiq * eip * cth;
        }
        // Rows: A <- V^dag A.
        for (std::size_t j = 0; j < n; ++j) {
          const cx apj = a[p * n + j];
          const cx aqj = a[q * n + j];
          a[p * n + j] = apj * cth + aqj * eim * sth;
          a[q * n + j] = -apj * sth + aqj * eim * cth;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a[i * n + i].real();
  return ev;
}

// Smallest eigenvalue of the Choi matrix; >= -1e-10 for a completely
// positive channel.
inline double min_choi_eigenvalue(const ChoiMatrix& c) {
  const std::vector<double> ev = hermitian_eigenvalues(c.m, c.dim());
  double lo = ev.empty() ? 0.0 : ev[0];
  for (double e : ev) lo = std::min(lo, e);
  return lo;
}

// ---------------------------------------------------------------------------
// Engine-route channel reconstruction by state tomography.

// Per-qubit tomography inputs: |0>, |1>, |+>, |->, |+i>, |-i>.
inline std::array<LogicalAmplitudes, 6> tomography_states() {
  const double r = 1.0 / std::numbers::sqrt2;
  return {LogicalAmplitudes{cx{1, 0}, cx{0, 0}},
          LogicalAmplitudes{cx{0, 0}, cx{1, 0}},
          LogicalAmplitudes{cx{r, 0}, cx{r, 0}},
          LogicalAmplitudes{cx{r, 0}, cx{-r, 0}},
          LogicalAmplitudes{cx{r, 0}, cx{0, r}},
          LogicalAmplitudes{cx{r, 0}, cx{0, -r}}};
}

// Coefficient c_s in |j><k| = sum_s c_s |phi_s><phi_s| over the six states:
//   |0><1| = (X + iY)/2 = (rho_+ - rho_-)/2 + i (rho_{+i} - rho_{-i})/2.
inline cx tomography_coefficient(int j, int k, int s) {
  if (j == k) return (s == j) ? cx{1, 0} : cx{0, 0};
  if (j == 0 && k == 1) {
    switch (s) {
      case 2: return cx{0.5, 0};
      case 3: return cx{-0.5, 0};
      case 4: return cx{0, 0.5};
      case 5: return cx{0, -0.5};
      default: return cx{0, 0};
    }
  }
  // |1><0| is the conjugate expansion.
  return std::conj(tomography_coefficient(0, 1, s));
}

// Reconstructs the protocol's logical channel by running every measurement
// branch on a tomographically complete set of product inputs and resumming
// the branch outputs as densities. Independent of the correction bookkeeping
// inside any single branch: only final states and probabilities enter.
inline ChoiMatrix protocol_channel(const ProtocolDescriptor& d,
                                   std::size_t max_branches = (1u << 15)) {
  const std::size_t width = protocol_logical_width(d);
  const std::size_t dl = std::size_t{1} << width;
  const std::array<LogicalAmplitudes, 6> basis = tomography_states();
  std::size_t n_inputs = 1;
  for (std::size_t i = 0; i < width; ++i) n_inputs *= 6;
  // rho[t] = E(|phi_t><phi_t|) for each product input t.
  std::vector<std::vector<cx>> rho(n_inputs, std::vector<cx>(dl * dl, cx{0, 0}));
  for (std::size_t t = 0; t < n_inputs; ++t) {
    ProtocolInput in;
    in.a = basis[width == 1 ? t : t / 6];
    if (width == 2) in.b = basis[t % 6];
    const BranchTree tree =
        enumerate_branches(d, protocol_initial_state(d, in), max_branches);
    for (const Branch& b : tree.branches) {
      const std::vector<cx> amps =
          extract_output_amplitudes(b.state, b.output_pairs);
      if (amps.size() != dl)
        throw InvalidArgumentError("branch output has unexpected dimension");
      for (std::size_t r = 0; r < dl; ++r)
        for (std::size_t c = 0; c < dl; ++c)
          rho[t][r * dl + c] += b.probability * amps[r] * std::conj(amps[c]);
    }
  }
  ChoiMatrix choi = ChoiMatrix::zero(dl, dl);
  for (std::size_t J = 0; J < dl; ++J)
    for (std::size_t K = 0; K < dl; ++K) {
      // E(|J><K|) as a linear combination of the measured densities.
      std::vector<cx> block(dl * dl, cx{0, 0});
      for (std::size_t t = 0; t < n_inputs; ++t) {
        cx coeff{1, 0};
        for (std::size_t qpos = 0; qpos < width; ++qpos) {
          const int jq = static_cast<int>((J >> (width - 1 - qpos)) & 1u);
          const int kq = static_cast<int>((K >> (width - 1 - qpos)) & 1u);
          const int sq = static_cast<int>(
              width == 1 ? t : (qpos == 0 ? t / 6 : t % 6));
          coeff *= tomography_coefficient(jq, kq, sq);
          if (coeff == cx{0, 0}) break;
        }
        if (coeff == cx{0, 0}) continue;
        for (std::size_t i = 0; i < block.size(); ++i)
          block[i] += coeff * rho[t][i];
      }
      for (std::size_t m = 0; m < dl; ++m)
        for (std::size_t n = 0; n < dl; ++n)
          choi.at(J * dl + m, K * dl + n) = block[m * dl + n];
    }
  return choi;
}

// Choi of the gate the protocol is meant to implement.
inline ChoiMatrix ideal_channel_choi(const ProtocolDescriptor& d) {
  if (d.name == "rz") {
    const std::vector<cx> u{cx{1, 0}, cx{0, 0}, cx{0, 0},
                            std::polar(1.0, d.theta)};
    return choi_of_unitary(u, 2);
  }
  if (d.name == "hadamard") {
    const double r = 1.0 / std::numbers::sqrt2;
    const std::vector<cx> u{cx{r, 0}, cx{r, 0}, cx{r, 0}, cx{-r, 0}};
    return choi_of_unitary(u, 2);
  }
  if (d.name == "cphase" || d.name == "cr-block") {
    std::vector<cx> u(16, cx{0, 0});
    u[0] = u[5] = u[10] = cx{1, 0};
    u[15] = cx{-1, 0};
    return choi_of_unitary(u, 4);
  }
  throw InvalidArgumentError("unknown protocol: " + d.name);
}

}  // namespace dfsim
