#pragma once

#include <array>
#include <numbers>
#include <vector>

#include "dfsim/choi.hpp"
#include "dfsim/density.hpp"
#include "dfsim/protocols.hpp"

namespace dfsim {

// Density-matrix reimplementation of the protocol channels, built directly
// from the projector and unitary definitions. It never calls the statevector
// engine: measurements become sector sums conditioned exactly where a later
// correction depends on the outcome. Used as the independent cross-check for
// the tomography route.

namespace oracle_detail {

inline int phys_pair_index(int logical) { return logical == 0 ? 0b01 : 0b10; }

// Controlled-phase block channel on (control, target) with its ancilla;
// the ancilla is traced out before returning.
inline DensityState cr_channel(DensityState rho, QubitId control, QubitId target,
                               QubitId ancilla, const PhaseParams& ph) {
  const double r = 1.0 / std::numbers::sqrt2;
  conjugate_1q(rho, ancilla, gates::H());
  conjugate_1q(rho, ancilla, gates::Rz(ph.phi_t));
  DensityState acc = DensityState::zero(rho.num_qubits());
  const std::array<cx, 2> plus{cx{r, 0}, cx{r, 0}};
  const std::array<cx, 2> minus{cx{r, 0}, cx{-r, 0}};
  const std::array<QubitId, 1> anc{ancilla};
  for (int p1 = 0; p1 < 2; ++p1) {
    DensityState s1 = rho;
    project_parity(s1, control, ancilla, p1);
    conjugate_1q(s1, ancilla, gates::H());
    conjugate_1q(s1, ancilla, gates::Rz(ph.phi_tp));
    for (int p2 = 0; p2 < 2; ++p2) {
      DensityState s2 = s1;
      project_parity(s2, target, ancilla, p2);
      DensityState up = s2;
      project_rank1(up, anc, plus);
      DensityState down = std::move(s2);
      project_rank1(down, anc, minus);
      conjugate_1q(down, target, gates::Z);
      up += down;
      const auto [ac, at] = cr_correction_phases(p1, p2, ph);
      conjugate_1q(up, control, gates::Rz(ac));
      conjugate_1q(up, target, gates::Rz(at));
      acc += up;
    }
  }
  const std::array<QubitId, 1> gone{ancilla};
  return partial_trace(acc, gone);
}

// |00> pair -> (|01>+|10>)/sqrt2 as a channel (both parity branches).
inline DensityState prepare_pair_channel(DensityState rho, const LogicalQubit& pair) {
  conjugate_1q(rho, pair.first, gates::H());
  conjugate_1q(rho, pair.second, gates::H());
  DensityState anti = rho;
  project_parity(anti, pair.first, pair.second, 0);
  DensityState align = std::move(rho);
  project_parity(align, pair.first, pair.second, 1);
  conjugate_1q(align, pair.second, gates::X);
  anti += align;
  return anti;
}

// Bell-basis detector channel on `pair` with the sigma_x sigma_x correction
// applied to `fixup` in the odd branch; `pair` is then traced out. The leaked
// span{|00>,|11>} sector passes through uncorrected (zero on clean inputs).
inline DensityState detector_channel(DensityState rho, const LogicalQubit& pair,
                                     const LogicalQubit& fixup) {
  const double r = 1.0 / std::numbers::sqrt2;
  const std::array<cx, 4> psi_plus{cx{0, 0}, cx{r, 0}, cx{r, 0}, cx{0, 0}};
  const std::array<cx, 4> psi_minus{cx{0, 0}, cx{r, 0}, cx{-r, 0}, cx{0, 0}};
  const std::array<QubitId, 2> support{pair.first, pair.second};
  DensityState even = rho;
  project_rank1(even, support, psi_plus);
  DensityState odd = rho;
  project_rank1(odd, support, psi_minus);
  conjugate_1q(odd, fixup.first, gates::X);
  conjugate_1q(odd, fixup.second, gates::X);
  DensityState leak = std::move(rho);
  {
    // Projector onto span{|00>,|11>} = 1 - psi+ - psi-: zero the antiparallel
    // sector on both sides.
    project_parity(leak, pair.first, pair.second, 1);
  }
  even += odd;
  even += leak;
  return partial_trace(even, support);
}

// Teleported-Hadamard channel on `pair`, preserving the register layout:
// allocate a fresh pair + block ancilla on top, run the block, trace the
// consumed qubits, and move the fresh pair back into the original slots.
inline DensityState hadamard_block_channel(DensityState rho,
                                           const LogicalQubit& pair,
                                           const PhaseParams& ph) {
  const std::size_t n = rho.num_qubits();
  rho = extend_with_zeros(rho, 3);
  const LogicalQubit fresh{n, n + 1};
  rho = prepare_pair_channel(std::move(rho), fresh);
  rho = cr_channel(std::move(rho), pair.first, fresh.first, n + 2, ph);
  rho = detector_channel(std::move(rho), pair, fresh);
  // Register is back to n qubits; the fresh pair slid down to (n-2, n-1).
  std::vector<QubitId> contracted_pos(n, 0);
  {
    QubitId pos = 0;
    for (QubitId q = 0; q < n; ++q)
      if (q != pair.first && q != pair.second) contracted_pos[q] = pos++;
  }
  std::vector<QubitId> order(n);
  for (QubitId p = 0; p < n; ++p) {
    if (p == pair.first) order[p] = n - 2;
    else if (p == pair.second) order[p] = n - 1;
    else order[p] = contracted_pos[p];
  }
  return permute_density(rho, order);
}

}  // namespace oracle_detail

// Logical channel of a protocol, evaluated on matrix-unit inputs through the
// density-matrix path and assembled into a Choi matrix.
inline ChoiMatrix oracle_channel(const ProtocolDescriptor& d) {
  using oracle_detail::phys_pair_index;
  const std::size_t width = protocol_logical_width(d);
  const std::size_t dl = std::size_t{1} << width;
  ChoiMatrix choi = ChoiMatrix::zero(dl, dl);

  // E(|j><k|) for one matrix unit; j <= k below, mirrored afterwards.
  auto unit_block = [&](std::size_t j, std::size_t k) -> std::vector<cx> {
    std::vector<cx> block(dl * dl);
    DensityState rho;
    if (d.name == "rz") {
      rho = DensityState::matrix_unit(
          2, static_cast<std::size_t>(phys_pair_index(static_cast<int>(j))),
          static_cast<std::size_t>(phys_pair_index(static_cast<int>(k))));
      conjugate_1q(rho, 0, gates::Rz(d.theta));
      for (std::size_t m = 0; m < dl; ++m)
        for (std::size_t n = 0; n < dl; ++n)
          block[m * dl + n] =
              rho.at(static_cast<std::size_t>(phys_pair_index(static_cast<int>(m))),
                     static_cast<std::size_t>(phys_pair_index(static_cast<int>(n))));
      return block;
    }
    if (d.name == "hadamard") {
      // Register: input pair (0,1), fresh pair (2,3), block ancilla 4.
      const std::size_t rj = static_cast<std::size_t>(phys_pair_index(static_cast<int>(j))) << 3;
      const std::size_t rk = static_cast<std::size_t>(phys_pair_index(static_cast<int>(k))) << 3;
      rho = DensityState::matrix_unit(5, rj, rk);
      rho = oracle_detail::prepare_pair_channel(std::move(rho), LogicalQubit{2, 3});
      rho = oracle_detail::cr_channel(std::move(rho), 0, 2, 4, d.phases);
      rho = oracle_detail::detector_channel(std::move(rho), LogicalQubit{0, 1},
                                            LogicalQubit{2, 3});
      for (std::size_t m = 0; m < dl; ++m)
        for (std::size_t n = 0; n < dl; ++n)
          block[m * dl + n] =
              rho.at(static_cast<std::size_t>(phys_pair_index(static_cast<int>(m))),
                     static_cast<std::size_t>(phys_pair_index(static_cast<int>(n))));
      return block;
    }
    if (d.name == "cr-block") {
      rho = DensityState::matrix_unit(3, j << 1, k << 1);
      rho = oracle_detail::cr_channel(std::move(rho), 0, 1, 2, d.phases);
      for (std::size_t m = 0; m < dl; ++m)
        for (std::size_t n = 0; n < dl; ++n)
          block[m * dl + n] = rho.at(m, n);
      return block;
    }
    if (d.name == "cphase") {
      // Register: pair A (0,1), ancilla pair (2,3), pair B (4,5).
      auto embed = [](std::size_t logical) {
        const int a = static_cast<int>(logical >> 1), b = static_cast<int>(logical & 1);
        return (static_cast<std::size_t>(phys_pair_index(a)) << 4) |
               static_cast<std::size_t>(phys_pair_index(b));
      };
      rho = DensityState::matrix_unit(6, embed(j), embed(k));
      rho = oracle_detail::prepare_pair_channel(std::move(rho), LogicalQubit{2, 3});
      {
        DensityState align = rho;
        project_parity(align, 0, 2, 1);
        DensityState anti = std::move(rho);
        project_parity(anti, 0, 2, 0);
        conjugate_1q(anti, 2, gates::X);
        conjugate_1q(anti, 3, gates::X);
        align += anti;
        rho = std::move(align);
      }
      rho = oracle_detail::hadamard_block_channel(std::move(rho), LogicalQubit{2, 3},
                                                  d.phases);
      DensityState acc = DensityState::zero(6);
      for (int p46 = 0; p46 < 2; ++p46) {
        DensityState sector = rho;
        project_parity(sector, 3, 5, p46);
        sector = oracle_detail::hadamard_block_channel(std::move(sector),
                                                       LogicalQubit{2, 3}, d.phases);
        for (int bits = 0; bits < 4; ++bits) {
          DensityState branch = sector;
          project_pair_basis(branch, 2, 3, bits);
          if (bits == 0b01 || bits == 0b10) {
            if (p46 == 0) conjugate_1q(branch, 0, gates::Z);
            if (bits == 0b10) conjugate_1q(branch, 4, gates::Z);
          }
          acc += branch;
        }
      }
      const std::array<QubitId, 2> anc{2, 3};
      rho = partial_trace(acc, anc);
      auto out_embed = [](std::size_t logical) {
        const int a = static_cast<int>(logical >> 1), b = static_cast<int>(logical & 1);
        return (static_cast<std::size_t>(phys_pair_index(a)) << 2) |
               static_cast<std::size_t>(phys_pair_index(b));
      };
      for (std::size_t m = 0; m < dl; ++m)
        for (std::size_t n = 0; n < dl; ++n)
          block[m * dl + n] = rho.at(out_embed(m), out_embed(n));
      return block;
    }
    throw InvalidArgumentError("unknown protocol: " + d.name);
  };

  for (std::size_t j = 0; j < dl; ++j) {
    for (std::size_t k = j; k < dl; ++k) {
      const std::vector<cx> block = unit_block(j, k);
      for (std::size_t m = 0; m < dl; ++m)
        for (std::size_t n = 0; n < dl; ++n) {
          choi.at(j * dl + m, k * dl + n) = block[m * dl + n];
          if (j != k)
            choi.at(k * dl + n, j * dl + m) = std::conj(block[m * dl + n]);
        }
    }
  }
  return choi;
}

}  // namespace dfsim
