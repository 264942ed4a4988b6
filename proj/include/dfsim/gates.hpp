#pragma once

#include <array>
#include <cmath>
#include <numbers>

#include "dfsim/types.hpp"

namespace dfsim {

// Row-major 2x2 complex matrix.
struct Mat2 {
  std::array<cx, 4> m{};

  cx& operator()(int r, int c) { return m[2 * r + c]; }
  const cx& operator()(int r, int c) const { return m[2 * r + c]; }
};

inline Mat2 mat2(cx a, cx b, cx c, cx d) { return Mat2{{a, b, c, d}}; }

inline Mat2 operator*(const Mat2& a, const Mat2& b) {
  Mat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      r(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j);
  return r;
}

inline Mat2 adjoint(const Mat2& a) {
  return mat2(std::conj(a(0, 0)), std::conj(a(1, 0)), std::conj(a(0, 1)),
              std::conj(a(1, 1)));
}

// Frobenius distance to the identity of U^dag U; 0 for unitary U.
inline double unitarity_defect(const Mat2& u) {
  Mat2 g = adjoint(u) * u;
  double d = 0.0;
  d += std::norm(g(0, 0) - cx{1.0, 0.0});
  d += std::norm(g(0, 1));
  d += std::norm(g(1, 0));
  d += std::norm(g(1, 1) - cx{1.0, 0.0});
  return std::sqrt(d);
}

inline bool is_unitary(const Mat2& u, double eps = tol::kNorm) {
  return unitarity_defect(u) <= eps;
}

namespace gates {

inline const Mat2 I = mat2(1, 0, 0, 1);
inline const Mat2 X = mat2(0, 1, 1, 0);
inline const Mat2 Y = mat2(0, cx{0, -1}, cx{0, 1}, 0);
inline const Mat2 Z = mat2(1, 0, 0, -1);

inline Mat2 H() {
  const double s = 1.0 / std::numbers::sqrt2;
  return mat2(s, s, s, -s);
}

// diag(1, e^{i theta})
inline Mat2 Rz(double theta) {
  return mat2(1, 0, 0, std::polar(1.0, theta));
}

}  // namespace gates

}  // namespace dfsim
