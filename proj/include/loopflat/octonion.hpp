#pragma once

#include <array>

#include "loopflat/linalg.hpp"

namespace loopflat {

/// Signed result of a basis product of imaginary octonion units.
/// index 0 encodes the real unit, 1..7 the imaginary basis i, j, k, x, ix, jx, kx.
struct OctProduct {
  int sign;
  int index;
};

/// e_i * e_j for i, j in 1..7 (quaternionic block extended by x).
OctProduct oct_basis_product(int i, int j);

/// Product of two imaginary octonions, returned as (real part, imaginary part).
struct OctValue {
  double re;
  Eigen::Matrix<double, 7, 1> im;
};
OctValue oct_mul_im(const Eigen::Matrix<double, 7, 1>& u, const Eigen::Matrix<double, 7, 1>& v);

/// Table self-consistency: anticommutativity, unit squares, and alternativity
/// a(ab) = (aa)b, (ab)b = a(bb) over all 49 basis pairs. Returns max residual.
double oct_table_check();

/// Residual of the derivation identity D(uv) = (Du)v + u(Dv) over all 49 basis pairs.
double derivation_residual(const RMat& d);

/// Basis of the derivation algebra of the octonions acting on the imaginary part,
/// as 7x7 real matrices. Computed as the null space of the derivation constraints
/// and brought to reduced row echelon form so the ordering (by pivot column of the
/// vectorized matrices, column-major) is reproducible.
std::vector<RMat> g2_derivation_basis();

}  // namespace loopflat
