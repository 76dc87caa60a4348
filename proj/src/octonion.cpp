#include "loopflat/octonion.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "loopflat/errors.hpp"

namespace loopflat {

namespace {

// Basis order: e1..e7 = i, j, k, x, ix, jx, kx. Entry (i-1, j-1) is e_i * e_j;
// index 0 means the product is sign * 1 (the real unit).
struct Entry {
  int s;
  int k;
};

constexpr Entry kTable[7][7] = {
    // i         j         k         x         ix        jx        kx
    {{-1, 0}, {+1, 3}, {-1, 2}, {+1, 5}, {-1, 4}, {-1, 7}, {+1, 6}},  // i
    {{-1, 3}, {-1, 0}, {+1, 1}, {+1, 6}, {+1, 7}, {-1, 4}, {-1, 5}},  // j
    {{+1, 2}, {-1, 1}, {-1, 0}, {+1, 7}, {-1, 6}, {+1, 5}, {-1, 4}},  // k
    {{-1, 5}, {-1, 6}, {-1, 7}, {-1, 0}, {+1, 1}, {+1, 2}, {+1, 3}},  // x
    {{+1, 4}, {-1, 7}, {+1, 6}, {-1, 1}, {-1, 0}, {-1, 3}, {+1, 2}},  // ix
    {{+1, 7}, {+1, 4}, {-1, 5}, {-1, 2}, {+1, 3}, {-1, 0}, {-1, 1}},  // jx
    {{-1, 6}, {+1, 5}, {+1, 4}, {-1, 3}, {-1, 2}, {+1, 1}, {-1, 0}},  // kx
};

}  // namespace

OctProduct oct_basis_product(int i, int j) {
  const Entry& e = kTable[i - 1][j - 1];
  return {e.s, e.k};
}

OctValue oct_mul_im(const Eigen::Matrix<double, 7, 1>& u, const Eigen::Matrix<double, 7, 1>& v) {
  OctValue out{0.0, Eigen::Matrix<double, 7, 1>::Zero()};
  for (int i = 1; i <= 7; ++i) {
    if (u(i - 1) == 0.0) continue;
    for (int j = 1; j <= 7; ++j) {
      if (v(j - 1) == 0.0) continue;
      OctProduct p = oct_basis_product(i, j);
      double c = u(i - 1) * v(j - 1) * p.sign;
      if (p.index == 0)
        out.re += c;
      else
        out.im(p.index - 1) += c;
    }
  }
  return out;
}

double oct_table_check() {
  using V7 = Eigen::Matrix<double, 7, 1>;
  double worst = 0.0;
  auto unit = [](int i) { return V7::Unit(i - 1).eval(); };
  // full product on (re, im) pairs
  auto mul = [](double ar, const V7& ai, double br, const V7& bi) {
    OctValue p = oct_mul_im(ai, bi);
    return std::pair<double, V7>(ar * br + p.re, (ar * bi + br * ai + p.im).eval());
  };
  for (int i = 1; i <= 7; ++i) {
    for (int j = 1; j <= 7; ++j) {
      OctProduct ij = oct_basis_product(i, j);
      OctProduct ji = oct_basis_product(j, i);
      if (i == j) {
        // unit squares are -1
        worst = std::max(worst, std::abs(static_cast<double>(ij.index)) +
                                    std::abs(static_cast<double>(ij.sign + 1)));
      } else {
        // anticommutativity
        worst = std::max(worst, static_cast<double>(ij.index != ji.index || ij.sign != -ji.sign));
      }
      // alternativity: a(ab) = (aa)b and (ab)b = a(bb)
      auto a = std::pair<double, V7>(0.0, unit(i));
      auto b = std::pair<double, V7>(0.0, unit(j));
      auto ab = mul(a.first, a.second, b.first, b.second);
      auto a_ab = mul(a.first, a.second, ab.first, ab.second);
      auto ab_b = mul(ab.first, ab.second, b.first, b.second);
      // (aa) = -1, (bb) = -1 for unit imaginaries
      worst = std::max(worst, std::abs(a_ab.first + b.first) + (a_ab.second + b.second).norm());
      worst = std::max(worst, std::abs(ab_b.first + a.first) + (ab_b.second + a.second).norm());
    }
  }
  return worst;
}

double derivation_residual(const RMat& d) {
  using V7 = Eigen::Matrix<double, 7, 1>;
  double worst = 0.0;
  for (int i = 1; i <= 7; ++i) {
    for (int j = 1; j <= 7; ++j) {
      OctProduct p = oct_basis_product(i, j);
      V7 lhs = V7::Zero();
      if (p.index != 0) lhs = p.sign * d.col(p.index - 1);
      OctValue r1 = oct_mul_im(d.col(i - 1), V7::Unit(j - 1));
      OctValue r2 = oct_mul_im(V7::Unit(i - 1), d.col(j - 1));
      worst = std::max(worst, (lhs - r1.im - r2.im).norm() + std::abs(r1.re + r2.re));
    }
  }
  return worst;
}

std::vector<RMat> g2_derivation_basis() {
  if (oct_table_check() > 0.0) throw NumericalError("octonion table failed self-consistency check");
  // Unknowns: the 49 entries of D, column-major. One 8-row block per basis pair.
  RMat a = RMat::Zero(8 * 49, 49);
  auto col_of = [](int r, int c) { return c * 7 + r; };  // entry D(r, c)
  int row = 0;
  for (int i = 1; i <= 7; ++i) {
    for (int j = 1; j <= 7; ++j) {
      // D(e_i e_j): the table value is sign * e_k (or real, contributing nothing)
      OctProduct p = oct_basis_product(i, j);
      if (p.index != 0)
        for (int r = 0; r < 7; ++r) a(row + 1 + r, col_of(r, p.index - 1)) += p.sign;
      // minus (D e_i) e_j: D e_i = sum_a D(a, i-1) e_{a+1}; e_{a+1} e_j contributes
      for (int aa = 1; aa <= 7; ++aa) {
        OctProduct q = oct_basis_product(aa, j);
        if (q.index == 0)
          a(row, col_of(aa - 1, i - 1)) -= q.sign;
        else
          a(row + q.index, col_of(aa - 1, i - 1)) -= q.sign;
      }
      // minus e_i (D e_j)
      for (int bb = 1; bb <= 7; ++bb) {
        OctProduct q = oct_basis_product(i, bb);
        if (q.index == 0)
          a(row, col_of(bb - 1, j - 1)) -= q.sign;
        else
          a(row + q.index, col_of(bb - 1, j - 1)) -= q.sign;
      }
      row += 8;
    }
  }
  Eigen::JacobiSVD<RMat> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  std::vector<int> null_cols;
  for (int i = 0; i < 49; ++i)
    if (i >= sv.size() || sv(i) < 1e-10 * sv(0)) null_cols.push_back(i);
  RMat n(static_cast<int>(null_cols.size()), 49);
  for (std::size_t i = 0; i < null_cols.size(); ++i) n.row(static_cast<Eigen::Index>(i)) = svd.matrixV().col(null_cols[i]).transpose();

  // Reduced row echelon form: canonical for the subspace, so the basis ordering
  // (by pivot position in the column-major vectorization) is stable.
  const int nr = static_cast<int>(n.rows());
  int lead = 0;
  for (int r = 0; r < nr && lead < 49; ++r) {
    int piv = -1;
    for (; lead < 49; ++lead) {
      int best = r;
      for (int rr = r; rr < nr; ++rr)
        if (std::abs(n(rr, lead)) > std::abs(n(best, lead))) best = rr;
      if (std::abs(n(best, lead)) > 1e-9) {
        n.row(r).swap(n.row(best));
        piv = lead;
        break;
      }
    }
    if (piv < 0) break;
    n.row(r) /= n(r, piv);
    for (int rr = 0; rr < nr; ++rr)
      if (rr != r) n.row(rr) -= n(rr, piv) * n.row(r);
    ++lead;
  }

  std::vector<RMat> basis;
  basis.reserve(nr);
  for (int r = 0; r < nr; ++r) {
    RVec v = n.row(r).transpose();
    RMat d = Eigen::Map<const RMat>(v.data(), 7, 7);
    if (derivation_residual(d) > 1e-8)
      throw NumericalError("derivation null-space vector violates the Leibniz identity");
    basis.push_back(d);
  }
  return basis;
}

}  // namespace loopflat
