#include "loopflat/cartan_align.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include "loopflat/errors.hpp"

namespace loopflat {

namespace {

constexpr double kRankTol = 1e-8;
constexpr double kRetainedSv = 1e-6;

// Projection of the subspace basis onto V, as the matrix of V-coordinates.
RMat projection_matrix(const SubspaceBasis& v, const std::vector<Mat>& basis) {
  RMat p(v.dim(), static_cast<int>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) p.col(static_cast<Eigen::Index>(i)) = v.coords(basis[i]);
  return p;
}

int numeric_rank(const RMat& p, double tol, double* smallest_retained = nullptr) {
  Eigen::JacobiSVD<RMat> svd(p);
  int r = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > tol) ++r;
  if (smallest_retained) *smallest_retained = r > 0 ? svd.singularValues()(r - 1) : 0.0;
  return r;
}

std::vector<Mat> conjugate_all(const std::vector<Mat>& basis, const Mat& g, const Mat& ginv) {
  std::vector<Mat> out;
  out.reserve(basis.size());
  for (const auto& m : basis) out.push_back(g * m * ginv);
  return out;
}

// Orthonormal basis of m, rotated until every element is regular in u_-.
std::vector<Mat> regular_orthonormal_basis(const SubspaceBasis& m, const SubspaceBasis& u_minus,
                                           int rank, std::mt19937_64& rng) {
  const int r = m.dim();
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int attempt = 0; attempt < 40; ++attempt) {
    RMat g(r, r);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) g(i, j) = gauss(rng);
    Eigen::HouseholderQR<RMat> qr(g);
    RMat q = qr.householderQ() * RMat::Identity(r, r);
    std::vector<Mat> rotated;
    rotated.reserve(r);
    bool all_regular = true;
    for (int i = 0; i < r; ++i) {
      Mat e = Mat::Zero(m.rows(), m.cols());
      for (int j = 0; j < r; ++j) e += q(j, i) * m.matrices()[j];
      if (!is_regular_in(u_minus, e, rank)) {
        all_regular = false;
        break;
      }
      rotated.push_back(e);
    }
    if (all_regular) return rotated;
  }
  throw NumericalError("could not rotate the abelian basis to regular elements");
}

// A unit element of V orthogonal to span(basis), or empty if none.
std::optional<Mat> pick_y(const SubspaceBasis& v, const std::vector<Mat>& basis) {
  RMat g(static_cast<int>(basis.size()), v.dim());
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (int b = 0; b < v.dim(); ++b) g(static_cast<Eigen::Index>(i), b) = frob_inner(basis[i], v.matrices()[b]);
  Eigen::JacobiSVD<RMat> svd(g, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  for (int i = v.dim() - 1; i >= 0; --i) {
    double s = i < sv.size() ? sv(i) : 0.0;
    if (s < kRankTol) {
      RVec c = svd.matrixV().col(i);
      Mat y = Mat::Zero(v.rows(), v.cols());
      for (int b = 0; b < v.dim(); ++b) y += c(b) * v.matrices()[b];
      y /= y.norm();
      return y;
    }
  }
  return std::nullopt;
}

double basis_commutation(const std::vector<Mat>& basis) {
  double worst = 0.0;
  for (const auto& a : basis)
    for (const auto& b : basis) worst = std::max(worst, comm(a, b).norm());
  return worst;
}

}  // namespace

AlignmentResult align_cartan(const PairwiseSymmetricAlgebra& pair, const SubspaceBasis& v_in,
                             AlignMode mode, std::uint64_t seed, const SubspaceBasis* start) {
  if (!pair.algebra.compact || !trace_form_definite(pair.u_minus))
    throw ConfigError("align_cartan requires a Riemannian secondary space (definite metric on u_-)");
  for (const auto& m : v_in.matrices())
    if (pair.u_minus.membership_residual(m) > 1e-9)
      throw ConfigError("align_cartan: V is not contained in u_-");

  SubspaceBasis v = v_in;  // already orthonormal by construction of SubspaceBasis
  const int n = v.dim();
  const int rank = rank_of_subspace(pair.u_minus, seed);
  if (n > rank)
    throw ObstructionError("dim V = " + std::to_string(n) + " exceeds the rank " +
                           std::to_string(rank) + " of the secondary space");

  std::mt19937_64 rng(seed);

  // V already maximal abelian: nothing to do.
  if (n == rank && commutation_residual(v) <= 1e-10) {
    double sv = 0.0;
    numeric_rank(projection_matrix(v, v.matrices()), kRankTol, &sv);
    return {v, 0, n, sv};
  }

  if (mode == AlignMode::randomized) {
    for (int attempt = 0; attempt < 60; ++attempt) {
      SubspaceBasis m = maximal_abelian_in(pair.u_minus, rng(), rank);
      double sv = 0.0;
      int r = numeric_rank(projection_matrix(v, m.matrices()), kRankTol, &sv);
      if (r == n && sv >= kRetainedSv) return {m, 0, r, sv};
    }
    throw NumericalError("randomized alignment failed within the draw budget");
  }

  const int restarts = 12;
  for (int restart = 0; restart < restarts; ++restart) {
    SubspaceBasis m0 = (start && restart == 0) ? *start
                                               : maximal_abelian_in(pair.u_minus, rng(), rank);
    std::vector<Mat> basis;
    try {
      basis = regular_orthonormal_basis(m0, pair.u_minus, rank, rng);
    } catch (const NumericalError&) {
      continue;
    }
    int steps = 0;
    bool stalled = false;
    for (;;) {
      RMat p = projection_matrix(v, basis);
      double sv = 0.0;
      int j = numeric_rank(p, kRankTol, &sv);
      if (j >= n) {
        if (sv < kRetainedSv) {
          stalled = true;  // rank reached but projection nearly degenerate
          break;
        }
        SubspaceBasis aligned = SubspaceBasis::from_matrices(basis);
        if (commutation_residual(aligned) > 1e-10) {
          stalled = true;
          break;
        }
        return {aligned, steps, j, sv};
      }
      if (steps > n + 2) {
        stalled = true;
        break;
      }
      // order so the first j elements carry the projected span; the next one is moved
      Eigen::ColPivHouseholderQR<RMat> qr(p);
      auto perm = qr.colsPermutation().indices();
      std::vector<Mat> reordered;
      reordered.reserve(basis.size());
      for (Eigen::Index i = 0; i < perm.size(); ++i) reordered.push_back(basis[perm(i)]);
      basis = std::move(reordered);
      auto y = pick_y(v, basis);
      if (!y) {
        stalled = true;
        break;
      }
      Mat dir = comm(basis[j], *y);  // lies in u_+, so conjugation preserves u_-
      double dn = dir.norm();
      if (dn < 1e-12) {
        stalled = true;
        break;
      }
      bool advanced = false;
      for (int k = 0; k <= 20 && !advanced; ++k) {
        double t = std::pow(2.0, -k) / dn;
        Mat g = (t * dir).exp();
        Mat ginv = (-t * dir).exp();
        std::vector<Mat> cand = conjugate_all(basis, g, ginv);
        if (basis_commutation(cand) > 1e-9) continue;
        double sv2 = 0.0;
        int j2 = numeric_rank(projection_matrix(v, cand), kRankTol, &sv2);
        if (j2 > j) {  // strict increase required each step
          basis = std::move(cand);
          advanced = true;
          ++steps;
        }
      }
      if (!advanced) {
        stalled = true;
        break;
      }
    }
    if (stalled) continue;
  }
  throw NumericalError("constructive alignment stalled after restart budget");
}

}  // namespace loopflat
