#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "loopflat/cartan_align.hpp"
#include "loopflat/errors.hpp"

using namespace loopflat;

namespace {

Mat block_signs(int plus, int minus) {
  Mat m = Mat::Identity(plus + minus, plus + minus);
  for (int i = plus; i < plus + minus; ++i) m(i, i) = -1.0;
  return m;
}

PairwiseSymmetricAlgebra sphere_pair(int n, int k) {
  auto alg = build_algebra(Family::so, n + 1);
  return decompose(alg, ad_involution(block_signs(n, 1), "tau"),
                   ad_involution(block_signs(k, n + 1 - k), "sigma"));
}

PairwiseSymmetricAlgebra totally_real_pair(int n) {
  auto alg = build_algebra(Family::su_real, n);
  const int m = n + 1;
  Mat q = Mat::Identity(2 * m, 2 * m);
  q(m - 1, m - 1) = q(2 * m - 1, 2 * m - 1) = -1.0;
  Mat p = block_signs(m, m);
  return decompose(alg, ad_involution(q, "tau"), ad_involution(p, "sigma"));
}

// Verify pi_V m = V with the stated margin.
void check_aligned(const PairwiseSymmetricAlgebra& pair, const SubspaceBasis& v,
                   const AlignmentResult& res) {
  CHECK(res.projection_rank == v.dim());
  CHECK(res.smallest_singular >= 1e-6);
  CHECK(commutation_residual(res.cartan) < 1e-10);
  for (const auto& m : res.cartan.matrices()) CHECK(pair.u_minus.membership_residual(m) < 1e-8);
  RMat p(v.dim(), res.cartan.dim());
  for (int i = 0; i < res.cartan.dim(); ++i) p.col(i) = v.coords(res.cartan.matrices()[i]);
  Eigen::JacobiSVD<RMat> svd(p);
  CHECK(svd.singularValues()(v.dim() - 1) >= 1e-6);
}

}  // namespace

TEST_CASE("aligning a subspace that is already maximal abelian is a no-op") {
  auto pair = sphere_pair(4, 2);
  auto cartan = maximal_abelian_in(pair.u_minus, 5);
  auto res = align_cartan(pair, cartan, AlignMode::constructive, 7);
  CHECK(res.steps == 0);
  CHECK(res.projection_rank == 2);
  for (const auto& m : res.cartan.matrices()) CHECK(cartan.membership_residual(m) < 1e-9);
}

TEST_CASE("sphere case: V = p' aligns across 100 seeded starts") {
  auto pair = sphere_pair(4, 2);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto res = align_cartan(pair, pair.p_prime(), AlignMode::constructive, seed);
    check_aligned(pair, pair.p_prime(), res);
  }
}

TEST_CASE("dimension above the rank raises the obstruction") {
  auto pair = sphere_pair(4, 3);  // dim p' = 3, rank = min(3, 2) = 2
  CHECK(pair.p_prime().dim() == 3);
  CHECK_THROWS_AS(align_cartan(pair, pair.p_prime(), AlignMode::constructive, 1),
                  ObstructionError);
}

TEST_CASE("alignment success is conjugation covariant") {
  auto pair = sphere_pair(4, 2);
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    // conjugate V by an element of U_+
    Mat z = pair.u_plus.random_element(rng) * 0.6;
    Mat g = z.exp();
    Mat gi = (-z).exp();
    std::vector<Mat> moved;
    for (const auto& m : pair.p_prime().matrices()) moved.push_back(g * m * gi);
    auto v = SubspaceBasis::from_matrices(moved);
    auto res = align_cartan(pair, v, AlignMode::constructive, 100 + trial);
    check_aligned(pair, v, res);
  }
}

TEST_CASE("randomized mode succeeds on generic subspaces") {
  auto pair = totally_real_pair(2);
  std::mt19937_64 rng(43);
  int success = 0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    std::vector<Mat> gen = {pair.u_minus.random_element(rng), pair.u_minus.random_element(rng)};
    auto v = SubspaceBasis::from_matrices(gen);
    if (v.dim() != 2) continue;
    try {
      auto res = align_cartan(pair, v, AlignMode::randomized, 1000 + t);
      check_aligned(pair, v, res);
      ++success;
    } catch (const NumericalError&) {
    }
  }
  CHECK(success >= static_cast<int>(0.99 * trials));
}

TEST_CASE("rank-deficient V is rejected up front") {
  auto pair = sphere_pair(4, 2);
  Mat a = pair.p_prime().matrices()[0];
  // from_matrices drops the dependent direction, so the caller sees dim 1, not failure;
  // a deliberately duplicated generator list must not inflate the dimension
  auto v = SubspaceBasis::from_matrices({a, 2.0 * a});
  CHECK(v.dim() == 1);
  auto res = align_cartan(pair, v, AlignMode::constructive, 3);
  CHECK(res.projection_rank == 1);
}

TEST_CASE("non-Riemannian secondary spaces are refused") {
  auto sl4 = build_algebra(Family::sl_real, 4);
  Mat j = block_signs(3, 1);
  auto pair = decompose(sl4, ad_involution(j, "tau"),
                        composite_involution([j](const Mat& x) { return Mat(-j * x.transpose() * j); },
                                             "sigma"));
  CHECK_FALSE(pair.secondary_riemannian());
  CHECK_THROWS_AS(align_cartan(pair, pair.p_prime(), AlignMode::constructive, 1), ConfigError);
}

TEST_CASE("constructive iteration recovers from a start with zero projection") {
  auto pair = sphere_pair(4, 2);
  // Cartan with B = [diag(*, *) | 0]: every element projects to zero in p'
  Mat x1 = Mat::Zero(5, 5), x2 = Mat::Zero(5, 5);
  x1(0, 2) = 1.0; x1(2, 0) = -1.0;
  x2(1, 3) = 1.0; x2(3, 1) = -1.0;
  auto bad = SubspaceBasis::from_matrices({x1, x2});
  CHECK(commutation_residual(bad) < 1e-14);
  for (const auto& m : bad.matrices()) CHECK(pair.p_prime().coords(m).norm() < 1e-14);

  auto res = align_cartan(pair, pair.p_prime(), AlignMode::constructive, 7, &bad);
  check_aligned(pair, pair.p_prime(), res);
  CHECK(res.steps >= 1);  // the line-search loop actually ran
}
