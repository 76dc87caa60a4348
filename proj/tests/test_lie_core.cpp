#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "loopflat/cartan_align.hpp"
#include "loopflat/errors.hpp"
#include "loopflat/lie_algebra.hpp"
#include "loopflat/octonion.hpp"
#include "loopflat/symmetric_pair.hpp"

#include <unsupported/Eigen/MatrixFunctions>

using namespace loopflat;

namespace {

Mat diag_pm(std::initializer_list<int> signs) {
  std::vector<double> d;
  for (int s : signs) d.push_back(static_cast<double>(s));
  Mat m = Mat::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = d[i];
  return m;
}

Mat block_signs(int plus, int minus) {
  Mat m = Mat::Identity(plus + minus, plus + minus);
  for (int i = plus; i < plus + minus; ++i) m(i, i) = -1.0;
  return m;
}

// Brute-force Killing form oracle for so(3): ad matrices assembled directly
// from hand-computed brackets, independent of the library's structure pipeline.
double so3_killing_oracle() {
  RMat e12 = RMat::Zero(3, 3), e13 = RMat::Zero(3, 3), e23 = RMat::Zero(3, 3);
  e12(0, 1) = 1; e12(1, 0) = -1;
  e13(0, 2) = 1; e13(2, 0) = -1;
  e23(1, 2) = 1; e23(2, 1) = -1;
  std::vector<RMat> b = {e12, e13, e23};
  auto coord = [&](const RMat& x) {
    RVec c(3);
    c << x(0, 1), x(0, 2), x(1, 2);
    return c;
  };
  RMat ad0(3, 3), ad1(3, 3), ad2(3, 3);
  for (int j = 0; j < 3; ++j) {
    ad0.col(j) = coord(e12 * b[j] - b[j] * e12);
    ad1.col(j) = coord(e13 * b[j] - b[j] * e13);
    ad2.col(j) = coord(e23 * b[j] - b[j] * e23);
  }
  (void)ad1;
  (void)ad2;
  return (ad0 * ad0).trace();
}

}  // namespace

TEST_CASE("so(3): dimension and skewness") {
  auto so3 = build_algebra(Family::so, 3);
  CHECK(so3.dim() == 3);
  CHECK(so3.ambient == 3);
  for (const auto& b : so3.basis) CHECK((b + b.transpose()).norm() == doctest::Approx(0.0));
  CHECK(so3.compact);
}

TEST_CASE("killing form values and symmetry") {
  auto so3 = build_algebra(Family::so, 3);
  Mat x = so3.basis[0];  // E12 - E21
  CHECK(so3.killing_form(x, Mat::Zero(3, 3)) == doctest::Approx(0.0));
  double expected = so3_killing_oracle();
  CHECK(expected == doctest::Approx(-2.0));
  CHECK(so3.killing_form(x, x) == doctest::Approx(expected).epsilon(1e-12));

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    Mat a = so3.span.random_element(rng);
    Mat b = so3.span.random_element(rng);
    CHECK(so3.killing_form(a, b) == doctest::Approx(so3.killing_form(b, a)).epsilon(1e-10));
  }
  CHECK_THROWS_AS(so3.killing_form(Mat::Identity(3, 3), x), ConfigError);
}

TEST_CASE("killing matrix nondegenerate and consistent with ad traces") {
  for (const auto& alg : {build_algebra(Family::so, 5), build_algebra(Family::su_real, 2),
                          build_algebra(Family::sp, 2), build_algebra(Family::sl_real, 3)}) {
    Eigen::JacobiSVD<RMat> svd(alg.killing);
    double smin = svd.singularValues().tail(1)(0);
    double smax = svd.singularValues()(0);
    CHECK(smin / smax > 1e-8);
    for (int i = 0; i < alg.dim(); ++i)
      for (int j = 0; j < alg.dim(); ++j)
        CHECK(std::abs(alg.killing(i, j) - (alg.ad[i] * alg.ad[j]).trace()) < 1e-10);
  }
}

TEST_CASE("jacobi identity and bracket closure on the catalog") {
  for (const auto& key : {"so:5", "su_real:2", "sp:2", "sl_real:3", "sp_real:2", "g2"}) {
    auto alg = build_algebra(key);
    CHECK(alg.jacobi_residual() < 1e-9);
    CHECK(alg.closure_residual() < 1e-10);
  }
}

TEST_CASE("su(n+1) real form: block structure") {
  auto su3 = build_algebra(Family::su_real, 2);
  CHECK(su3.dim() == 8);
  CHECK(su3.ambient == 6);
  for (const auto& x : su3.basis) {
    Mat a = x.topLeftCorner(3, 3);
    Mat b = x.topRightCorner(3, 3);
    CHECK((a + a.transpose()).norm() < 1e-14);
    CHECK((b - b.transpose()).norm() < 1e-14);
    CHECK(std::abs(b.trace()) < 1e-14);
    CHECK((x.bottomRightCorner(3, 3) - a).norm() < 1e-14);
    CHECK((x.bottomLeftCorner(3, 3) + b).norm() < 1e-14);
  }
}

TEST_CASE("g2: derivation algebra of the octonions") {
  CHECK(oct_table_check() == 0.0);
  auto g2 = build_algebra(Family::g2, 0);
  CHECK(g2.dim() == 14);
  CHECK(g2.ambient == 7);
  CHECK(g2.compact);
  for (const auto& d : g2.basis) {
    CHECK(derivation_residual(d.real()) < 1e-8);
    CHECK(d.imag().norm() == doctest::Approx(0.0));
  }
}

TEST_CASE("unsupported sizes are configuration errors") {
  CHECK_THROWS_AS(build_algebra(Family::so, 40), ConfigError);
  CHECK_THROWS_AS(build_algebra(Family::su_real, 9), ConfigError);
  CHECK_THROWS_AS(build_algebra("nosuch:3"), ConfigError);
}

TEST_CASE("decompose: sphere pair so(5), k = 2") {
  auto so5 = build_algebra(Family::so, 5);
  auto tau = ad_involution(block_signs(4, 1), "tau");
  auto sigma = ad_involution(block_signs(2, 3), "sigma");
  auto pair = decompose(so5, tau, sigma);

  CHECK(pair.p_prime().dim() == 2);
  CHECK(pair.k_space.dim() == 6);   // so(4)
  CHECK(pair.u_plus.dim() == 4);    // so(2) x so(3)
  CHECK(pair.upp.dim() + pair.upm.dim() + pair.ump.dim() + pair.umm.dim() == 10);

  // p' is the k x 1 corner block
  for (const auto& m : pair.p_prime().matrices()) {
    Mat probe = m;
    probe(0, 4) = probe(1, 4) = probe(4, 0) = probe(4, 1) = 0.0;
    CHECK(probe.norm() < 1e-12);
  }

  // projectors: the four components are pairwise Killing-orthogonal and exhaust u
  std::vector<const SubspaceBasis*> parts = {&pair.upp, &pair.upm, &pair.ump, &pair.umm};
  for (std::size_t a = 0; a < parts.size(); ++a)
    for (std::size_t b = a + 1; b < parts.size(); ++b)
      for (const auto& x : parts[a]->matrices())
        for (const auto& y : parts[b]->matrices())
          CHECK(std::abs(so5.killing_form(x, y)) < 1e-10);

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    Mat x = so5.span.random_element(rng);
    Mat sum = pair.upp.project(x) + pair.upm.project(x) + pair.ump.project(x) + pair.umm.project(x);
    CHECK((sum - x).norm() < 1e-10);
  }

  // four-fold projections commute with the involutions' eigenprojections
  for (int trial = 0; trial < 10; ++trial) {
    Mat x = so5.span.random_element(rng);
    Mat a = pair.upp.project(pair.k_space.project(x));
    Mat b = pair.k_space.project(pair.upp.project(x));
    CHECK((a - b).norm() < 1e-10);
  }
}

TEST_CASE("decompose: sigma = identity gives empty u_-") {
  auto so5 = build_algebra(Family::so, 5);
  auto tau = ad_involution(block_signs(4, 1), "tau");
  auto pair = decompose(so5, tau, identity_involution(5));
  CHECK(pair.u_minus.dim() == 0);
  CHECK(pair.p_prime().dim() == 0);
  CHECK_THROWS_AS(rank_of_subspace(pair.u_minus), ConfigError);
}

TEST_CASE("decompose rejects invalid involutions") {
  auto so5 = build_algebra(Family::so, 5);
  Mat notinv = Mat::Identity(5, 5);
  notinv(0, 0) = 2.0;  // Ad of this is not involutive
  CHECK_THROWS_AS(decompose(so5, ad_involution(notinv, "bad"), identity_involution(5)),
                  ConfigError);
}

TEST_CASE("g2 pair: four-fold dimensions (computed goldens)") {
  auto g2 = build_algebra(Family::g2, 0);
  auto sigma = ad_involution(block_signs(3, 4), "sigma");
  auto tau = ad_involution(diag_pm({1, -1, -1, 1, 1, -1, -1}), "tau");
  auto pair = decompose(g2, tau, sigma);
  CHECK(pair.u_plus.dim() == 6);  // so(4) fixed algebra of the symmetric space
  CHECK(pair.u_minus.dim() == 8);
  CHECK(pair.k_prime().dim() == 2);
  CHECK(pair.p_prime().dim() == 4);
  CHECK(rank_of_subspace(pair.u_minus) == 2);
}

TEST_CASE("rank computations match the closed forms") {
  auto so5 = build_algebra(Family::so, 5);
  CHECK(rank_of(so5, ad_involution(block_signs(2, 3), "sigma")) == 2);  // min(k, n+1-k)

  auto sp3 = build_algebra(Family::sp, 3);
  Mat j = Mat::Zero(6, 6);
  j.topRightCorner(3, 3) = Mat::Identity(3, 3);
  j.bottomLeftCorner(3, 3) = -Mat::Identity(3, 3);
  CHECK(rank_of(sp3, ad_involution(j, "sigma")) == 3);  // u_+ = u(3), rank n+1
}

TEST_CASE("rank is invariant under inner conjugation of sigma") {
  auto so5 = build_algebra(Family::so, 5);
  Mat p = block_signs(2, 3);
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    Mat z = so5.span.random_element(rng) * 0.7;
    Mat g = z.exp();
    Mat pc = g * p * g.inverse();
    auto sigma_c = ad_involution(pc, "sigma_conj");
    CHECK(rank_of(so5, sigma_c, 1000 + trial) == 2);
  }
}

TEST_CASE("maximal abelian subspaces") {
  auto so5 = build_algebra(Family::so, 5);
  auto pair = decompose(so5, ad_involution(block_signs(4, 1), "tau"),
                        ad_involution(block_signs(2, 3), "sigma"));
  auto cartan = maximal_abelian_in(pair.u_minus, 23);
  CHECK(cartan.dim() == 2);
  CHECK(commutation_residual(cartan) < 1e-10);

  // a line is its own maximal abelian subspace
  SubspaceBasis line = SubspaceBasis::from_matrices({pair.u_minus.matrices()[0]});
  auto only = maximal_abelian_in(line, 29);
  CHECK(only.dim() == 1);
  CHECK(only.membership_residual(pair.u_minus.matrices()[0]) < 1e-12);
}

TEST_CASE("sl(n+1, R): the explicit abelian family in u_-") {
  const int n = 3;  // sl(4, R)
  auto sl4 = build_algebra(Family::sl_real, n + 1);
  Mat j = block_signs(n, 1);
  auto tau = ad_involution(j, "tau");
  auto sigma = composite_involution(
      [j](const Mat& x) { return Mat(-j * x.transpose() * j); }, "sigma");
  auto pair = decompose(sl4, tau, sigma);
  CHECK(pair.u_plus.dim() == 6);      // so(n,1)
  CHECK(pair.p_prime().dim() == n);   // the bordered block

  // generators: row i ends in [1, 1], column i ends in [1, -1]
  std::vector<Mat> gens;
  for (int i = 0; i < n - 1; ++i) {
    Mat e = Mat::Zero(n + 1, n + 1);
    e(i, n - 1) = 1.0;
    e(i, n) = 1.0;
    e(n - 1, i) = 1.0;
    e(n, i) = -1.0;
    gens.push_back(e);
  }
  Mat ehat = Mat::Zero(n + 1, n + 1);
  ehat(n - 1, n - 1) = 1.0;
  ehat(n - 1, n) = 1.0;
  ehat(n, n - 1) = -1.0;
  ehat(n, n) = -1.0;
  gens.push_back(ehat);

  for (const auto& g : gens) {
    CHECK(pair.u_minus.membership_residual(g) < 1e-12);
    for (const auto& h : gens) CHECK(comm(g, h).norm() < 1e-12);
  }
  // spans an n-dimensional abelian subspace projecting onto p'
  auto span = SubspaceBasis::from_matrices(gens);
  CHECK(span.dim() == n);
  RMat proj(pair.p_prime().dim(), n);
  for (int i = 0; i < n; ++i) proj.col(i) = pair.p_prime().coords(gens[i]);
  Eigen::JacobiSVD<RMat> svd(proj);
  CHECK(svd.singularValues().tail(1)(0) > 1e-8);
}
