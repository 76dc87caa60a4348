#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "loopflat/errors.hpp"
#include "loopflat/laurent.hpp"

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

std::vector<Cplx> sample_lambdas() {
  std::vector<Cplx> ls;
  for (int k = 0; k < 12; ++k) {
    double th = 2.0 * M_PI * k / 12.0;
    ls.emplace_back(std::cos(th), std::sin(th));
  }
  for (double r : {0.5, 0.8, 1.25, 2.0}) ls.emplace_back(r, 0.0);
  for (double r : {0.6, 1.6}) ls.emplace_back(r * std::cos(1.0), r * std::sin(1.0));
  return ls;  // 18 circle/annulus points + 2 interior rays = 20 samples
}

LaurentLoop random_loop(int n, int lo, int hi, double scale, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Mat> cs;
  for (int i = lo; i <= hi; ++i) {
    Mat c(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) c(a, b) = Cplx(gauss(rng), gauss(rng));
    cs.push_back(c * (scale / c.norm()));
  }
  return LaurentLoop(lo, std::move(cs));
}

}  // namespace

TEST_CASE("evaluation matches direct power summation") {
  std::mt19937_64 rng(2);
  auto x = random_loop(3, -2, 3, 0.7, rng);
  for (Cplx l : sample_lambdas()) {
    Mat direct = Mat::Zero(3, 3);
    for (int i = x.lo(); i <= x.hi(); ++i) direct += x.coeff(i) * std::pow(l, i);
    CHECK((x.eval(l) - direct).norm() < 1e-13 * std::max(1.0, direct.norm()));
  }
}

TEST_CASE("product window adds and evaluation is multiplicative") {
  std::mt19937_64 rng(4);
  auto x = random_loop(3, -2, 1, 0.8, rng);
  auto y = random_loop(3, -1, 3, 0.8, rng);
  auto xy = x * y;
  CHECK(xy.lo() == x.lo() + y.lo());
  CHECK(xy.hi() == x.hi() + y.hi());
  for (Cplx l : sample_lambdas()) {
    double err = (xy.eval(l) - x.eval(l) * y.eval(l)).norm();
    CHECK(err <= xy.trunc_bound() + 1e-11);
  }
}

TEST_CASE("involution actions agree with pointwise application") {
  auto pair = sphere_pair(4, 2);
  std::mt19937_64 rng(6);
  auto x = random_loop(5, -3, 3, 0.9, rng);
  auto check_pointwise = [&](LoopInvolution w, const std::function<Mat(Cplx)>& direct) {
    auto fx = apply_involution(x, w, pair);
    for (Cplx l : sample_lambdas()) {
      double err = (fx.eval(l) - direct(l)).norm();
      CHECK(err <= x.trunc_bound() + 1e-11);
    }
  };
  Mat q = pair.tau.matrix, p = pair.sigma.matrix;
  check_pointwise(LoopInvolution::sigma, [&](Cplx l) { return Mat(p * x.eval(-l) * p); });
  check_pointwise(LoopInvolution::tau, [&](Cplx l) { return Mat(q * x.eval(-1.0 / l) * q); });
  check_pointwise(LoopInvolution::rho,
                  [&](Cplx l) { return Mat(x.eval(std::conj(l)).conjugate()); });
  check_pointwise(LoopInvolution::rho2,
                  [&](Cplx l) { return Mat(x.eval(1.0 / std::conj(l)).conjugate()); });
  check_pointwise(LoopInvolution::rho_tilde, [&](Cplx l) {
    return Mat(q * p * x.eval(std::conj(l)).conjugate() * p * q);
  });
}

TEST_CASE("involutions are involutive on loops") {
  auto pair = sphere_pair(4, 2);
  std::mt19937_64 rng(8);
  auto x = random_loop(5, -2, 2, 1.0, rng);
  for (auto w : {LoopInvolution::rho, LoopInvolution::sigma, LoopInvolution::tau,
                 LoopInvolution::rho2, LoopInvolution::rho_tilde}) {
    auto twice = apply_involution(apply_involution(x, w, pair), w, pair);
    CHECK((twice - x).coeff_norm() < 1e-12);
  }
}

TEST_CASE("sigma-even constants are fixed; the odd-degree pairing is tau-fixed") {
  auto pair = sphere_pair(4, 2);
  Mat c0 = pair.u_plus.matrices()[0];
  auto con = LaurentLoop::constant(c0);
  CHECK((apply_involution(con, LoopInvolution::sigma, pair) - con).coeff_norm() < 1e-14);

  // A lambda - tau0(A) lambda^{-1} is fixed by tau
  std::mt19937_64 rng(10);
  Mat a = pair.algebra.span.random_element(rng);
  auto x = LaurentLoop::monomial(a, 1) - LaurentLoop::monomial(pair.tau(a), -1);
  auto tx = apply_involution(x, LoopInvolution::tau, pair);
  CHECK((tx - x).coeff_norm() < 1e-13);
  Mat q = pair.tau.matrix;
  for (Cplx l : sample_lambdas())
    CHECK((Mat(q * x.eval(-1.0 / l) * q) - x.eval(l)).norm() < 1e-12);
}

TEST_CASE("membership of the three-involution subgroup") {
  auto pair = sphere_pair(4, 2);
  auto id = LaurentLoop::identity(5);
  auto rep = is_in_H(id, pair, Reality::rho);
  CHECK(rep.fixed);
  CHECK(rep.residual == doctest::Approx(0.0));

  // constant exp of an element of k' stays in the subgroup
  Mat z = pair.k_prime().matrices()[0] * 0.7;
  auto g = LaurentLoop::constant(z.exp());
  CHECK(is_in_H(g, pair, Reality::rho).fixed);

  // exp(lambda psi), psi in u_-, is sigma/rho-fixed but not tau-fixed
  Mat psi = pair.u_minus.matrices()[0] * 0.5;
  auto f = loop_exp_monomial(psi, 1, 14);
  auto r = is_in_H(f, pair, Reality::rho);
  CHECK_FALSE(r.fixed);
  CHECK(r.rho_residual < 1e-12);
  CHECK(r.sigma_residual < 1e-12);
  CHECK(r.tau_residual > 1e-2);
  // pointwise witness of the tau defect
  Mat q = pair.tau.matrix;
  Cplx l(1.3, 0.0);
  CHECK((Mat(q * f.eval(-1.0 / l) * q) - f.eval(l)).norm() > 1e-3);
}

TEST_CASE("subgroup membership residual is subadditive under products") {
  auto pair = sphere_pair(4, 2);
  std::mt19937_64 rng(12);
  // two H-members: exponentials of tau/sigma/rho-fixed algebra loops
  auto member = [&](double s) {
    Mat a = pair.umm.random_element(rng) * s;
    auto arg = LaurentLoop::monomial(a, 1) + LaurentLoop::monomial(a, -1) -
               LaurentLoop::monomial(pair.tau(a), 1) - LaurentLoop::monomial(pair.tau(a), -1);
    // the combination c(lambda + lambda^{-1}) with tau c = -c, sigma c = -c is fixed by all three
    return loop_exp(arg.scaled(0.3), 16);
  };
  auto g1 = member(0.8), g2 = member(0.5);
  auto r1 = is_in_H(g1, pair, Reality::rho);
  auto r2 = is_in_H(g2, pair, Reality::rho);
  auto r12 = is_in_H((g1 * g2).truncated(-16, 16), pair, Reality::rho);
  CHECK(r1.fixed);
  CHECK(r2.fixed);
  CHECK(r12.residual <= r1.residual + r2.residual + 1e-10);
}

TEST_CASE("one-sided inversion is exact on the window") {
  std::mt19937_64 rng(14);
  auto y = LaurentLoop::identity(4) + random_loop(4, -6, -1, 0.4, rng);
  auto yi = invert_onesided(y, 12);
  auto prod = (y * yi).truncated(-12, 0);
  CHECK((prod - LaurentLoop::identity(4)).coeff_norm() < 1e-12);
}

TEST_CASE("monomial exponentials against dense evaluation") {
  std::mt19937_64 rng(16);
  Mat g(3, 3);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) g(a, b) = gauss(rng);
  g *= 0.6 / g.norm();
  auto f = loop_exp_monomial(g, 1, 16);
  for (Cplx l : sample_lambdas()) {
    Mat direct = (l * g).exp();
    CHECK((f.eval(l) - direct).norm() <= f.trunc_bound() + 1e-12);
  }
  // general series path agrees with the monomial fast path
  auto f2 = loop_exp(LaurentLoop::monomial(g, 1), 16);
  CHECK((f - f2).coeff_norm() < 1e-12);
}
