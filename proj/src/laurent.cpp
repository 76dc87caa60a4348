#include "loopflat/laurent.hpp"

#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "loopflat/errors.hpp"

namespace loopflat {

namespace {

double pow_sup(int degree) {
  // sup over the annulus of |lambda|^degree; r_minus = 1/r_plus so both signs peak at 2^|i|
  return std::pow(LaurentLoop::r_plus, std::abs(degree));
}

}  // namespace

LaurentLoop::LaurentLoop(int lo, std::vector<Mat> coeffs, double trunc_bound)
    : lo_(lo), coeffs_(std::move(coeffs)), trunc_bound_(trunc_bound) {}

LaurentLoop LaurentLoop::constant(const Mat& c) { return LaurentLoop(0, {c}); }

LaurentLoop LaurentLoop::identity(int n) { return constant(Mat::Identity(n, n)); }

LaurentLoop LaurentLoop::monomial(const Mat& c, int degree) { return LaurentLoop(degree, {c}); }

Mat LaurentLoop::coeff(int degree) const {
  if (degree < lo() || degree > hi()) return Mat::Zero(ambient(), ambient());
  return coeffs_[static_cast<std::size_t>(degree - lo_)];
}

Mat LaurentLoop::eval(Cplx lambda) const {
  const int n = ambient();
  Mat acc = Mat::Zero(n, n);
  for (int i = static_cast<int>(coeffs_.size()) - 1; i >= 0; --i) {
    acc = acc * lambda + coeffs_[static_cast<std::size_t>(i)];
  }
  return acc * std::pow(lambda, lo_);
}

LaurentLoop LaurentLoop::truncated(int a, int b) const {
  double extra = 0.0;
  std::vector<Mat> kept;
  int new_lo = std::max(a, lo());
  for (int i = lo(); i <= hi(); ++i) {
    if (i < a || i > b)
      extra += coeff(i).operatorNorm() * pow_sup(i);
    else
      kept.push_back(coeff(i));
  }
  if (kept.empty()) return LaurentLoop(0, {Mat::Zero(ambient(), ambient())}, trunc_bound_ + extra);
  return LaurentLoop(new_lo, std::move(kept), trunc_bound_ + extra);
}

LaurentLoop LaurentLoop::trimmed(double tol) const {
  int a = lo(), b = hi();
  while (a < b && coeff(a).norm() <= tol) ++a;
  while (b > a && coeff(b).norm() <= tol) --b;
  return truncated(a, b);
}

double LaurentLoop::annulus_norm() const {
  double s = 0.0;
  for (int i = lo(); i <= hi(); ++i) s += coeff(i).operatorNorm() * pow_sup(i);
  return s;
}

double LaurentLoop::coeff_norm() const {
  double s = 0.0;
  for (const auto& c : coeffs_) s += c.squaredNorm();
  return std::sqrt(s);
}

LaurentLoop LaurentLoop::scaled(Cplx s) const {
  std::vector<Mat> out = coeffs_;
  for (auto& c : out) c *= s;
  return LaurentLoop(lo_, std::move(out), trunc_bound_ * std::abs(s));
}

LaurentLoop LaurentLoop::shifted(int degrees) const {
  return LaurentLoop(lo_ + degrees, coeffs_, trunc_bound_ * pow_sup(degrees));
}

LaurentLoop operator+(const LaurentLoop& a, const LaurentLoop& b) {
  int lo = std::min(a.lo(), b.lo());
  int hi = std::max(a.hi(), b.hi());
  std::vector<Mat> out;
  out.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (int i = lo; i <= hi; ++i) out.push_back(a.coeff(i) + b.coeff(i));
  return LaurentLoop(lo, std::move(out), a.trunc_bound() + b.trunc_bound());
}

LaurentLoop operator-(const LaurentLoop& a, const LaurentLoop& b) {
  return a + b.scaled(-1.0);
}

LaurentLoop operator*(const LaurentLoop& a, const LaurentLoop& b) {
  const int n = a.ambient();
  int lo = a.lo() + b.lo();
  int hi = a.hi() + b.hi();
  std::vector<Mat> out(static_cast<std::size_t>(hi - lo + 1), Mat::Zero(n, n));
  for (int i = a.lo(); i <= a.hi(); ++i) {
    const Mat& ca = a.coeff(i);
    if (ca.isZero(0.0)) continue;
    for (int j = b.lo(); j <= b.hi(); ++j) out[static_cast<std::size_t>(i + j - lo)] += ca * b.coeff(j);
  }
  double bound = a.trunc_bound() * (b.annulus_norm() + b.trunc_bound()) +
                 a.annulus_norm() * b.trunc_bound();
  return LaurentLoop(lo, std::move(out), bound);
}

LaurentLoop operator*(const Mat& c, const LaurentLoop& a) {
  std::vector<Mat> out;
  out.reserve(static_cast<std::size_t>(a.hi() - a.lo() + 1));
  for (int i = a.lo(); i <= a.hi(); ++i) out.push_back(c * a.coeff(i));
  return LaurentLoop(a.lo(), std::move(out), a.trunc_bound() * c.operatorNorm());
}

LaurentLoop operator*(const LaurentLoop& a, const Mat& c) {
  std::vector<Mat> out;
  out.reserve(static_cast<std::size_t>(a.hi() - a.lo() + 1));
  for (int i = a.lo(); i <= a.hi(); ++i) out.push_back(a.coeff(i) * c);
  return LaurentLoop(a.lo(), std::move(out), a.trunc_bound() * c.operatorNorm());
}

LaurentLoop loop_exp_monomial(const Mat& g, int deg, int window) {
  const int n = static_cast<int>(g.rows());
  if (deg == 0) {
    Mat e = g.exp();
    return LaurentLoop::constant(e);
  }
  const double gn = g.operatorNorm();
  const double r = pow_sup(deg);
  const int kmax = window / std::abs(deg);
  std::vector<Mat> kept(static_cast<std::size_t>(kmax) + 1, Mat::Zero(n, n));
  Mat power = Mat::Identity(n, n);
  kept[0] = power;
  double term = 1.0, tail = 0.0;
  for (int k = 1;; ++k) {
    power = power * g / static_cast<double>(k);
    term *= gn * r / static_cast<double>(k);
    if (k <= kmax) {
      kept[static_cast<std::size_t>(k)] = power;
    } else {
      // factorial tail; once the term ratio drops below 1/2 a geometric majorant closes it
      if (gn * r / (k + 1.0) < 0.5) {
        tail += 2.0 * term;
        break;
      }
      tail += term;
    }
    if (k > 300) throw NumericalError("exp series did not converge (argument too large)");
  }
  // place g^k / k! at degree k * deg
  int lo = deg > 0 ? 0 : kmax * deg;
  int hi = deg > 0 ? kmax * deg : 0;
  std::vector<Mat> dense(static_cast<std::size_t>(hi - lo + 1), Mat::Zero(n, n));
  for (int k = 0; k <= kmax; ++k) dense[static_cast<std::size_t>(k * deg - lo)] = kept[static_cast<std::size_t>(k)];
  return LaurentLoop(lo, std::move(dense), tail);
}

LaurentLoop loop_exp(const LaurentLoop& x, int window) {
  const int n = x.ambient();
  LaurentLoop acc = LaurentLoop::identity(n);
  LaurentLoop power = LaurentLoop::identity(n);
  double xnorm = x.annulus_norm() + x.trunc_bound();
  for (int k = 1; k <= 300; ++k) {
    power = (power * x).scaled(1.0 / k).truncated(-window, window);
    acc = acc + power;
    double term = power.annulus_norm() + power.trunc_bound();
    if (xnorm / (k + 1.0) < 0.5 && term < 1e-17 * std::max(1.0, acc.annulus_norm()))
      return acc + LaurentLoop(0, {Mat::Zero(n, n)}, 2.0 * term);
  }
  throw NumericalError("loop exp series did not converge within 300 terms");
}

LaurentLoop invert_onesided(const LaurentLoop& y, int window) {
  const int n = y.ambient();
  if (y.lo() > 0 || y.hi() < 0)
    throw NumericalError("invert_onesided: window must contain degree 0");
  Mat c0 = y.coeff(0);
  Eigen::FullPivLU<Mat> lu(c0);
  if (!lu.isInvertible()) throw NumericalError("invert_onesided: degree-0 coefficient singular");
  Mat c0inv = lu.inverse();
  // y = c0 (I + nu), nu strictly one-sided
  LaurentLoop nu = (c0inv * y) - LaurentLoop::identity(n);
  LaurentLoop acc = LaurentLoop::identity(n);
  LaurentLoop power = LaurentLoop::identity(n);
  const int steps = window + 1;
  for (int k = 1; k <= steps; ++k) {
    power = (power * nu).truncated(-window, window);
    acc = acc + power.scaled((k % 2) ? -1.0 : 1.0);
    if (power.annulus_norm() == 0.0) break;
  }
  return (acc * c0inv).truncated(-window, window);
}

LaurentLoop apply_involution(const LaurentLoop& x, LoopInvolution which,
                             const PairwiseSymmetricAlgebra& pair) {
  auto require_ad = [](const Involution& f) {
    if (f.kind != Involution::Kind::AdMatrix)
      throw ConfigError("loop involutions need conjugation-type finite involutions");
  };
  auto sgn = [](int i) { return (i % 2 == 0) ? 1.0 : -1.0; };
  const int lo = x.lo(), hi = x.hi();
  std::vector<Mat> out;
  out.reserve(static_cast<std::size_t>(hi - lo + 1));
  switch (which) {
    case LoopInvolution::rho:
      for (int i = lo; i <= hi; ++i) out.push_back(pair.rho_hat(x.coeff(i)));
      return LaurentLoop(lo, std::move(out), x.trunc_bound());
    case LoopInvolution::sigma:
      require_ad(pair.sigma);
      for (int i = lo; i <= hi; ++i) out.push_back(Mat(pair.sigma(x.coeff(i)) * sgn(i)));
      return LaurentLoop(lo, std::move(out), x.trunc_bound());
    case LoopInvolution::tau:
      require_ad(pair.tau);
      for (int i = -hi; i <= -lo; ++i) out.push_back(Mat(pair.tau(x.coeff(-i)) * sgn(i)));
      return LaurentLoop(-hi, std::move(out), x.trunc_bound());
    case LoopInvolution::rho2:
      for (int i = -hi; i <= -lo; ++i) out.push_back(pair.rho_hat(x.coeff(-i)));
      return LaurentLoop(-hi, std::move(out), x.trunc_bound());
    case LoopInvolution::rho_tilde:
      require_ad(pair.tau);
      require_ad(pair.sigma);
      for (int i = lo; i <= hi; ++i) out.push_back(pair.rho_hat(pair.tau(pair.sigma(x.coeff(i)))));
      return LaurentLoop(lo, std::move(out), x.trunc_bound());
  }
  throw ConfigError("unknown loop involution");
}

FixednessReport is_in_H(const LaurentLoop& x, const PairwiseSymmetricAlgebra& pair,
                        Reality reality, double tol) {
  double scale = std::max(1.0, x.coeff_norm());
  auto rel = [&](LoopInvolution w) {
    return (apply_involution(x, w, pair) - x).coeff_norm() / scale;
  };
  FixednessReport rep;
  rep.rho_residual = rel(reality == Reality::rho ? LoopInvolution::rho : LoopInvolution::rho2);
  rep.sigma_residual = rel(LoopInvolution::sigma);
  rep.tau_residual = rel(LoopInvolution::tau);
  rep.residual = std::max({rep.rho_residual, rep.sigma_residual, rep.tau_residual});
  rep.fixed = rep.residual <= tol;
  return rep;
}

}  // namespace loopflat
