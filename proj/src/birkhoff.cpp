#include "loopflat/birkhoff.hpp"

#include <Eigen/QR>

#include "loopflat/errors.hpp"

namespace loopflat {

namespace {

std::vector<Cplx> residual_samples() {
  std::vector<Cplx> ls;
  for (int k = 0; k < 16; ++k) {
    double th = 2.0 * M_PI * k / 16.0;
    ls.emplace_back(std::cos(th), std::sin(th));
  }
  for (double r : {0.5, 0.8, 1.25, 2.0}) ls.emplace_back(r, 0.0);
  return ls;
}

struct Attempt {
  BirkhoffFactors factors;
  bool cond_ok = true;
};

Attempt attempt(const LaurentLoop& x, int d, const BirkhoffOptions& opt) {
  const int n = x.ambient();
  const int klo = x.lo() - d;
  const int nrows = -klo;  // equations for degrees klo .. -1
  Mat a = Mat::Zero(static_cast<Eigen::Index>(nrows) * n, static_cast<Eigen::Index>(d) * n);
  Mat rhs = Mat::Zero(static_cast<Eigen::Index>(nrows) * n, n);
  for (int k = klo; k <= -1; ++k) {
    const Eigen::Index row = static_cast<Eigen::Index>(k - klo) * n;
    rhs.middleRows(row, n) = -x.coeff(k);
    for (int j = -d; j <= -1; ++j) {
      if (k - j < x.lo() || k - j > x.hi()) continue;
      const Eigen::Index col = static_cast<Eigen::Index>(j + d) * n;
      a.block(row, col, n, n) = x.coeff(k - j);
    }
  }
  Eigen::ColPivHouseholderQR<Mat> qr(a);
  const auto& r = qr.matrixR();
  double rmax = 0.0, rmin = std::numeric_limits<double>::infinity();
  const Eigen::Index dia = std::min(r.rows(), r.cols());
  for (Eigen::Index i = 0; i < dia; ++i) {
    double v = std::abs(r(i, i));
    rmax = std::max(rmax, v);
    rmin = std::min(rmin, v);
  }
  Attempt out;
  out.factors.condition = rmin > 0.0 ? rmax / rmin : std::numeric_limits<double>::infinity();
  if (!(out.factors.condition < opt.cond_limit)) {
    out.cond_ok = false;
    return out;
  }
  Mat sol = qr.solve(rhs);

  std::vector<Mat> ycoeffs(static_cast<std::size_t>(d) + 1);
  for (int j = -d; j <= -1; ++j) ycoeffs[static_cast<std::size_t>(j + d)] = sol.middleRows(static_cast<Eigen::Index>(j + d) * n, n);
  ycoeffs.back() = Mat::Identity(n, n);
  LaurentLoop y(-d, std::move(ycoeffs));

  LaurentLoop xy = x * y;
  Mat p = xy.coeff(0);
  Eigen::FullPivLU<Mat> lu(p);
  if (!lu.isInvertible()) {
    out.cond_ok = false;
    out.factors.condition = std::numeric_limits<double>::infinity();
    return out;
  }
  Mat pinv = lu.inverse();
  out.factors.plus = (xy * pinv).truncated(0, d).trimmed(0.0);
  out.factors.minus = (p * invert_onesided(y, d)).truncated(-d, 0).trimmed(0.0);
  out.factors.degree_used = d;
  out.factors.residual = recomposition_residual(out.factors.plus, out.factors.minus, x);
  return out;
}

}  // namespace

double recomposition_residual(const LaurentLoop& plus, const LaurentLoop& minus,
                              const LaurentLoop& x) {
  double worst = 0.0;
  for (Cplx l : residual_samples()) {
    Mat xv = x.eval(l);
    double err = (plus.eval(l) * minus.eval(l) - xv).norm() / std::max(1.0, xv.norm());
    worst = std::max(worst, err);
  }
  return worst;
}

BirkhoffFactors factorize(const LaurentLoop& x, const BirkhoffOptions& opt) {
  int d = std::max({opt.degree, x.hi(), -x.lo()});
  bool saw_cond_failure = false;
  double best_residual = std::numeric_limits<double>::infinity();
  for (; d <= opt.max_degree; d += 4) {
    Attempt at = attempt(x, d, opt);
    if (!at.cond_ok) {
      saw_cond_failure = true;
      continue;
    }
    if (at.factors.residual <= opt.tol) return at.factors;
    best_residual = std::min(best_residual, at.factors.residual);
  }
  if (saw_cond_failure)
    throw BigCellError("coefficient system ill-conditioned: loop outside the factorizable cell");
  throw TruncationError("recomposition residual floor " + std::to_string(best_residual) +
                        " above tolerance at maximum degree");
}

BirkhoffFactors factorize_in_subgroup(const LaurentLoop& x, const PairwiseSymmetricAlgebra& pair,
                                      SubgroupReality reality, const BirkhoffOptions& opt) {
  auto conj_kind =
      reality == SubgroupReality::rho ? LoopInvolution::rho : LoopInvolution::rho_tilde;
  double scale = std::max(1.0, x.coeff_norm());
  double fix_in = std::max((apply_involution(x, LoopInvolution::sigma, pair) - x).coeff_norm(),
                           (apply_involution(x, conj_kind, pair) - x).coeff_norm()) /
                  scale;
  if (fix_in > 1e-9)
    throw ConfigError("factorize_in_subgroup: input not fixed by the subgroup involutions (residual " +
                      std::to_string(fix_in) + ")");
  BirkhoffFactors f = factorize(x, opt);
  for (const LaurentLoop* part : {&f.plus, &f.minus}) {
    double s = std::max(1.0, part->coeff_norm());
    double viol = std::max((apply_involution(*part, LoopInvolution::sigma, pair) - *part).coeff_norm(),
                           (apply_involution(*part, conj_kind, pair) - *part).coeff_norm()) /
                  s;
    if (viol > 1e-7)
      throw NumericalError("factor left the fixed-point subgroup (residual " + std::to_string(viol) +
                           "); uniqueness violated, this is a solver bug");
  }
  return f;
}

}  // namespace loopflat
