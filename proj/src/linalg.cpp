#include "loopflat/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "loopflat/errors.hpp"

namespace loopflat {

double frob_inner(const Mat& a, const Mat& b) {
  return (a.array() * b.array().conjugate()).sum().real();
}

double trace_form(const Mat& a, const Mat& b) { return (a * b).trace().real(); }

RVec vec_real(const Mat& m) {
  const Eigen::Index n = m.size();
  RVec v(2 * n);
  v.head(n) = Eigen::Map<const Eigen::VectorXcd>(m.data(), n).real();
  v.tail(n) = Eigen::Map<const Eigen::VectorXcd>(m.data(), n).imag();
  return v;
}

Mat unvec_real(const RVec& v, int rows, int cols) {
  const Eigen::Index n = static_cast<Eigen::Index>(rows) * cols;
  Eigen::VectorXcd c(n);
  c.real() = v.head(n);
  c.imag() = v.tail(n);
  return Eigen::Map<const Mat>(c.data(), rows, cols);
}

SubspaceBasis SubspaceBasis::from_matrices(const std::vector<Mat>& mats, double tol) {
  SubspaceBasis s;
  if (mats.empty()) return s;
  s.rows_ = static_cast<int>(mats[0].rows());
  s.cols_ = static_cast<int>(mats[0].cols());
  RMat stacked(2 * s.rows_ * s.cols_, static_cast<Eigen::Index>(mats.size()));
  for (std::size_t i = 0; i < mats.size(); ++i) stacked.col(static_cast<Eigen::Index>(i)) = vec_real(mats[i]);
  // JacobiSVD: BDCSVD mishandles degenerate spectra with zero columns (wrong U)
  Eigen::JacobiSVD<RMat> svd(stacked, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  int d = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol * std::max(1.0, sv(0))) ++d;
  s.q_ = svd.matrixU().leftCols(d);
  s.mats_.reserve(d);
  for (int i = 0; i < d; ++i) s.mats_.push_back(unvec_real(s.q_.col(i), s.rows_, s.cols_));
  return s;
}

RVec SubspaceBasis::coords(const Mat& x) const { return q_.transpose() * vec_real(x); }

Mat SubspaceBasis::element(const RVec& c) const { return unvec_real(q_ * c, rows_, cols_); }

Mat SubspaceBasis::project(const Mat& x) const {
  if (dim() == 0) return Mat::Zero(x.rows(), x.cols());
  return element(coords(x));
}

double SubspaceBasis::membership_residual(const Mat& x) const {
  return (x - project(x)).norm() / std::max(1.0, x.norm());
}

Mat SubspaceBasis::random_element(std::mt19937_64& rng) const {
  std::normal_distribution<double> gauss(0.0, 1.0);
  RVec c(dim());
  for (int i = 0; i < dim(); ++i) c(i) = gauss(rng);
  c.normalize();
  return element(c);
}

SubspaceBasis SubspaceBasis::complement_in(const SubspaceBasis& ambient, double tol) const {
  std::vector<Mat> rest;
  for (const auto& m : ambient.matrices()) {
    Mat r = m - project(m);
    if (r.norm() > tol) rest.push_back(r);
  }
  return SubspaceBasis::from_matrices(rest, tol);
}

SubspaceBasis intersect(const SubspaceBasis& a, const SubspaceBasis& b, double tol) {
  if (a.dim() == 0 || b.dim() == 0) return SubspaceBasis();
  RMat m = a.frame().transpose() * b.frame();
  Eigen::JacobiSVD<RMat> svd(m, Eigen::ComputeThinU);
  std::vector<Mat> found;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()(i) > 1.0 - tol) {
      RVec c = svd.matrixU().col(i);
      found.push_back(unvec_real(a.frame() * c, a.rows(), a.cols()));
    }
  }
  return SubspaceBasis::from_matrices(found, tol);
}

SubspaceBasis eigenspace_in(const SubspaceBasis& space, const MatMap& op, double eigval,
                            double tol, double* asym) {
  const int d = space.dim();
  if (d == 0) return space;
  RMat rep(d, d);
  for (int j = 0; j < d; ++j) rep.col(j) = space.coords(op(space.matrices()[j]));
  double a = (rep - rep.transpose()).norm() / std::max(1.0, rep.norm());
  if (asym) *asym = a;
  RMat sym = 0.5 * (rep + rep.transpose());
  Eigen::SelfAdjointEigenSolver<RMat> es(sym);
  std::vector<Mat> vecs;
  for (int i = 0; i < d; ++i) {
    if (std::abs(es.eigenvalues()(i) - eigval) < 0.5) {
      if (std::abs(es.eigenvalues()(i) - eigval) > tol)
        throw NumericalError("eigenspace_in: eigenvalue " + std::to_string(es.eigenvalues()(i)) +
                             " not within tolerance of " + std::to_string(eigval));
      vecs.push_back(space.element(es.eigenvectors().col(i)));
    }
  }
  return SubspaceBasis::from_matrices(vecs, 1e-12);
}

SubspaceBasis centralizer_in(const SubspaceBasis& space, const Mat& x, double tol) {
  const int d = space.dim();
  if (d == 0) return space;
  RMat m(2 * space.rows() * space.cols(), d);
  for (int j = 0; j < d; ++j) m.col(j) = vec_real(comm(x, space.matrices()[j]));
  Eigen::JacobiSVD<RMat> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double lead = std::max(1.0, sv.size() ? sv(0) : 0.0);
  std::vector<Mat> vecs;
  for (int i = 0; i < d; ++i) {
    double s = i < sv.size() ? sv(i) : 0.0;
    if (s <= tol * lead) vecs.push_back(space.element(svd.matrixV().col(i)));
  }
  return SubspaceBasis::from_matrices(vecs, 1e-12);
}

RVec trace_form_spectrum(const SubspaceBasis& space) {
  const int d = space.dim();
  RMat g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) g(i, j) = g(j, i) = trace_form(space.matrices()[i], space.matrices()[j]);
  Eigen::SelfAdjointEigenSolver<RMat> es(g);
  return es.eigenvalues();
}

bool trace_form_definite(const SubspaceBasis& space, double margin, int* sign) {
  RVec ev = trace_form_spectrum(space);
  if (ev.size() == 0) return false;
  double scale = ev.cwiseAbs().maxCoeff();
  if (scale == 0.0) return false;
  bool pos = ev.minCoeff() > margin * scale;
  bool neg = ev.maxCoeff() < -margin * scale;
  if (sign) *sign = pos ? 1 : (neg ? -1 : 0);
  return pos || neg;
}

}  // namespace loopflat
