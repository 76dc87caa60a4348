#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <random>
#include <vector>

namespace loopflat {

using Cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

using MatMap = std::function<Mat(const Mat&)>;

inline Mat comm(const Mat& a, const Mat& b) { return a * b - b * a; }

/// Re tr(A B†) — the Frobenius inner product. For anti-Hermitian matrices this
/// equals -Re tr(AB), i.e. minus the trace form, so Frobenius-orthogonal
/// operations on compact real forms are orthogonal for the invariant metric.
double frob_inner(const Mat& a, const Mat& b);

/// Re tr(AB) — the Ad-invariant trace form (proportional to Killing on simple algebras).
double trace_form(const Mat& a, const Mat& b);

/// Stack [Re vec(M); Im vec(M)] so complex matrix subspaces with real
/// coefficient fields become plain real column spaces.
RVec vec_real(const Mat& m);
Mat unvec_real(const RVec& v, int rows, int cols);

/// An orthonormalized real-span of complex matrices. All subspace arithmetic
/// (membership, projection, intersection, eigensplits) happens here.
class SubspaceBasis {
 public:
  SubspaceBasis() = default;

  /// Orthonormalize the real span of the given matrices; directions with
  /// singular value below tol * leading are dropped.
  static SubspaceBasis from_matrices(const std::vector<Mat>& mats, double tol = 1e-10);

  int dim() const { return static_cast<int>(mats_.size()); }
  int rows() const { return rows_; }
  int cols() const { return cols_; }

  const std::vector<Mat>& matrices() const { return mats_; }
  const RMat& frame() const { return q_; }  // (2*rows*cols, dim), orthonormal columns

  /// Coordinates of X in the orthonormal basis (Frobenius-orthogonal projection coefficients).
  RVec coords(const Mat& x) const;
  Mat element(const RVec& coords) const;

  /// Frobenius-orthogonal projection of X onto the subspace.
  Mat project(const Mat& x) const;

  /// ‖X - project(X)‖_F / max(1, ‖X‖_F).
  double membership_residual(const Mat& x) const;

  /// Unit-norm random element (seeded generator supplied by the caller).
  Mat random_element(std::mt19937_64& rng) const;

  /// Orthogonal complement of this subspace inside `ambient` (both must share shape).
  SubspaceBasis complement_in(const SubspaceBasis& ambient, double tol = 1e-9) const;

 private:
  int rows_ = 0, cols_ = 0;
  RMat q_;
  std::vector<Mat> mats_;
};

/// Intersection via principal angles between the orthonormal frames.
SubspaceBasis intersect(const SubspaceBasis& a, const SubspaceBasis& b, double tol = 1e-8);

/// Eigenspace of a linear involutive operator restricted to `space`, for
/// eigenvalue ±1. The restriction is symmetrized before the eigensolve; the
/// asymmetry (operator not a Frobenius isometry on the space) is reported
/// through *asym if requested.
SubspaceBasis eigenspace_in(const SubspaceBasis& space, const MatMap& op, double eigval,
                            double tol = 1e-8, double* asym = nullptr);

/// Null space of the map Y -> [X, Y] restricted to `space` (the centralizer of X in the space).
SubspaceBasis centralizer_in(const SubspaceBasis& space, const Mat& x, double tol = 1e-8);

/// Eigenvalues of the trace form restricted to `space` (symmetric Gram of Re tr(XY)).
RVec trace_form_spectrum(const SubspaceBasis& space);

/// All eigenvalues strictly one sign with relative margin `margin`.
bool trace_form_definite(const SubspaceBasis& space, double margin = 1e-8, int* sign = nullptr);

}  // namespace loopflat
