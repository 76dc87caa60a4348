#pragma once

#include <string>
#include <vector>

#include "loopflat/linalg.hpp"

namespace loopflat {

enum class Family { so, su_real, sp, sl_real, sp_real, g2 };

Family family_from_string(const std::string& s);
std::string family_to_string(Family f);

/// A linear involutive automorphism of a matrix Lie algebra.
struct Involution {
  enum class Kind { AdMatrix, Composite };
  Kind kind = Kind::AdMatrix;
  Mat matrix;  // conjugating matrix when kind == AdMatrix
  MatMap action;
  std::string label;

  Mat operator()(const Mat& x) const { return action(x); }
};

Involution ad_involution(const Mat& p, const std::string& label);
Involution composite_involution(MatMap fn, const std::string& label);
Involution identity_involution(int ambient);

/// Finite-dimensional matrix Lie algebra with a fixed basis, structure
/// constants and the Killing form computed from them.
struct LieAlgebraBasis {
  std::string name;
  int ambient = 0;
  std::vector<Mat> basis;
  SubspaceBasis span;
  std::vector<RMat> ad;  // ad(b_i) in basis coordinates
  RMat killing;          // killing(i,j) = tr(ad b_i · ad b_j)
  bool compact = false;  // basis is anti-Hermitian (definite invariant product available)

  int dim() const { return static_cast<int>(basis.size()); }

  Mat bracket(const Mat& x, const Mat& y) const { return comm(x, y); }

  /// Coordinates in the stored (not necessarily orthonormal) basis.
  /// Throws if x is outside the span beyond `tol`.
  RVec coords(const Mat& x, double tol = 1e-9) const;

  /// Killing form via structure constants. Domain error outside the span.
  double killing_form(const Mat& x, const Mat& y) const;

  /// Definite inner product used for all metric operations: -Re tr(XY) on
  /// compact forms. On non-compact forms the raw trace form is returned and
  /// callers must consult the signature before treating it as a metric.
  double inner(const Mat& x, const Mat& y) const;

  /// max over basis triples of ‖[[x,y],z] + [[y,z],x] + [[z,x],y]‖.
  double jacobi_residual() const;

  /// max over basis pairs of the bracket's distance to the span.
  double closure_residual() const;

 private:
  RMat pinv_;  // least-squares solve for coords
  friend LieAlgebraBasis make_algebra(std::string name, int ambient, std::vector<Mat> basis);
};

/// Assemble span, structure constants, Killing form; validates closure.
LieAlgebraBasis make_algebra(std::string name, int ambient, std::vector<Mat> basis);

/// Catalog constructions. Size conventions:
///   so: n is the ambient size m, giving so(m);
///   su_real: su(n+1) in its real (2n+2)x(2n+2) representation;
///   sp: compact sp(m) in the complex 2m x 2m representation, n = m;
///   sl_real: sl(m, R), n = m;
///   sp_real: sp(m, R) in the real 2m x 2m representation, n = m;
///   g2: n ignored, 7x7 derivation representation.
LieAlgebraBasis build_algebra(Family f, int n);

/// Parse catalog keys like "so:5", "su_real:2", "g2".
LieAlgebraBasis build_algebra(const std::string& key);

}  // namespace loopflat
