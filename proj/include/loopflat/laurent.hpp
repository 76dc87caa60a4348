#pragma once

#include "loopflat/symmetric_pair.hpp"

namespace loopflat {

/// Truncated matrix-coefficient Laurent series sum c_i lambda^i over a degree
/// window, with a running bound on everything discarded, measured in the sup
/// norm over the evaluation annulus r_minus <= |lambda| <= r_plus.
class LaurentLoop {
 public:
  static constexpr double r_minus = 0.5;
  static constexpr double r_plus = 2.0;

  LaurentLoop() = default;
  LaurentLoop(int lo, std::vector<Mat> coeffs, double trunc_bound = 0.0);

  static LaurentLoop constant(const Mat& c);
  static LaurentLoop identity(int n);
  static LaurentLoop monomial(const Mat& c, int degree);

  bool empty() const { return coeffs_.empty(); }
  int lo() const { return lo_; }
  int hi() const { return lo_ + static_cast<int>(coeffs_.size()) - 1; }
  int ambient() const { return coeffs_.empty() ? 0 : static_cast<int>(coeffs_[0].rows()); }
  double trunc_bound() const { return trunc_bound_; }

  /// Coefficient at `degree`; zero outside the window.
  Mat coeff(int degree) const;

  Mat eval(Cplx lambda) const;

  /// Drop coefficients outside [a, b]; their annulus mass is added to the bound.
  LaurentLoop truncated(int a, int b) const;
  /// Drop trailing/leading coefficients below `tol` (window shrink only).
  LaurentLoop trimmed(double tol = 0.0) const;

  /// sum over the window of ‖c_i‖_2 · sup_annulus |lambda|^i.
  double annulus_norm() const;
  /// sqrt(sum ‖c_i‖_F^2) — coefficient-space distance.
  double coeff_norm() const;

  LaurentLoop scaled(Cplx s) const;
  LaurentLoop shifted(int degrees) const;  // multiply by lambda^degrees

  friend LaurentLoop operator+(const LaurentLoop& a, const LaurentLoop& b);
  friend LaurentLoop operator-(const LaurentLoop& a, const LaurentLoop& b);
  friend LaurentLoop operator*(const LaurentLoop& a, const LaurentLoop& b);
  friend LaurentLoop operator*(const Mat& c, const LaurentLoop& a);
  friend LaurentLoop operator*(const LaurentLoop& a, const Mat& c);

 private:
  int lo_ = 0;
  std::vector<Mat> coeffs_;
  double trunc_bound_ = 0.0;
};

/// exp(g lambda^deg) summed until the factorial tail is below 1e-16 relative,
/// truncated to [-window, window] with the tail folded into the bound.
LaurentLoop loop_exp_monomial(const Mat& g, int deg, int window);

/// exp of a general Laurent polynomial argument by series summation.
LaurentLoop loop_exp(const LaurentLoop& x, int window);

/// Inverse of a one-sided loop with invertible degree-0 coefficient, by the
/// Neumann series on the strictly-signed part. Exact on the window for
/// polynomial input (the discarded powers never feed back into kept degrees).
LaurentLoop invert_onesided(const LaurentLoop& y, int window);

enum class LoopInvolution { rho, sigma, tau, rho2, rho_tilde };
enum class Reality { rho, rho2 };

/// Coefficient-level action of the extended involutions:
///   rho:   c_i -> conj(c_i)            sigma: c_i -> sigma0(c_i) (-1)^i
///   tau:   c_i -> tau0(c_-i) (-1)^i    rho2:  c_i -> conj(c_-i)
///   rho_tilde: c_i -> conj(tau0(sigma0(c_i)))
/// tau and sigma must be conjugations by a matrix so the same action is valid
/// on group-valued and algebra-valued loops.
LaurentLoop apply_involution(const LaurentLoop& x, LoopInvolution which,
                             const PairwiseSymmetricAlgebra& pair);

struct FixednessReport {
  bool fixed = false;
  double residual = 0.0;  // max of the three component residuals
  double rho_residual = 0.0, sigma_residual = 0.0, tau_residual = 0.0;
};

/// Fixedness under the three involutions (reality picks rho or rho2), measured
/// coefficient-wise relative to the loop size.
FixednessReport is_in_H(const LaurentLoop& x, const PairwiseSymmetricAlgebra& pair,
                        Reality reality, double tol = 1e-8);

}  // namespace loopflat
