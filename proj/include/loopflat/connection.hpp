#pragma once

#include "loopflat/flows.hpp"

namespace loopflat {

/// The three coefficient fields of a degree (-1, 1) Maurer-Cartan form written
/// in the basis 1, (lambda - 1/lambda), (lambda + 1/lambda):
///   alpha = a0 + a1pm (lambda - 1/lambda) + a1mm (lambda + 1/lambda),
/// with a0 in k', a1pm in k cap u_-, a1mm in p'.
struct ConnectionData11 {
  GridSpec grid;
  std::vector<std::vector<Mat>> a0, a1pm, a1mm;  // [point][direction]
  std::vector<std::uint8_t> valid;               // interior points with trusted stencils
  double fit_residual = 0.0;   // max lambda-fit (or off-pattern) residual over valid points
  double proj_residual = 0.0;  // max distance of the coefficients to their subspaces
};

/// Extract the connection coefficients from frame samples: per point and
/// direction D(x, lambda) = F^{-1} dF by 4th-order central differences (2nd
/// order one-sided near the faces, those points flagged invalid), then a
/// least-squares fit over the real lambda samples onto the three-function
/// basis. Requires at least 4 distinct real lambdas. Throws VerificationError
/// when the fit residual exceeds fit_tol (the field is not of connection
/// order (-1,1)). Coefficients are stored as fitted; their distance to the
/// expected subspaces is reported in proj_residual (stencil-limited for a
/// lifted field, order one for inputs that are not solutions).
ConnectionData11 extract_connection(const FrameField& field, const PairwiseSymmetricAlgebra& pair,
                                    double fit_tol = 1e-6);

/// Same data taken from the lift's exact per-point coefficients. The fit
/// residual reports the off-pattern mass of the degree-1 coefficient instead
/// of a finite-difference fit error.
ConnectionData11 connection_from_exact(const FrameField& field,
                                       const PairwiseSymmetricAlgebra& pair);

/// Discrete residuals of the five component identities of the flat family:
///   curvature_balance: d a0 + a0^a0 + 2(a1mm^a1mm - a1pm^a1pm)
///   pm_parallel:       d a1pm + a0^a1pm + a1pm^a0
///   mm_parallel:       d a1mm + a0^a1mm + a1mm^a0
///   mixed_wedge:       a1pm^a1mm + a1mm^a1pm
///   wedge_balance:     a1mm^a1mm + a1pm^a1pm
/// Exterior derivatives by 2nd-order central differences; boundary points are
/// excluded from the norms. wedge_balance is also reported pointwise: it is
/// derivative-free, so it localizes injected faults.
struct McResiduals {
  double curvature_balance = 0.0;
  double pm_parallel = 0.0;
  double mm_parallel = 0.0;
  double mixed_wedge = 0.0;
  double wedge_balance = 0.0;
  std::vector<double> wedge_balance_pointwise;
  double max_residual() const {
    return std::max({curvature_balance, pm_parallel, mm_parallel, mixed_wedge, wedge_balance});
  }
};

/// `physical_margin`: exclude points within that distance of the domain faces
/// from the norms (used to compare residuals across resolutions on a common
/// region). Pointwise fields are still filled everywhere.
McResiduals mc_residuals(const ConnectionData11& conn, double physical_margin = 0.0);

}  // namespace loopflat
