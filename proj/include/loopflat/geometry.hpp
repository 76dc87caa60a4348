#pragma once

#include "loopflat/connection.hpp"

namespace loopflat {

/// Construction cases wired into the geometry diagnostics. Column conventions:
///   Sphere       so(n+1) frames; the immersion point is the last column.
///   TotallyReal  su(n+1) in the real representation [X, f, JX, Jf]; the
///                immersion point is column n (0-based), its J-image the last.
///   G2Frame      7x7 frames [f, N1, N2, X1, X2, Y1, Y2]; point is column 0.
enum class CaseKind { Sphere, TotallyReal, G2Frame };

enum class ProjectionTarget { UK, UUplus, UKcapUplus };

struct ImmersionSamples {
  std::string case_key;
  CaseKind kind = CaseKind::Sphere;
  Cplx lambda{1.0, 0.0};
  GridSpec grid;
  std::vector<RVec> points;  // embedded coordinates per grid point (empty when masked)
  std::vector<std::uint8_t> mask;
};

/// Case-specific coset representatives. UK: the distinguished column(s);
/// UUplus: the involution embedding F sigma0(F)^{-1}, flattened;
/// UKcapUplus: the frame itself, flattened.
ImmersionSamples project(const FrameField& field, const PairwiseSymmetricAlgebra& pair,
                         CaseKind kind, ProjectionTarget target, Cplx lambda);

/// Per-point ratio of first fundamental forms between two lambda values,
/// measured independently at each lambda by 4th-order differences of the
/// frames (Frobenius quotient of the coframe Gram matrices). Expected value:
/// ((a + 1/a)^2) / ((b + 1/b)^2) / ... times the same for b — constant over
/// the domain.
struct MetricRatio {
  std::vector<double> ratio;
  std::vector<std::uint8_t> valid;
  double expected = 0.0;
  double spread = 0.0;  // max |ratio/expected - 1| over valid points
};
MetricRatio metric_scaling(const FrameField& field, const PairwiseSymmetricAlgebra& pair,
                           Cplx lambda_a, Cplx lambda_b);

/// Geometry diagnostics of a projected family member.
struct GeometryReport {
  std::string case_key;
  Cplx lambda{1.0, 0.0};
  std::vector<double> curvature_conn;  // connection-form route (case identity fit)
  std::vector<double> curvature_ext;   // sample route (induced metric + Brioschi)
  std::vector<double> sff_norm;        // off-(k'+p') mass of the Maurer-Cartan form
  std::vector<double> normal_curvature_norm;  // sphere cases: normal-block curvature
  std::vector<double> lagrangian_residual;    // totally real case
  std::vector<double> legendrian_residual;
  std::vector<std::uint8_t> valid;  // interior, unmasked, both estimators defined

  double curvature_conn_mean = 0.0;
  double curvature_ext_mean = 0.0;
  double estimator_gap = 0.0;  // max |conn - ext| over valid points
  double sff_max = 0.0;
  double normal_curvature_max = 0.0;
  double lagrangian_max = 0.0;
  double legendrian_max = 0.0;

  struct Flags {
    bool all_finite = false;
    bool estimators_agree = false;    // gap <= 10 h^2
    bool totally_geodesic = false;    // sff_max <= 1e-6 (the lambda = 1 degeneration)
    bool flat_normal_bundle = false;  // sphere: normal curvature at the stencil floor
    bool totally_real = false;
    bool legendrian = false;
    bool transversal = false;
  } flags;
};

GeometryReport curvature_report(const FrameField& field, const PairwiseSymmetricAlgebra& pair,
                                CaseKind kind, double lambda);

/// Totally real case: ||X^t df||, ||(Jf)^t df|| and the transversality margin
/// (smallest singular value of the coframe).
struct LagrangianDiagnostics {
  std::vector<double> totally_real;
  std::vector<double> legendrian;
  std::vector<double> transversality;
  std::vector<std::uint8_t> valid;
  double totally_real_max = 0.0, legendrian_max = 0.0, transversality_min = 0.0;
};
LagrangianDiagnostics lagrangian_diagnostics(const FrameField& field,
                                             const PairwiseSymmetricAlgebra& pair, double lambda);

/// G2 case: block pattern of the connection, the three bundle-curvature
/// identities, J-invariance of the three sub-bundles, and the lambda = 1
/// complex-curve degeneration.
struct G2Report {
  double off_pattern_mass = 0.0;          // connection entries outside the frame pattern
  double omega1_residual = 0.0;           // d w1 + w1^w1 - 4 b1^b1^t
  double omega2_residual = 0.0;           // d w2 + w2^w2 - 4 b1^t^b1
  double omega3_residual = 0.0;           // d w3 + w3^w3 - 4 th2^th2^t
  double j_invariance = 0.0;              // max over sub-bundles and points
  double complex_curve_sff = 0.0;         // lambda = 1: [N^t dY, X^t dY] mass
  double tangent_j_invariance = 0.0;      // lambda = 1: J maps span(Y) to itself
  bool complex_curve = false;             // lambda = 1 flags combined
  std::vector<std::uint8_t> valid;
};
G2Report g2_report(const FrameField& field, const PairwiseSymmetricAlgebra& pair, double lambda);

/// Checks on the secondary projection. For a genuine curved flat (the
/// generating family) the u_- wedge vanishes and the pull-back metric is
/// intrinsically flat. For a lifted three-involution solution the component
/// identities make the wedge lambda-INDEPENDENT and equal to four times the
/// wedge of the p'-coefficient — it vanishes only when the reflective
/// submanifold is flat, so wedge_identity_residual is the structural check
/// there and wedge_residual reports the raw value.
struct SecondaryFlatness {
  double wedge_residual = 0.0;           // max over points of the u_- wedge
  double wedge_identity_residual = 0.0;  // max ||alpha_-^alpha_- - 4 C^C||
  double intrinsic_curvature = 0.0;      // max |K| over interior points (r = 2)
  std::vector<double> curvature_pointwise;
};
SecondaryFlatness secondary_projection_flatness(const FrameField& field,
                                                const PairwiseSymmetricAlgebra& pair,
                                                double lambda);

/// lambda = 1 sphere check: samples lie on a totally geodesic subsphere of
/// dimension k (distance of the sample cloud to its best rank-(k+1) span).
double geodesic_sphere_fit(const ImmersionSamples& samples, int k);

/// The lambda-independent part of the connection (sum of the tangential and
/// normal connections): max over lambda pairs and points of the difference of
/// the k'-projections of the exact Maurer-Cartan form.
double connection_lambda_drift(const FrameField& field, const PairwiseSymmetricAlgebra& pair,
                               const std::vector<double>& lambdas);

}  // namespace loopflat
