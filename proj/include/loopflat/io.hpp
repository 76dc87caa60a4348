#pragma once

#include <json.hpp>

#include "loopflat/geometry.hpp"
#include "loopflat/obstruction.hpp"

namespace loopflat {

using Json = nlohmann::json;

/// One construction run: case selection, seeding, grid, spectral samples,
/// truncation and tolerances. Serialization round-trips exactly.
struct RunConfig {
  std::string case_key = "sphere:n=4,k=2";
  std::string seed_mode = "aligned";  // aligned | explicit | random
  // explicit mode: generator coordinates in the orthonormal basis of u_-
  std::vector<std::vector<double>> explicit_generators;
  GridSpec grid{2, 0.8, 33};
  std::vector<double> lambdas = {0.5, 0.8, 1.0, 1.25, 2.0};
  int degree = 16;   // factorization truncation degree
  int window = 16;   // Laurent window of the exponentials
  double seed_scale = 0.45;
  std::uint64_t rng_seed = 7;
  double tol_fit = 1e-6;
  double tol_membership = 1e-7;
  std::string out_dir = ".";

  static RunConfig from_json(const Json& j);
  Json to_json() const;
};

/// Kind of construction behind a catalog key, when supported.
struct ConstructionPlan {
  CaseKind kind = CaseKind::Sphere;
  int seed_dim = 2;
  bool supported = false;
};
ConstructionPlan construction_plan(const std::string& case_key);

/// Build the pairwise symmetric algebra of a constructible case.
PairwiseSymmetricAlgebra construction_pair(const std::string& case_key);

/// Run the aligned/explicit/random seeding for a config.
CurvedFlatSeed seed_for(const RunConfig& cfg, const PairwiseSymmetricAlgebra& pair);

/// Self-describing frame container: case, grid, lambda set, masks and
/// row-major matrix payloads. Re-verification needs no reconstruction.
Json frame_dump(const FrameField& field, const RunConfig& cfg);
FrameField parse_frame_dump(const Json& j);

Json verdict_to_json(const VerdictRow& row);
Json table_to_json(const std::vector<VerdictRow>& rows);
std::string table_to_csv(const std::vector<VerdictRow>& rows);

Json geometry_report_to_json(const GeometryReport& rep);

/// Per-lambda immersion samples as CSV: grid indices, domain coordinates,
/// then one coordinate block per lambda.
std::string samples_csv(const FrameField& field, const PairwiseSymmetricAlgebra& pair,
                        CaseKind kind);

/// Wavefront OBJ of the r = 2 sample grid after an orthogonal projection to
/// R^3 (the projection matrix is recorded in the header comment).
std::string samples_obj(const ImmersionSamples& samples);

/// The verification battery run by the CLI on a frame dump: connection-order
/// fit, subspace residuals, the five component identities, and pointwise
/// fault flags from the derivative-free wedge balance.
struct VerifyOutcome {
  bool pass = false;
  double fit_residual = 0.0;
  double proj_residual = 0.0;
  McResiduals residuals;
  std::vector<std::size_t> flagged_points;
  Json to_json() const;
};
VerifyOutcome verify_dump(const Json& dump);

}  // namespace loopflat
