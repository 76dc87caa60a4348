#include "loopflat/io.hpp"

#include <algorithm>
#include <sstream>

#include "loopflat/errors.hpp"

namespace loopflat {

namespace {

Mat block_signs(int plus, int minus) {
  Mat m = Mat::Identity(plus + minus, plus + minus);
  for (int i = plus; i < plus + minus; ++i) m(i, i) = -1.0;
  return m;
}

std::vector<double> flat_re(const Mat& m) {
  std::vector<double> v(static_cast<std::size_t>(m.size()));
  for (Eigen::Index c = 0, k = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r) v[static_cast<std::size_t>(k++)] = m(r, c).real();
  return v;
}

std::vector<double> flat_im(const Mat& m) {
  std::vector<double> v(static_cast<std::size_t>(m.size()));
  for (Eigen::Index c = 0, k = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r) v[static_cast<std::size_t>(k++)] = m(r, c).imag();
  return v;
}

Mat unflatten(const std::vector<double>& re, const std::vector<double>& im, int n) {
  Mat m(n, n);
  for (int c = 0, k = 0; c < n; ++c)
    for (int r = 0; r < n; ++r, ++k) m(r, c) = Cplx(re[static_cast<std::size_t>(k)], im[static_cast<std::size_t>(k)]);
  return m;
}

}  // namespace

RunConfig RunConfig::from_json(const Json& j) {
  RunConfig cfg;
  cfg.case_key = j.value("case", cfg.case_key);
  cfg.seed_mode = j.value("seed_mode", cfg.seed_mode);
  if (j.contains("explicit_generators"))
    cfg.explicit_generators = j.at("explicit_generators").get<std::vector<std::vector<double>>>();
  if (j.contains("grid")) {
    const Json& g = j.at("grid");
    cfg.grid.r = g.value("r", cfg.grid.r);
    cfg.grid.extent = g.value("extent", cfg.grid.extent);
    cfg.grid.points = g.value("points", cfg.grid.points);
  }
  if (j.contains("lambdas")) cfg.lambdas = j.at("lambdas").get<std::vector<double>>();
  cfg.degree = j.value("degree", cfg.degree);
  cfg.window = j.value("window", cfg.window);
  cfg.seed_scale = j.value("seed_scale", cfg.seed_scale);
  cfg.rng_seed = j.value("rng_seed", cfg.rng_seed);
  cfg.tol_fit = j.value("tol_fit", cfg.tol_fit);
  cfg.tol_membership = j.value("tol_membership", cfg.tol_membership);
  cfg.out_dir = j.value("out", cfg.out_dir);
  if (!(cfg.tol_fit > 0.0) || !(cfg.tol_membership > 0.0))
    throw ConfigError("tolerances must be positive");
  cfg.grid.validate();
  for (double l : cfg.lambdas)
    if (!(l > 0.0)) throw ConfigError("lambda samples must be positive reals");
  return cfg;
}

Json RunConfig::to_json() const {
  Json j;
  j["case"] = case_key;
  j["seed_mode"] = seed_mode;
  if (!explicit_generators.empty()) j["explicit_generators"] = explicit_generators;
  j["grid"] = Json{{"r", grid.r}, {"extent", grid.extent}, {"points", grid.points}};
  j["lambdas"] = lambdas;
  j["degree"] = degree;
  j["window"] = window;
  j["seed_scale"] = seed_scale;
  j["rng_seed"] = rng_seed;
  j["tol_fit"] = tol_fit;
  j["tol_membership"] = tol_membership;
  j["out"] = out_dir;
  return j;
}

ConstructionPlan construction_plan(const std::string& case_key) {
  ConstructionPlan plan;
  if (case_key.rfind("sphere:", 0) == 0) {
    int n = 0, k = 0;
    if (std::sscanf(case_key.c_str(), "sphere:n=%d,k=%d", &n, &k) != 2)
      throw ConfigError("bad sphere case key: " + case_key);
    plan.kind = CaseKind::Sphere;
    plan.seed_dim = k;
    plan.supported = k >= 1 && k <= 3;
    return plan;
  }
  if (case_key.rfind("cpn_real:", 0) == 0) {
    int n = 0;
    if (std::sscanf(case_key.c_str(), "cpn_real:n=%d", &n) != 1)
      throw ConfigError("bad case key: " + case_key);
    plan.kind = CaseKind::TotallyReal;
    plan.seed_dim = n;
    plan.supported = n >= 2 && n <= 3;
    return plan;
  }
  if (case_key == "g2") {
    plan.kind = CaseKind::G2Frame;
    plan.seed_dim = 2;  // the secondary rank; deformations of complex curves in S^6
    plan.supported = true;
    return plan;
  }
  plan.supported = false;
  return plan;
}

PairwiseSymmetricAlgebra construction_pair(const std::string& case_key) {
  auto cases = catalog();
  const GeometryCase* c = find_case(cases, case_key);
  if (!c) throw ConfigError("unknown case key: " + case_key);
  if (!c->build) throw ConfigError("case has no constructive pair: " + case_key);
  return c->build();
}

CurvedFlatSeed seed_for(const RunConfig& cfg, const PairwiseSymmetricAlgebra& pair) {
  ConstructionPlan plan = construction_plan(cfg.case_key);
  if (!plan.supported) throw ConfigError("construction not supported for case " + cfg.case_key);
  if (cfg.seed_mode == "explicit") {
    if (cfg.explicit_generators.empty()) throw ConfigError("explicit seed mode needs generators");
    std::vector<Mat> gens;
    for (const auto& coords : cfg.explicit_generators) {
      if (static_cast<int>(coords.size()) != pair.u_minus.dim())
        throw ConfigError("generator coordinate length must be dim u_- = " +
                          std::to_string(pair.u_minus.dim()));
      RVec c = Eigen::Map<const RVec>(coords.data(), static_cast<Eigen::Index>(coords.size()));
      gens.push_back(pair.u_minus.element(c));
    }
    return make_seed(std::move(gens), pair);
  }
  if (cfg.seed_mode == "random") {
    auto cartan = maximal_abelian_in(pair.u_minus, cfg.rng_seed);
    std::vector<Mat> gens;
    for (int i = 0; i < plan.seed_dim; ++i) {
      const Mat& m = cartan.matrices()[static_cast<std::size_t>(i)];
      gens.push_back(m * (cfg.seed_scale / m.norm()));
    }
    return make_seed(std::move(gens), pair);
  }
  if (cfg.seed_mode != "aligned") throw ConfigError("unknown seed mode: " + cfg.seed_mode);
  // aligned: V = p' when its dimension matches the seed, otherwise a seeded
  // random subspace of p' of the right dimension (the G2 surface case)
  if (pair.p_prime().dim() == plan.seed_dim)
    return seed_from_alignment(pair, pair.p_prime(), cfg.seed_scale, cfg.rng_seed);
  std::mt19937_64 rng(cfg.rng_seed);
  std::vector<Mat> vgens;
  for (int i = 0; i < plan.seed_dim; ++i) vgens.push_back(pair.p_prime().random_element(rng));
  auto v = SubspaceBasis::from_matrices(vgens);
  if (v.dim() != plan.seed_dim) throw NumericalError("random subspace of p' degenerated");
  return seed_from_alignment(pair, v, cfg.seed_scale, cfg.rng_seed);
}

Json frame_dump(const FrameField& field, const RunConfig& cfg) {
  Json j;
  j["kind"] = "loopflat-frame-dump";
  j["version"] = 1;
  j["case"] = field.case_key.empty() ? cfg.case_key : field.case_key;
  j["grid"] = Json{{"r", field.grid.r}, {"extent", field.grid.extent}, {"points", field.grid.points}};
  j["lambdas"] = field.lambdas;
  j["ambient"] = field.ambient();
  j["mask"] = field.mask;
  j["tolerances"] = Json{{"fit", cfg.tol_fit}, {"membership", cfg.tol_membership}};
  Json frames = Json::array();
  for (std::size_t li = 0; li < field.lambdas.size(); ++li) {
    Json per_lambda = Json::array();
    for (std::size_t i = 0; i < field.grid.size(); ++i) {
      if (!field.mask[i]) {
        per_lambda.push_back(nullptr);
        continue;
      }
      const Mat& f = field.frames[li][i];
      per_lambda.push_back(Json{{"re", flat_re(f)}, {"im", flat_im(f)}});
    }
    frames.push_back(std::move(per_lambda));
  }
  j["frames"] = std::move(frames);
  return j;
}

FrameField parse_frame_dump(const Json& j) {
  if (!j.is_object() || j.value("kind", "") != "loopflat-frame-dump")
    throw ConfigError("not a frame dump");
  FrameField field;
  field.case_key = j.value("case", "");
  const Json& g = j.at("grid");
  field.grid.r = g.at("r").get<int>();
  field.grid.extent = g.at("extent").get<double>();
  field.grid.points = g.at("points").get<int>();
  field.grid.validate();
  field.lambdas = j.at("lambdas").get<std::vector<double>>();
  field.mask = j.at("mask").get<std::vector<std::uint8_t>>();
  const int n = j.at("ambient").get<int>();
  if (field.mask.size() != field.grid.size()) throw ConfigError("mask size mismatch");
  const Json& frames = j.at("frames");
  if (frames.size() != field.lambdas.size()) throw ConfigError("frame payload size mismatch");
  field.frames.assign(field.lambdas.size(), std::vector<Mat>(field.grid.size(), Mat::Zero(n, n)));
  for (std::size_t li = 0; li < frames.size(); ++li) {
    const Json& per_lambda = frames[li];
    if (per_lambda.size() != field.grid.size()) throw ConfigError("frame payload size mismatch");
    for (std::size_t i = 0; i < per_lambda.size(); ++i) {
      if (per_lambda[i].is_null()) continue;
      auto re = per_lambda[i].at("re").get<std::vector<double>>();
      auto im = per_lambda[i].at("im").get<std::vector<double>>();
      if (re.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n) || im.size() != re.size())
        throw ConfigError("frame entry size mismatch");
      field.frames[li][i] = unflatten(re, im, n);
    }
  }
  return field;
}

Json verdict_to_json(const VerdictRow& row) {
  Json j;
  j["case"] = row.key;
  j["description"] = row.description;
  j["computed"] = row.computed;
  if (row.computed) {
    j["dim_p_prime"] = row.dim_p_prime;
    j["rank"] = row.rank;
    j["riemannian_secondary"] = row.riemannian_secondary;
    j["witness_used"] = row.witness_used;
  }
  j["exists"] = row.exists;
  if (!row.note.empty()) j["note"] = row.note;
  return j;
}

Json table_to_json(const std::vector<VerdictRow>& rows) {
  Json j = Json::array();
  for (const auto& r : rows) j.push_back(verdict_to_json(r));
  return j;
}

std::string table_to_csv(const std::vector<VerdictRow>& rows) {
  std::ostringstream os;
  os << "case,dim_p_prime,rank,riemannian_secondary,exists,note\n";
  for (const auto& r : rows) {
    os << r.key << ",";
    if (r.computed)
      os << r.dim_p_prime << "," << r.rank << "," << (r.riemannian_secondary ? 1 : 0) << ",";
    else
      os << ",,,";
    os << (r.exists ? 1 : 0) << ",\"" << r.note << "\"\n";
  }
  return os.str();
}

Json geometry_report_to_json(const GeometryReport& rep) {
  Json j;
  j["case"] = rep.case_key;
  j["lambda"] = rep.lambda.real();
  j["curvature_conn_mean"] = rep.curvature_conn_mean;
  j["curvature_ext_mean"] = rep.curvature_ext_mean;
  j["estimator_gap"] = rep.estimator_gap;
  j["sff_max"] = rep.sff_max;
  j["normal_curvature_max"] = rep.normal_curvature_max;
  j["lagrangian_max"] = rep.lagrangian_max;
  j["legendrian_max"] = rep.legendrian_max;
  j["flags"] = Json{{"all_finite", rep.flags.all_finite},
                    {"estimators_agree", rep.flags.estimators_agree},
                    {"totally_geodesic", rep.flags.totally_geodesic},
                    {"flat_normal_bundle", rep.flags.flat_normal_bundle},
                    {"totally_real", rep.flags.totally_real},
                    {"legendrian", rep.flags.legendrian},
                    {"transversal", rep.flags.transversal}};
  j["curvature_conn"] = rep.curvature_conn;
  j["curvature_ext"] = rep.curvature_ext;
  j["sff_norm"] = rep.sff_norm;
  j["valid"] = rep.valid;
  return j;
}

std::string samples_csv(const FrameField& field, const PairwiseSymmetricAlgebra& pair,
                        CaseKind kind) {
  std::vector<ImmersionSamples> per_lambda;
  for (double l : field.lambdas)
    per_lambda.push_back(project(field, pair, kind, ProjectionTarget::UK, Cplx(l, 0.0)));
  std::ostringstream os;
  os.precision(17);
  os << "index";
  for (int d = 0; d < field.grid.r; ++d) os << ",x" << d;
  int dim = 0;
  for (std::size_t i = 0; i < field.grid.size(); ++i)
    if (field.mask[i]) {
      dim = static_cast<int>(per_lambda[0].points[i].size());
      break;
    }
  for (std::size_t li = 0; li < field.lambdas.size(); ++li)
    for (int c = 0; c < dim; ++c) os << ",l" << li << "_c" << c;
  os << "\n";
  for (std::size_t i = 0; i < field.grid.size(); ++i) {
    if (!field.mask[i]) continue;
    os << i;
    for (double x : field.grid.point_of(i)) os << "," << x;
    for (std::size_t li = 0; li < field.lambdas.size(); ++li)
      for (int c = 0; c < dim; ++c) os << "," << per_lambda[li].points[i](c);
    os << "\n";
  }
  return os.str();
}

std::string samples_obj(const ImmersionSamples& samples) {
  if (samples.grid.r != 2) throw ConfigError("OBJ export needs a 2-dimensional domain");
  // orthogonal projection to R^3 along the three leading directions of the cloud
  std::vector<std::size_t> live;
  for (std::size_t i = 0; i < samples.points.size(); ++i)
    if (samples.mask[i]) live.push_back(i);
  if (live.empty()) throw ConfigError("no samples to export");
  const int dim = static_cast<int>(samples.points[live[0]].size());
  RMat cloud(static_cast<Eigen::Index>(live.size()), dim);
  for (std::size_t i = 0; i < live.size(); ++i) cloud.row(static_cast<Eigen::Index>(i)) = samples.points[live[i]].transpose();
  RVec mean = cloud.colwise().mean();
  RMat centered = cloud.rowwise() - mean.transpose();
  Eigen::JacobiSVD<RMat> svd(centered, Eigen::ComputeThinV);
  RMat proj = svd.matrixV().leftCols(std::min(3, dim));

  std::ostringstream os;
  os.precision(17);
  os << "# loopflat surface export, case " << samples.case_key << ", lambda "
     << samples.lambda.real() << "\n";
  os << "# orthogonal projection matrix (rows = R^3 axes, columns = ambient):\n";
  for (int r = 0; r < proj.cols(); ++r) {
    os << "#";
    for (int c = 0; c < dim; ++c) os << " " << proj(c, r);
    os << "\n";
  }
  std::vector<long> vertex_id(samples.points.size(), -1);
  long next = 1;
  for (std::size_t i = 0; i < samples.points.size(); ++i) {
    if (!samples.mask[i]) continue;
    RVec p3 = proj.transpose() * samples.points[i];
    os << "v";
    for (int c = 0; c < 3; ++c) os << " " << (c < p3.size() ? p3(c) : 0.0);
    os << "\n";
    vertex_id[i] = next++;
  }
  const int pts = samples.grid.points;
  std::vector<int> cell(2);
  for (int a = 0; a + 1 < pts; ++a) {
    for (int b = 0; b + 1 < pts; ++b) {
      cell[0] = a;
      cell[1] = b;
      std::size_t i00 = samples.grid.index_of(cell.data());
      cell[1] = b + 1;
      std::size_t i01 = samples.grid.index_of(cell.data());
      cell[0] = a + 1;
      std::size_t i11 = samples.grid.index_of(cell.data());
      cell[1] = b;
      std::size_t i10 = samples.grid.index_of(cell.data());
      if (vertex_id[i00] < 0 || vertex_id[i01] < 0 || vertex_id[i11] < 0 || vertex_id[i10] < 0)
        continue;
      os << "f " << vertex_id[i00] << " " << vertex_id[i10] << " " << vertex_id[i11] << "\n";
      os << "f " << vertex_id[i00] << " " << vertex_id[i11] << " " << vertex_id[i01] << "\n";
    }
  }
  return os.str();
}

Json VerifyOutcome::to_json() const {
  Json j;
  j["pass"] = pass;
  j["fit_residual"] = fit_residual;
  j["proj_residual"] = proj_residual;
  j["residuals"] = Json{{"curvature_balance", residuals.curvature_balance},
                        {"pm_parallel", residuals.pm_parallel},
                        {"mm_parallel", residuals.mm_parallel},
                        {"mixed_wedge", residuals.mixed_wedge},
                        {"wedge_balance", residuals.wedge_balance}};
  j["flagged_points"] = flagged_points;
  return j;
}

VerifyOutcome verify_dump(const Json& dump) {
  FrameField field = parse_frame_dump(dump);
  if (field.case_key.empty()) throw ConfigError("dump carries no case key");
  PairwiseSymmetricAlgebra pair = construction_pair(field.case_key);
  double fit_tol = 1e-6;
  if (dump.contains("tolerances")) fit_tol = dump.at("tolerances").value("fit", fit_tol);

  VerifyOutcome out;
  ConnectionData11 conn;
  try {
    conn = extract_connection(field, pair, fit_tol);
  } catch (const VerificationError&) {
    // keep going with a loose fit so the residual suite can localize the fault
    conn = extract_connection(field, pair, 1e3);
    out.pass = false;
  }
  out.fit_residual = conn.fit_residual;
  out.proj_residual = conn.proj_residual;
  out.residuals = mc_residuals(conn);

  // derivative identities scale with h^2; the derivative-free wedge balance
  // self-calibrates against its own median to localize injected faults
  const double h = field.grid.spacing();
  double scale = 1.0 + out.fit_residual;
  std::vector<double> nonzero;
  for (std::size_t i = 0; i < out.residuals.wedge_balance_pointwise.size(); ++i)
    if (conn.valid[i]) nonzero.push_back(out.residuals.wedge_balance_pointwise[i]);
  double median = 0.0;
  if (!nonzero.empty()) {
    std::nth_element(nonzero.begin(), nonzero.begin() + static_cast<long>(nonzero.size() / 2), nonzero.end());
    median = nonzero[nonzero.size() / 2];
  }
  double flag_level = std::max(100.0 * median, 1e-8);
  for (std::size_t i = 0; i < out.residuals.wedge_balance_pointwise.size(); ++i)
    if (conn.valid[i] && out.residuals.wedge_balance_pointwise[i] > flag_level)
      out.flagged_points.push_back(i);

  bool deriv_ok = out.residuals.curvature_balance < 50.0 * h * h * scale &&
                  out.residuals.pm_parallel < 50.0 * h * h * scale &&
                  out.residuals.mm_parallel < 50.0 * h * h * scale;
  out.pass = out.fit_residual <= fit_tol && deriv_ok && out.flagged_points.empty();
  return out;
}

}  // namespace loopflat
