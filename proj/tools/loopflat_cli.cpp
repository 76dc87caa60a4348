#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "loopflat/errors.hpp"
#include "loopflat/io.hpp"

using namespace loopflat;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerification = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + p.string());
  os << content;
}

int run_classify(const std::string& case_key, const std::string& format,
                 const std::string& out_path, std::uint64_t seed) {
  auto cases = catalog();
  std::vector<VerdictRow> rows;
  std::vector<const GeometryCase*> selected;
  if (case_key.empty()) {
    for (const auto& c : cases) selected.push_back(&c);
  } else {
    const GeometryCase* c = find_case(cases, case_key);
    if (!c) throw ConfigError("unknown case key: " + case_key);
    selected.push_back(c);
  }
  bool all_match = true;
  std::string diff;
  for (const auto* c : selected) {
    rows.push_back(verdict(*c, seed));
    if (c->expected_verdict && rows.back().exists != *c->expected_verdict) {
      all_match = false;
      diff += "  " + c->key + ": computed " + (rows.back().exists ? "yes" : "no") + ", expected " +
              (*c->expected_verdict ? "yes" : "no") + "\n";
    }
  }
  std::string payload;
  if (format == "json")
    payload = table_to_json(rows).dump(2) + "\n";
  else if (format == "csv")
    payload = table_to_csv(rows);
  else
    payload = render_table(rows);
  if (out_path.empty())
    std::cout << payload;
  else
    write_file(out_path, payload);
  if (!all_match) {
    std::cerr << "verdict mismatch against the classification:\n" << diff;
    return kExitVerification;
  }
  return kExitOk;
}

int run_construct(RunConfig cfg, bool force) {
  ConstructionPlan plan = construction_plan(cfg.case_key);
  if (!plan.supported)
    throw ConfigError("construction not supported for case " + cfg.case_key +
                      " (classification only)");
  auto cases = catalog();
  const GeometryCase* gcase = find_case(cases, cfg.case_key);
  VerdictRow row = verdict(*gcase, cfg.rng_seed);
  if (plan.seed_dim > row.rank && !force)
    throw ObstructionError("seed dimension " + std::to_string(plan.seed_dim) +
                           " exceeds the secondary rank " + std::to_string(row.rank) +
                           "; pass --force for diagnostics");

  PairwiseSymmetricAlgebra pair = construction_pair(cfg.case_key);
  CurvedFlatSeed seed = seed_for(cfg, pair);
  if (cfg.grid.r != seed.dim()) {
    cfg.grid.r = seed.dim();  // grid rank follows the seed
    cfg.grid.validate();
  }
  LiftOptions opt;
  opt.window = cfg.window;
  opt.birkhoff.degree = cfg.degree;
  FrameField field = kdpw_lift(seed, pair, cfg.grid, cfg.lambdas, opt);
  field.case_key = cfg.case_key;

  std::filesystem::create_directories(cfg.out_dir);
  std::filesystem::path dir(cfg.out_dir);

  Json report;
  report["config"] = cfg.to_json();
  report["verdict"] = verdict_to_json(row);
  report["masked_fraction"] = field.masked_fraction;

  auto reg = regularity_probe(field, pair);
  std::size_t regular = 0, live = 0;
  for (std::size_t i = 0; i < reg.size(); ++i) {
    if (field.mask[i]) ++live;
    regular += reg[i];
  }
  report["regular_fraction"] = live ? static_cast<double>(regular) / static_cast<double>(live) : 0.0;

  Json per_lambda = Json::array();
  for (double l : cfg.lambdas) {
    Json entry;
    entry["lambda"] = l;
    if (cfg.grid.r == 2) {
      GeometryReport rep = curvature_report(field, pair, plan.kind, l);
      entry["geometry"] = geometry_report_to_json(rep);
    }
    if (std::abs(l - 1.0) > 1e-12) {
      MetricRatio mr = metric_scaling(field, pair, Cplx(l, 0.0), Cplx(1.0, 0.0));
      entry["metric_ratio_vs_1"] = Json{{"expected", mr.expected}, {"spread", mr.spread}};
    }
    if (plan.kind == CaseKind::TotallyReal) {
      auto lag = lagrangian_diagnostics(field, pair, l);
      entry["lagrangian"] = Json{{"totally_real_max", lag.totally_real_max},
                                 {"legendrian_max", lag.legendrian_max},
                                 {"transversality_min", lag.transversality_min}};
    }
    if (plan.kind == CaseKind::G2Frame) {
      G2Report g2 = g2_report(field, pair, l);
      entry["g2"] = Json{{"off_pattern_mass", g2.off_pattern_mass},
                         {"omega1_residual", g2.omega1_residual},
                         {"omega2_residual", g2.omega2_residual},
                         {"omega3_residual", g2.omega3_residual},
                         {"j_invariance", g2.j_invariance},
                         {"complex_curve_sff", g2.complex_curve_sff},
                         {"complex_curve", g2.complex_curve}};
    }
    per_lambda.push_back(std::move(entry));
  }
  report["per_lambda"] = std::move(per_lambda);

  write_file(dir / "report.json", report.dump(2) + "\n");
  write_file(dir / "samples.csv", samples_csv(field, pair, plan.kind));
  write_file(dir / "field.json", frame_dump(field, cfg).dump() + "\n");
  if (cfg.grid.r == 2) {
    double obj_lambda = cfg.lambdas.front();
    for (double l : cfg.lambdas)
      if (std::abs(l - 1.0) < 1e-12) obj_lambda = l;
    auto samples = project(field, pair, plan.kind, ProjectionTarget::UK, Cplx(obj_lambda, 0.0));
    write_file(dir / "surface.obj", samples_obj(samples));
  }
  std::cout << "wrote " << (dir / "report.json").string() << ", samples.csv, field.json"
            << (cfg.grid.r == 2 ? ", surface.obj" : "") << "\n";
  return kExitOk;
}

int run_verify(const std::string& path, const std::string& out_path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot read " + path);
  Json dump;
  try {
    is >> dump;
  } catch (const Json::exception& e) {
    throw ConfigError("dump parse failure: " + std::string(e.what()));
  }
  VerifyOutcome outcome = verify_dump(dump);
  std::string payload = outcome.to_json().dump(2) + "\n";
  if (out_path.empty())
    std::cout << payload;
  else
    write_file(out_path, payload);
  return outcome.pass ? kExitOk : kExitVerification;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"loopflat: loop-group construction of special submanifold families"};
  app.require_subcommand(1);

  std::string case_key, format = "table", out_path, config_path, dump_path;
  std::uint64_t seed = 7;
  bool force = false;
  std::vector<double> lambdas;
  std::string grid_spec;
  int degree = -1;
  double seed_scale = -1.0;

  auto* classify = app.add_subcommand("classify", "recompute the existence verdicts");
  classify->add_option("--case", case_key, "single case key, e.g. sphere:n=4,k=2");
  classify->add_option("--format", format)->check(CLI::IsMember({"json", "csv", "table"}));
  classify->add_option("--out", out_path, "write to a file instead of stdout");
  classify->add_option("--seed", seed, "rng seed for the rank estimates");

  auto* construct = app.add_subcommand("construct", "align, lift and report one case");
  construct->add_option("--case", case_key);
  construct->add_option("--config", config_path, "JSON run configuration");
  construct->add_option("--lambda", lambdas, "evaluation points (repeatable)");
  construct->add_option("--grid", grid_spec, "L,h: extent and spacing");
  construct->add_option("--degree", degree, "factorization truncation degree");
  construct->add_option("--seed", seed, "rng seed");
  construct->add_option("--seed-scale", seed_scale, "generator norm");
  construct->add_option("--out", out_path, "output directory");
  construct->add_flag("--force", force, "construct even when classified non-existent");

  auto* verify = app.add_subcommand("verify", "re-run the residual battery on a frame dump");
  verify->add_option("path", dump_path, "frame dump (JSON)")->required();
  verify->add_option("--out", out_path, "write the outcome JSON to a file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (classify->parsed()) return run_classify(case_key, format, out_path, seed);
    if (verify->parsed()) return run_verify(dump_path, out_path);

    RunConfig cfg;
    if (!config_path.empty()) {
      std::ifstream is(config_path);
      if (!is) throw ConfigError("cannot read config " + config_path);
      Json j;
      try {
        is >> j;
      } catch (const Json::exception& e) {
        throw ConfigError("config parse failure: " + std::string(e.what()));
      }
      cfg = RunConfig::from_json(j);
    }
    if (!case_key.empty()) cfg.case_key = case_key;
    if (!lambdas.empty()) cfg.lambdas = lambdas;
    if (!grid_spec.empty()) {
      double extent = 0.0, h = 0.0;
      if (std::sscanf(grid_spec.c_str(), "%lf,%lf", &extent, &h) != 2 || extent <= 0.0 || h <= 0.0)
        throw ConfigError("bad --grid, expected L,h");
      cfg.grid.extent = extent;
      int pts = static_cast<int>(std::lround(2.0 * extent / h)) + 1;
      if (pts % 2 == 0) ++pts;
      cfg.grid.points = std::max(5, pts);
    }
    if (degree > 0) cfg.degree = degree;
    if (seed_scale > 0.0) cfg.seed_scale = seed_scale;
    if (construct->count("--seed")) cfg.rng_seed = seed;
    if (!out_path.empty()) cfg.out_dir = out_path;
    cfg.grid.r = construction_plan(cfg.case_key).seed_dim;
    return run_construct(cfg, force);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ObstructionError& e) {
    std::cerr << "obstruction: " << e.what() << "\n";
    return kExitConfig;
  } catch (const VerificationError& e) {
    std::cerr << "verification failure: " << e.what() << "\n";
    return kExitVerification;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}
