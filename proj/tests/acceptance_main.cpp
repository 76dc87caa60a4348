// Acceptance suite: every criterion below runs at its stated tolerance and
// prints exactly one PASS/FAIL line. The process exits nonzero if any fails.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "loopflat/errors.hpp"
#include "loopflat/io.hpp"

using namespace loopflat;
using Clock = std::chrono::steady_clock;

namespace {

struct Harness {
  int failures = 0;
  void report(int id, const std::string& name, bool pass, const std::string& detail,
              double seconds) {
    if (!pass) ++failures;
    std::printf("[criterion %2d] %s  %-34s %s (%.1f s)\n", id, pass ? "PASS" : "FAIL",
                name.c_str(), detail.c_str(), seconds);
    std::fflush(stdout);
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Mat block_signs(int plus, int minus) {
  Mat m = Mat::Identity(plus + minus, plus + minus);
  for (int i = plus; i < plus + minus; ++i) m(i, i) = -1.0;
  return m;
}

struct BuiltCase {
  std::string key;
  CaseKind kind;
  PairwiseSymmetricAlgebra pair;
  FrameField field;
  double build_seconds = 0.0;
};

const std::vector<double> kLambdas = {0.5, 0.8, 1.0, 1.25, 2.0};

GridSpec grid33() { return GridSpec{2, 0.8, 33}; }
GridSpec grid17() { return GridSpec{2, 0.8, 17}; }

BuiltCase build_case(const std::string& key, const GridSpec& grid) {
  auto t0 = Clock::now();
  BuiltCase b{key, construction_plan(key).kind, construction_pair(key), FrameField{}, 0.0};
  RunConfig cfg;
  cfg.case_key = key;
  cfg.grid = grid;
  CurvedFlatSeed seed = seed_for(cfg, b.pair);
  LiftOptions opt;
  b.field = kdpw_lift(seed, b.pair, grid, kLambdas, opt);
  b.field.case_key = key;
  b.build_seconds = seconds_since(t0);
  return b;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(3);
  os << x;
  return os.str();
}

}  // namespace

int main() {
  Harness h;

  // ---------------------------------------------------------------- 1
  {
    auto t0 = Clock::now();
    bool pass = true;
    int matched = 0, total = 0;
    std::string diff;
    for (const auto& c : catalog()) {
      VerdictRow row = verdict(c);
      ++total;
      if (c.expected_verdict && row.exists == *c.expected_verdict) {
        ++matched;
      } else {
        pass = false;
        diff += " " + c.key;
      }
    }
    double dt = seconds_since(t0);
    pass = pass && dt < 30.0;
    h.report(1, "classification reproduction", pass,
             std::to_string(matched) + "/" + std::to_string(total) + " verdicts match" + diff, dt);
  }

  // shared constructions (33^2 grid, extent 0.8)
  auto t_builds = Clock::now();
  BuiltCase sphere = build_case("sphere:n=4,k=2", grid33());
  BuiltCase cp2 = build_case("cpn_real:n=2", grid33());
  BuiltCase g2 = build_case("g2", grid33());
  double build_time = seconds_since(t_builds);
  std::printf("constructed sphere/cp2/g2 fields at 33^2 in %.1f s (each < 120 s: %s)\n",
              build_time, (sphere.build_seconds < 120 && cp2.build_seconds < 120 &&
                           g2.build_seconds < 120) ? "yes" : "NO");

  // ---------------------------------------------------------------- 2
  {
    auto t0 = Clock::now();
    bool pass = true;
    std::string detail;
    for (const BuiltCase* b : {&sphere, &cp2}) {
      MetricRatio mr = metric_scaling(b->field, b->pair, Cplx(2.0, 0.0), Cplx(1.0, 0.0));
      bool ok = std::abs(mr.expected - 1.5625) < 1e-12 && mr.spread <= 1e-6 &&
                b->build_seconds < 120.0;
      pass = pass && ok;
      detail += b->key + " spread " + fmt(mr.spread) + "; ";
    }
    h.report(2, "metric scaling 1.5625", pass, detail, seconds_since(t0));
  }

  // ---------------------------------------------------------------- 3
  {
    auto t0 = Clock::now();
    const double hh = cp2.field.grid.spacing();
    GeometryReport r1 = curvature_report(cp2.field, cp2.pair, CaseKind::TotallyReal, 1.0);
    GeometryReport r2 = curvature_report(cp2.field, cp2.pair, CaseKind::TotallyReal, 2.0);
    bool pass = std::abs(r1.curvature_conn_mean - 1.0) <= 1e-3 &&
                std::abs(r1.curvature_ext_mean - 1.0) <= 1e-3 &&
                std::abs(r2.curvature_conn_mean - 0.64) <= 1e-3 &&
                std::abs(r2.curvature_ext_mean - 0.64) <= 1e-3 &&
                r1.estimator_gap <= 10.0 * hh * hh && r2.estimator_gap <= 10.0 * hh * hh;
    h.report(3, "constant curvature c_lambda", pass,
             "K(1) = " + fmt(r1.curvature_conn_mean) + "/" + fmt(r1.curvature_ext_mean) +
                 ", K(2) = " + fmt(r2.curvature_conn_mean) + "/" + fmt(r2.curvature_ext_mean),
             seconds_since(t0));
  }

  // ---------------------------------------------------------------- 4
  {
    auto t0 = Clock::now();
    GeometryReport rs = curvature_report(sphere.field, sphere.pair, CaseKind::Sphere, 1.0);
    GeometryReport rc = curvature_report(cp2.field, cp2.pair, CaseKind::TotallyReal, 1.0);
    G2Report rg = g2_report(g2.field, g2.pair, 1.0);
    auto s1 = project(sphere.field, sphere.pair, CaseKind::Sphere, ProjectionTarget::UK, 1.0);
    double fit = geodesic_sphere_fit(s1, 2);
    bool pass = rs.sff_max <= 1e-6 && rc.sff_max <= 1e-6 && rg.complex_curve_sff <= 1e-6 &&
                fit <= 1e-6;
    h.report(4, "lambda = 1 degeneration", pass,
             "sff " + fmt(rs.sff_max) + "/" + fmt(rc.sff_max) + "/" + fmt(rg.complex_curve_sff) +
                 ", geodesic-sphere fit " + fmt(fit),
             seconds_since(t0));
  }

  // ---------------------------------------------------------------- 5
  {
    auto t0 = Clock::now();
    BuiltCase coarse = build_case("sphere:n=4,k=2", grid17());
    // norms compared over a common physical region three coarse cells inside
    // the faces, so the maximum location cannot drift toward the boundary
    const double margin = 0.25;
    McResiduals rc = mc_residuals(extract_connection(coarse.field, coarse.pair, 1e-5), margin);
    McResiduals rf = mc_residuals(extract_connection(sphere.field, sphere.pair, 1e-6), margin);
    double ratios[3] = {rc.curvature_balance / rf.curvature_balance,
                        rc.pm_parallel / rf.pm_parallel, rc.mm_parallel / rf.mm_parallel};
    bool ratio_ok = true;
    for (double r : ratios) ratio_ok = ratio_ok && r >= 3.5 && r <= 4.5;
    // the derivative-free identities sit at the solver floor at every h
    bool alg_ok = rc.mixed_wedge <= 1e-7 && rc.wedge_balance <= 1e-7 &&
                  rf.mixed_wedge <= 1e-7 && rf.wedge_balance <= 1e-7;
    // injected fault: one frame entry moved by 1e-3 flags the wedge balance
    RunConfig cfg;
    cfg.case_key = sphere.key;
    cfg.grid = sphere.field.grid;
    Json dump = frame_dump(sphere.field, cfg);
    std::size_t target = sphere.field.grid.size() / 2 + 5;
    double v = dump["frames"][2][target]["re"][3].get<double>();
    dump["frames"][2][target]["re"][3] = v + 1e-3;
    VerifyOutcome bad = verify_dump(dump);
    bool detected = !bad.pass && !bad.flagged_points.empty();
    bool pass = ratio_ok && alg_ok && detected;
    h.report(5, "component equations O(h^2)", pass,
             "ratios " + fmt(ratios[0]) + "/" + fmt(ratios[1]) + "/" + fmt(ratios[2]) +
                 ", fault " + (detected ? "detected" : "MISSED"),
             seconds_since(t0));
  }

  // ---------------------------------------------------------------- 6
  {
    auto t0 = Clock::now();
    auto pair = decompose(build_algebra(Family::so, 5), ad_involution(block_signs(4, 1), "tau"),
                          ad_involution(block_signs(2, 3), "sigma"));
    std::mt19937_64 rng(606);
    std::normal_distribution<double> gauss(0.0, 1.0);
    int good = 0, fixed_ok = 0;
    double worst_res = 0.0, worst_fix = 0.0, worst_agree = 0.0;
    const int trials = 200;
    for (int t = 0; t < trials; ++t) {
      // sigma/rho-fixed argument with window [-2, 2]: u_--valued at odd
      // degrees, u_+-valued at even degrees, real coefficients
      LaurentLoop arg = LaurentLoop::monomial(pair.u_plus.random_element(rng), 0);
      for (int d : {-1, 1}) arg = arg + LaurentLoop::monomial(pair.u_minus.random_element(rng), d);
      for (int d : {-2, 2}) arg = arg + LaurentLoop::monomial(pair.u_plus.random_element(rng), d);
      std::uniform_real_distribution<double> uni(0.1, 1.0);
      arg = arg.scaled(0.3 * uni(rng) / arg.coeff_norm());
      LaurentLoop x = loop_exp(arg, 16);
      BirkhoffFactors f = factorize_in_subgroup(x, pair, SubgroupReality::rho);
      worst_res = std::max(worst_res, f.residual);
      if (f.residual <= 1e-10) ++good;
      double fix = 0.0;
      for (const LaurentLoop* part : {&f.plus, &f.minus}) {
        fix = std::max(fix, (apply_involution(*part, LoopInvolution::sigma, pair) - *part).coeff_norm() /
                                std::max(1.0, part->coeff_norm()));
        fix = std::max(fix, (apply_involution(*part, LoopInvolution::rho, pair) - *part).coeff_norm() /
                                std::max(1.0, part->coeff_norm()));
      }
      worst_fix = std::max(worst_fix, fix);
      if (fix <= 1e-8) ++fixed_ok;
      if (t < 20) {
        BirkhoffOptions o2;
        o2.degree = f.degree_used + 8;
        o2.max_degree = o2.degree;
        BirkhoffFactors f2 = factorize(x, o2);
        worst_agree = std::max(worst_agree, (f.plus - f2.plus).coeff_norm());
      }
    }
    bool pass = good == trials && fixed_ok == trials && worst_agree <= 1e-8;
    h.report(6, "birkhoff round-trip x200", pass,
             "max residual " + fmt(worst_res) + ", max fixedness " + fmt(worst_fix) +
                 ", degree agreement " + fmt(worst_agree),
             seconds_since(t0));
  }

  // ---------------------------------------------------------------- 7
  {
    auto t0 = Clock::now();
    bool pass = true;
    std::string detail;
    for (const BuiltCase* b : {&sphere, &cp2, &g2}) {
      double hh = b->field.grid.spacing();
      // (a) lifted field: the component equations make the secondary wedge
      // lambda-independent and equal to 4 C^C (see the ledger note on the
      // curved-flat claim); verified here as the structural identity
      SecondaryFlatness lifted = secondary_projection_flatness(b->field, b->pair, 1.25);
      SecondaryFlatness lifted2 = secondary_projection_flatness(b->field, b->pair, 2.0);
      bool identity_ok = lifted.wedge_identity_residual <= 1e-7 &&
                         std::abs(lifted.wedge_residual - lifted2.wedge_residual) <= 1e-7;
      // (b) the generating curved flat: wedge at the floor, intrinsically flat
      RunConfig cfg;
      cfg.case_key = b->key;
      cfg.grid = b->field.grid;
      CurvedFlatSeed seed = seed_for(cfg, b->pair);
      FrameField flat = curved_flat_field(seed, b->field.grid, kLambdas);
      SecondaryFlatness cf = secondary_projection_flatness(flat, b->pair, 1.25);
      bool flat_ok = cf.wedge_residual <= 1e-7 && cf.intrinsic_curvature <= 10.0 * hh * hh;
      pass = pass && identity_ok && flat_ok;
      detail += b->key + " id " + fmt(lifted.wedge_identity_residual) + " raw " +
                fmt(lifted.wedge_residual) + " flatK " + fmt(cf.intrinsic_curvature) + "; ";
    }
    h.report(7, "secondary projection structure", pass, detail, seconds_since(t0));
  }

  // ---------------------------------------------------------------- 8
  {
    auto t0 = Clock::now();
    std::vector<PairwiseSymmetricAlgebra> pairs;
    pairs.push_back(sphere.pair);                       // so(5), rank 2
    pairs.push_back(cp2.pair);                          // su(3) real form, rank 2
    pairs.push_back(construction_pair("cpn_real:n=3"));  // su(4) real form, rank 3
    std::mt19937_64 rng(808);
    int constructive = 0, total_success = 0;
    const int trials = 100;
    for (int t = 0; t < trials; ++t) {
      const auto& pair = pairs[static_cast<std::size_t>(t) % pairs.size()];
      int rank = rank_of_subspace(pair.u_minus);
      std::uniform_int_distribution<int> dims(1, rank);
      int dim = dims(rng);
      std::vector<Mat> gens;
      for (int i = 0; i < dim; ++i) gens.push_back(pair.u_minus.random_element(rng));
      auto v = SubspaceBasis::from_matrices(gens);
      if (v.dim() != dim) continue;
      bool ok = false;
      try {
        auto res = align_cartan(pair, v, AlignMode::constructive, 4242 + static_cast<std::uint64_t>(t));
        ok = res.projection_rank == dim && res.smallest_singular >= 1e-6;
        if (ok) ++constructive;
      } catch (const NumericalError&) {
      }
      if (!ok) {
        try {
          auto res = align_cartan(pair, v, AlignMode::randomized, 999 + static_cast<std::uint64_t>(t));
          ok = res.projection_rank == dim && res.smallest_singular >= 1e-6;
        } catch (const NumericalError&) {
        }
      }
      if (ok) ++total_success;
    }
    double dt = seconds_since(t0);
    bool pass = constructive >= 99 && total_success == trials && dt < 60.0;
    h.report(8, "alignment algorithm x100", pass,
             std::to_string(constructive) + "/100 constructive, " +
                 std::to_string(total_success) + "/100 with fallback",
             dt);
  }

  // ---------------------------------------------------------------- 9
  {
    auto t0 = Clock::now();
    double hh = g2.field.grid.spacing();
    bool dim_ok = build_algebra(Family::g2, 0).dim() == 14;
    G2Report r1 = g2_report(g2.field, g2.pair, 1.0);
    G2Report r2 = g2_report(g2.field, g2.pair, 2.0);
    bool pass = dim_ok && r2.off_pattern_mass <= 1e-7 && r1.off_pattern_mass <= 1e-7 &&
                r2.omega1_residual <= 10.0 * hh * hh && r2.omega2_residual <= 10.0 * hh * hh &&
                r2.omega3_residual <= 10.0 * hh * hh && r2.j_invariance <= 1e-7 &&
                r1.j_invariance <= 1e-7 && r1.complex_curve;
    h.report(9, "g2 structure", pass,
             "off-pattern " + fmt(r2.off_pattern_mass) + ", identities " +
                 fmt(r2.omega1_residual) + "/" + fmt(r2.omega2_residual) + "/" +
                 fmt(r2.omega3_residual) + ", complex curve " + (r1.complex_curve ? "yes" : "NO"),
             seconds_since(t0));
  }

  // ---------------------------------------------------------------- 10
  {
    auto t0 = Clock::now();
    // documentation-only items: the excluded classification row is present and
    // not computed, and the README declares the global statements out of scope
    auto cases = catalog();
    const GeometryCase* excluded = find_case(cases, "symmetric_r_space");
    bool row_ok = excluded && excluded->excluded_by_citation && !verdict(*excluded).computed;
#ifdef LOOPFLAT_SOURCE_DIR
    std::ifstream readme(std::string(LOOPFLAT_SOURCE_DIR) + "/README.md");
#else
    std::ifstream readme("README.md");
#endif
    std::string text((std::istreambuf_iterator<char>(readme)), std::istreambuf_iterator<char>());
    bool doc_ok = text.find("not decided numerically") != std::string::npos;
    h.report(10, "documentation-only items", row_ok && doc_ok,
             std::string("excluded row ") + (row_ok ? "ok" : "MISSING") + ", README " +
                 (doc_ok ? "declares scope" : "MISSING"),
             seconds_since(t0));
  }

  std::printf("acceptance: %s (%d failing)\n", h.failures == 0 ? "ALL PASS" : "FAILURES",
              h.failures);
  return h.failures == 0 ? 0 : 1;
}
