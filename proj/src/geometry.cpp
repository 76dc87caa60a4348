#include "loopflat/geometry.hpp"

#include <cmath>

#include "loopflat/errors.hpp"
#include "loopflat/octonion.hpp"
#include "loopflat/parallel.hpp"

namespace loopflat {

namespace {

// ---------------------------------------------------------------------------
// frame and Maurer-Cartan access at arbitrary lambda

Mat frame_lookup(const FrameField& field, std::size_t idx, Cplx lambda) {
  if (field.has_loops()) return field.loops[idx].eval(lambda);
  if (std::abs(lambda.imag()) > 1e-14) throw ConfigError("complex lambda needs the stored loops");
  int li = field.lambda_index(lambda.real());
  if (li < 0) throw ConfigError("lambda not in the sampled set");
  return field.frames[static_cast<std::size_t>(li)][idx];
}

struct AlphaField {
  std::vector<std::vector<Mat>> dirs;  // [point][direction], alpha^lambda(e_i)
  std::vector<std::uint8_t> ok;
};

AlphaField alpha_at(const FrameField& field, const PairwiseSymmetricAlgebra& pair, Cplx lambda) {
  const std::size_t npts = field.grid.size();
  AlphaField a;
  a.dirs.assign(npts, {});
  a.ok.assign(npts, 0);
  if (field.has_exact_mc()) {
    for (std::size_t i = 0; i < npts; ++i) {
      if (!field.mask[i]) continue;
      a.dirs[i].resize(static_cast<std::size_t>(field.grid.r));
      for (int d = 0; d < field.grid.r; ++d) {
        const Mat& c1 = field.mc_c1[i][static_cast<std::size_t>(d)];
        a.dirs[i][static_cast<std::size_t>(d)] =
            field.mc_c0[i][static_cast<std::size_t>(d)] + lambda * c1 - (1.0 / lambda) * pair.tau(c1);
      }
      a.ok[i] = 1;
    }
    return a;
  }
  // sample-only fields: fit the three-function basis first
  ConnectionData11 conn = extract_connection(field, pair, 1e-5);
  double lm = (lambda - 1.0 / lambda).real();
  double lp = (lambda + 1.0 / lambda).real();
  for (std::size_t i = 0; i < npts; ++i) {
    if (conn.a0[i].empty()) continue;
    a.dirs[i].resize(static_cast<std::size_t>(field.grid.r));
    for (int d = 0; d < field.grid.r; ++d)
      a.dirs[i][static_cast<std::size_t>(d)] = conn.a0[i][static_cast<std::size_t>(d)] +
                                               lm * conn.a1pm[i][static_cast<std::size_t>(d)] +
                                               lp * conn.a1mm[i][static_cast<std::size_t>(d)];
    a.ok[i] = conn.valid[i];
  }
  return a;
}

// ---------------------------------------------------------------------------
// scalar fields over the grid with 4th-order differences

struct ScalarField {
  const GridSpec* grid = nullptr;
  std::vector<double> v;
  std::vector<std::uint8_t> ok;

  double at(const int* c) const { return v[grid->index_of(c)]; }
  bool ok_at(const int* c) const { return ok[grid->index_of(c)] != 0; }

  bool stencil_ok(std::size_t idx, int axis) const {
    std::vector<int> c(static_cast<std::size_t>(grid->r));
    grid->coords_of(idx, c.data());
    for (int off = -2; off <= 2; ++off) {
      std::vector<int> cc = c;
      cc[static_cast<std::size_t>(axis)] += off;
      if (cc[static_cast<std::size_t>(axis)] < 0 || cc[static_cast<std::size_t>(axis)] >= grid->points) return false;
      if (!ok_at(cc.data())) return false;
    }
    return true;
  }

  double d1(std::size_t idx, int axis) const {
    std::vector<int> c(static_cast<std::size_t>(grid->r));
    grid->coords_of(idx, c.data());
    auto s = [&](int off) {
      std::vector<int> cc = c;
      cc[static_cast<std::size_t>(axis)] += off;
      return at(cc.data());
    };
    return (s(-2) - 8.0 * s(-1) + 8.0 * s(1) - s(2)) / (12.0 * grid->spacing());
  }

  double d2(std::size_t idx, int axis) const {
    std::vector<int> c(static_cast<std::size_t>(grid->r));
    grid->coords_of(idx, c.data());
    auto s = [&](int off) {
      std::vector<int> cc = c;
      cc[static_cast<std::size_t>(axis)] += off;
      return at(cc.data());
    };
    double h = grid->spacing();
    return (-s(-2) + 16.0 * s(-1) - 30.0 * s(0) + 16.0 * s(1) - s(2)) / (12.0 * h * h);
  }
};

// Gauss curvature of a 2D metric field (E, F, G) by the Brioschi formula.
// Cross derivative F_uv from the d1 fields. Valid where all stencils exist.
struct BrioschiResult {
  std::vector<double> k;
  std::vector<std::uint8_t> ok;
};

BrioschiResult brioschi(const GridSpec& grid, const ScalarField& e, const ScalarField& f,
                        const ScalarField& g) {
  const std::size_t npts = grid.size();
  // first derivatives as fields so the cross term can be differenced again
  ScalarField fu{&grid, std::vector<double>(npts, 0.0), std::vector<std::uint8_t>(npts, 0)};
  for (std::size_t i = 0; i < npts; ++i) {
    if (!f.ok[i] || !f.stencil_ok(i, 0)) continue;
    fu.v[i] = f.d1(i, 0);
    fu.ok[i] = 1;
  }
  BrioschiResult out;
  out.k.assign(npts, 0.0);
  out.ok.assign(npts, 0);
  for (std::size_t i = 0; i < npts; ++i) {
    bool usable = e.ok[i] && f.ok[i] && g.ok[i];
    for (int ax = 0; ax < 2 && usable; ++ax)
      usable = e.stencil_ok(i, ax) && f.stencil_ok(i, ax) && g.stencil_ok(i, ax);
    if (!usable || !fu.stencil_ok(i, 1)) continue;
    double E = e.v[i], F = f.v[i], G = g.v[i];
    double Eu = e.d1(i, 0), Ev = e.d1(i, 1);
    double Gu = g.d1(i, 0), Gv = g.d1(i, 1);
    double Fv = f.d1(i, 1);
    double Fu = f.d1(i, 0);
    double Evv = e.d2(i, 1), Guu = g.d2(i, 0);
    double Fuv = fu.d1(i, 1);
    double det = E * G - F * F;
    if (det < 1e-14) continue;
    Eigen::Matrix3d m1, m2;
    m1 << -0.5 * Evv + Fuv - 0.5 * Guu, 0.5 * Eu, Fu - 0.5 * Ev,
          Fv - 0.5 * Gu, E, F,
          0.5 * Gv, F, G;
    m2 << 0.0, 0.5 * Ev, 0.5 * Gu,
          0.5 * Ev, E, F,
          0.5 * Gu, F, G;
    out.k[i] = (m1.determinant() - m2.determinant()) / (det * det);
    out.ok[i] = 1;
  }
  return out;
}

// matrix-entry fields with 4th-order d1 along an axis, for the connection blocks
struct MatrixField {
  const GridSpec* grid = nullptr;
  std::vector<Mat> v;  // empty when missing
  bool stencil_ok(std::size_t idx, int axis) const {
    std::vector<int> c(static_cast<std::size_t>(grid->r));
    grid->coords_of(idx, c.data());
    for (int off = -2; off <= 2; ++off) {
      std::vector<int> cc = c;
      cc[static_cast<std::size_t>(axis)] += off;
      if (cc[static_cast<std::size_t>(axis)] < 0 || cc[static_cast<std::size_t>(axis)] >= grid->points) return false;
      if (v[grid->index_of(cc.data())].size() == 0) return false;
    }
    return true;
  }
  Mat d1(std::size_t idx, int axis) const {
    std::vector<int> c(static_cast<std::size_t>(grid->r));
    grid->coords_of(idx, c.data());
    auto s = [&](int off) {
      std::vector<int> cc = c;
      cc[static_cast<std::size_t>(axis)] += off;
      return v[grid->index_of(cc.data())];
    };
    return (s(-2) - 8.0 * s(-1) + 8.0 * s(1) - s(2)) / (12.0 * grid->spacing());
  }
  bool stencil_ok_2(std::size_t idx, int axis) const {
    std::vector<int> c(static_cast<std::size_t>(grid->r));
    grid->coords_of(idx, c.data());
    for (int off = -1; off <= 1; ++off) {
      std::vector<int> cc = c;
      cc[static_cast<std::size_t>(axis)] += off;
      if (cc[static_cast<std::size_t>(axis)] < 0 || cc[static_cast<std::size_t>(axis)] >= grid->points) return false;
      if (v[grid->index_of(cc.data())].size() == 0) return false;
    }
    return true;
  }
  Mat d1_2(std::size_t idx, int axis) const {
    std::vector<int> c(static_cast<std::size_t>(grid->r));
    grid->coords_of(idx, c.data());
    auto s = [&](int off) {
      std::vector<int> cc = c;
      cc[static_cast<std::size_t>(axis)] += off;
      return v[grid->index_of(cc.data())];
    };
    return (s(1) - s(-1)) / (2.0 * grid->spacing());
  }
};

struct CaseLayout {
  int n = 0;            // case size parameter
  int point_column = 0; // column carrying the immersion point
};

CaseLayout layout_of(CaseKind kind, int ambient) {
  CaseLayout l;
  switch (kind) {
    case CaseKind::Sphere:
      l.n = ambient - 1;
      l.point_column = ambient - 1;
      break;
    case CaseKind::TotallyReal:
      l.n = ambient / 2 - 1;
      l.point_column = ambient / 2 - 1;
      break;
    case CaseKind::G2Frame:
      if (ambient != 7) throw ConfigError("G2 case needs 7x7 frames");
      l.n = 7;
      l.point_column = 0;
      break;
  }
  return l;
}

SubspaceBasis u_prime_span(const PairwiseSymmetricAlgebra& pair) {
  std::vector<Mat> mats = pair.k_prime().matrices();
  for (const auto& m : pair.p_prime().matrices()) mats.push_back(m);
  return SubspaceBasis::from_matrices(mats);
}

}  // namespace

ImmersionSamples project(const FrameField& field, const PairwiseSymmetricAlgebra& pair,
                         CaseKind kind, ProjectionTarget target, Cplx lambda) {
  const std::size_t npts = field.grid.size();
  ImmersionSamples s;
  s.case_key = field.case_key;
  s.kind = kind;
  s.lambda = lambda;
  s.grid = field.grid;
  s.points.assign(npts, RVec());
  s.mask.assign(npts, 0);
  const int ambient = field.ambient();
  CaseLayout layout = layout_of(kind, ambient);
  for (std::size_t i = 0; i < npts; ++i) {
    if (!field.mask[i]) continue;
    Mat f = frame_lookup(field, i, lambda);
    switch (target) {
      case ProjectionTarget::UK: {
        Eigen::VectorXcd col = f.col(layout.point_column);
        if (std::abs(lambda.imag()) < 1e-14) {
          s.points[i] = col.real();
        } else {
          RVec both(2 * col.size());
          both.head(col.size()) = col.real();
          both.tail(col.size()) = col.imag();
          s.points[i] = both;
        }
        break;
      }
      case ProjectionTarget::UUplus: {
        Mat phi = f * pair.sigma(f.inverse());
        s.points[i] = vec_real(phi);
        break;
      }
      case ProjectionTarget::UKcapUplus:
        s.points[i] = vec_real(f);
        break;
    }
    s.mask[i] = 1;
  }
  return s;
}

MetricRatio metric_scaling(const FrameField& field, const PairwiseSymmetricAlgebra& pair,
                           Cplx lambda_a, Cplx lambda_b) {
  const GridSpec& g = field.grid;
  const std::size_t npts = g.size();
  const double h = g.spacing();
  MetricRatio out;
  out.ratio.assign(npts, 0.0);
  out.valid.assign(npts, 0);
  auto rfac = [](Cplx l) { return std::abs((l + 1.0 / l) * (l + 1.0 / l)) / 4.0; };
  out.expected = rfac(lambda_a) / rfac(lambda_b);

  auto gram = [&](std::size_t idx, Cplx l, RMat* gmat) -> bool {
    std::vector<int> c(static_cast<std::size_t>(g.r));
    g.coords_of(idx, c.data());
    std::vector<Eigen::VectorXcd> theta;
    for (int axis = 0; axis < g.r; ++axis) {
      for (int off = -2; off <= 2; ++off) {
        std::vector<int> cc = c;
        cc[static_cast<std::size_t>(axis)] += off;
        if (cc[static_cast<std::size_t>(axis)] < 0 || cc[static_cast<std::size_t>(axis)] >= g.points) return false;
        if (!field.mask[g.index_of(cc.data())]) return false;
      }
      auto fr = [&](int off) {
        std::vector<int> cc = c;
        cc[static_cast<std::size_t>(axis)] += off;
        return frame_lookup(field, g.index_of(cc.data()), l);
      };
      Mat df = (fr(-2) - 8.0 * fr(-1) + 8.0 * fr(1) - fr(2)) / (12.0 * h);
      Mat d = frame_lookup(field, idx, l).partialPivLu().solve(df);
      // bilinear p-coordinates: the k-components drop out exactly
      RVec cre = pair.p_space.coords(Mat(d.real()));
      RVec cim = pair.p_space.coords(Mat(d.imag()));
      Eigen::VectorXcd th = cre.cast<Cplx>() + Cplx(0, 1) * cim.cast<Cplx>();
      theta.push_back(th);
    }
    gmat->resize(g.r, g.r);
    for (int i = 0; i < g.r; ++i)
      for (int j = 0; j < g.r; ++j) (*gmat)(i, j) = (theta[static_cast<std::size_t>(i)].transpose() * theta[static_cast<std::size_t>(j)])(0, 0).real();
    return true;
  };

  parallel_for(npts, [&](std::size_t idx) {
    if (!field.mask[idx]) return;
    RMat ga, gb;
    if (!gram(idx, lambda_a, &ga) || !gram(idx, lambda_b, &gb)) return;
    double nb = gb.norm();
    if (nb < 1e-12) return;  // degenerate metric: masked
    out.ratio[idx] = ga.norm() / nb;
    out.valid[idx] = 1;
  });

  out.spread = 0.0;
  for (std::size_t i = 0; i < npts; ++i)
    if (out.valid[i]) out.spread = std::max(out.spread, std::abs(out.ratio[i] / out.expected - 1.0));
  return out;
}

GeometryReport curvature_report(const FrameField& field, const PairwiseSymmetricAlgebra& pair,
                                CaseKind kind, double lambda) {
  const GridSpec& g = field.grid;
  if (g.r != 2) throw ConfigError("curvature report needs a 2-dimensional domain");
  const std::size_t npts = g.size();
  const int ambient = field.ambient();
  CaseLayout layout = layout_of(kind, ambient);
  const Cplx l(lambda, 0.0);

  GeometryReport rep;
  rep.case_key = field.case_key;
  rep.lambda = l;
  rep.curvature_conn.assign(npts, 0.0);
  rep.curvature_ext.assign(npts, 0.0);
  rep.sff_norm.assign(npts, 0.0);
  rep.normal_curvature_norm.assign(npts, 0.0);
  rep.lagrangian_residual.assign(npts, 0.0);
  rep.legendrian_residual.assign(npts, 0.0);
  rep.valid.assign(npts, 0);

  AlphaField al = alpha_at(field, pair, l);
  SubspaceBasis u_prime = u_prime_span(pair);

  // --- off-(k'+p') mass: the second fundamental form in the frame picture
  for (std::size_t i = 0; i < npts; ++i) {
    if (!al.ok[i]) continue;
    double worst = 0.0;
    for (int d = 0; d < g.r; ++d) {
      const Mat& a = al.dirs[i][static_cast<std::size_t>(d)];
      worst = std::max(worst, (a - u_prime.project(a)).norm());
    }
    rep.sff_norm[i] = worst;
  }

  // --- route (a): connection-form curvature
  // shared machinery: per-point scalar or block fields differentiated on the grid
  auto entry_field = [&](int row, int col) {
    std::array<ScalarField, 2> f;
    for (int d = 0; d < 2; ++d) {
      f[static_cast<std::size_t>(d)].grid = &g;
      f[static_cast<std::size_t>(d)].v.assign(npts, 0.0);
      f[static_cast<std::size_t>(d)].ok.assign(npts, 0);
      for (std::size_t i = 0; i < npts; ++i) {
        if (!al.ok[i]) continue;
        f[static_cast<std::size_t>(d)].v[i] = al.dirs[i][static_cast<std::size_t>(d)](row, col).real();
        f[static_cast<std::size_t>(d)].ok[i] = 1;
      }
    }
    return f;
  };

  if (kind == CaseKind::Sphere) {
    const int k = pair.p_prime().dim();
    if (k != 2) throw ConfigError("sphere curvature route implemented for k = 2");
    auto w = entry_field(0, 1);  // tangential so(2) connection
    for (std::size_t i = 0; i < npts; ++i) {
      if (!al.ok[i] || !w[0].stencil_ok(i, 1) || !w[1].stencil_ok(i, 0)) continue;
      double dw = w[1].d1(i, 0) - w[0].d1(i, 1);
      double t0_1 = al.dirs[i][0](0, layout.point_column).real();
      double t1_1 = al.dirs[i][0](1, layout.point_column).real();
      double t0_2 = al.dirs[i][1](0, layout.point_column).real();
      double t1_2 = al.dirs[i][1](1, layout.point_column).real();
      double area = t0_1 * t1_2 - t0_2 * t1_1;
      if (std::abs(area) < 1e-12) continue;
      rep.curvature_conn[i] = dw / area;
      rep.valid[i] = 1;
    }
    // normal bundle curvature: so(n-k) block (rows/cols k..n-1)
    const int n = layout.n;
    for (int a = k; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        auto wn = entry_field(a, b);
        for (std::size_t i = 0; i < npts; ++i) {
          if (!rep.valid[i] || !wn[0].stencil_ok(i, 1) || !wn[1].stencil_ok(i, 0)) continue;
          double dwn = wn[1].d1(i, 0) - wn[0].d1(i, 1);
          // so(2+) normal blocks: add the wedge term
          double wedge = 0.0;
          for (int m = k; m < n; ++m) {
            double am1 = al.dirs[i][0](a, m).real(), am2 = al.dirs[i][1](a, m).real();
            double mb1 = al.dirs[i][0](m, b).real(), mb2 = al.dirs[i][1](m, b).real();
            wedge += am1 * mb2 - am2 * mb1;
          }
          rep.normal_curvature_norm[i] = std::max(rep.normal_curvature_norm[i], std::abs(dwn + wedge));
        }
      }
    }
  } else if (kind == CaseKind::TotallyReal) {
    const int n = layout.n;
    // w = (JX)^t d(JX): rows/cols n+1 .. 2n; coframe theta_l = alpha(JX rows, f col)
    MatrixField wf{&g, std::vector<Mat>(npts)};
    for (std::size_t i = 0; i < npts; ++i) {
      if (!al.ok[i]) continue;
      Mat wd(n, 2 * n);  // both directions stacked side by side
      for (int d = 0; d < 2; ++d) wd.middleCols(d * n, n) = al.dirs[i][static_cast<std::size_t>(d)].block(n + 1, n + 1, n, n);
      wf.v[i] = wd;
    }
    for (std::size_t i = 0; i < npts; ++i) {
      if (!al.ok[i] || !wf.stencil_ok(i, 0) || !wf.stencil_ok(i, 1)) continue;
      Mat dall_u = wf.d1(i, 0);  // d/du of both direction blocks
      Mat dall_v = wf.d1(i, 1);
      Mat w1 = wf.v[i].leftCols(n), w2 = wf.v[i].rightCols(n);
      Mat dw = dall_u.rightCols(n) - dall_v.leftCols(n);  // (dw)(e1, e2)
      Mat ww = w1 * w2 - w2 * w1;
      Mat lhs = dw + ww;
      Eigen::VectorXcd th1 = al.dirs[i][0].block(n + 1, layout.point_column, n, 1);
      Eigen::VectorXcd th2 = al.dirs[i][1].block(n + 1, layout.point_column, n, 1);
      Mat t = th1 * th2.transpose() - th2 * th1.transpose();
      double denom = t.squaredNorm();
      if (denom < 1e-16) continue;
      double c = (lhs.array() * t.conjugate().array()).sum().real() / denom;
      rep.curvature_conn[i] = c;
      rep.valid[i] = 1;
      // Lagrangian diagnostics from the same blocks
      double tr = al.dirs[i][0].block(0, layout.point_column, n, 1).norm() +
                  al.dirs[i][1].block(0, layout.point_column, n, 1).norm();
      double leg = std::abs(al.dirs[i][0](2 * n + 1, layout.point_column)) +
                   std::abs(al.dirs[i][1](2 * n + 1, layout.point_column));
      rep.lagrangian_residual[i] = tr;
      rep.legendrian_residual[i] = leg;
    }
  } else {  // G2Frame
    // route (a) is the Y-bundle identity fit; meaningful at lambda = 1 where
    // the tangent plane is carried by the Y columns
    MatrixField wf{&g, std::vector<Mat>(npts)};
    for (std::size_t i = 0; i < npts; ++i) {
      if (!al.ok[i]) continue;
      Mat wd(2, 4);
      for (int d = 0; d < 2; ++d) wd.middleCols(d * 2, 2) = al.dirs[i][static_cast<std::size_t>(d)].block(5, 5, 2, 2);
      wf.v[i] = wd;
    }
    for (std::size_t i = 0; i < npts; ++i) {
      if (!al.ok[i] || !wf.stencil_ok(i, 0) || !wf.stencil_ok(i, 1)) continue;
      Mat dall_u = wf.d1(i, 0);
      Mat dall_v = wf.d1(i, 1);
      Mat w1 = wf.v[i].leftCols(2), w2 = wf.v[i].rightCols(2);
      Mat lhs = (dall_u.rightCols(2) - dall_v.leftCols(2)) + (w1 * w2 - w2 * w1);
      Eigen::VectorXcd th1 = al.dirs[i][0].block(5, 0, 2, 1);
      Eigen::VectorXcd th2 = al.dirs[i][1].block(5, 0, 2, 1);
      Mat t = th1 * th2.transpose() - th2 * th1.transpose();
      double denom = t.squaredNorm();
      if (denom < 1e-16) continue;
      rep.curvature_conn[i] = (lhs.array() * t.conjugate().array()).sum().real() / denom;
      rep.valid[i] = 1;
    }
  }

  // --- route (b): induced metric of the projected samples + Brioschi
  {
    ImmersionSamples samples = project(field, pair, kind, ProjectionTarget::UK, l);
    ScalarField e{&g, std::vector<double>(npts, 0.0), std::vector<std::uint8_t>(npts, 0)};
    ScalarField f = e, gm = e;
    const int dim = ambient;
    MatrixField pf{&g, std::vector<Mat>(npts)};
    for (std::size_t i = 0; i < npts; ++i)
      if (samples.mask[i]) pf.v[i] = samples.points[i].cast<Cplx>();
    Mat jmat;
    if (kind == CaseKind::TotallyReal) {
      jmat = Mat::Zero(dim, dim);
      jmat.topRightCorner(dim / 2, dim / 2) = -Mat::Identity(dim / 2, dim / 2);
      jmat.bottomLeftCorner(dim / 2, dim / 2) = Mat::Identity(dim / 2, dim / 2);
    }
    for (std::size_t i = 0; i < npts; ++i) {
      if (!samples.mask[i] || !pf.stencil_ok(i, 0) || !pf.stencil_ok(i, 1)) continue;
      Mat du = pf.d1(i, 0), dv = pf.d1(i, 1);
      double E = du.squaredNorm(), F = (du.adjoint() * dv)(0, 0).real(), G = dv.squaredNorm();
      if (kind == CaseKind::TotallyReal) {
        // remove the vertical component along Jf
        Mat jf = jmat * pf.v[i];
        double au = (du.adjoint() * jf)(0, 0).real();
        double av = (dv.adjoint() * jf)(0, 0).real();
        E -= au * au;
        F -= au * av;
        G -= av * av;
      }
      e.v[i] = E;
      f.v[i] = F;
      gm.v[i] = G;
      e.ok[i] = f.ok[i] = gm.ok[i] = 1;
    }
    BrioschiResult br = brioschi(g, e, f, gm);
    for (std::size_t i = 0; i < npts; ++i) {
      if (!br.ok[i]) {
        rep.valid[i] = 0;
        continue;
      }
      rep.curvature_ext[i] = br.k[i];
    }
  }

  // --- summary
  double sum_conn = 0.0, sum_ext = 0.0;
  std::size_t nvalid = 0;
  bool finite = true;
  for (std::size_t i = 0; i < npts; ++i) {
    if (!rep.valid[i]) continue;
    ++nvalid;
    sum_conn += rep.curvature_conn[i];
    sum_ext += rep.curvature_ext[i];
    rep.estimator_gap = std::max(rep.estimator_gap, std::abs(rep.curvature_conn[i] - rep.curvature_ext[i]));
    rep.sff_max = std::max(rep.sff_max, rep.sff_norm[i]);
    rep.normal_curvature_max = std::max(rep.normal_curvature_max, rep.normal_curvature_norm[i]);
    rep.lagrangian_max = std::max(rep.lagrangian_max, rep.lagrangian_residual[i]);
    rep.legendrian_max = std::max(rep.legendrian_max, rep.legendrian_residual[i]);
    for (double x : {rep.curvature_conn[i], rep.curvature_ext[i], rep.sff_norm[i]})
      finite = finite && std::isfinite(x);
  }
  if (nvalid > 0) {
    rep.curvature_conn_mean = sum_conn / static_cast<double>(nvalid);
    rep.curvature_ext_mean = sum_ext / static_cast<double>(nvalid);
  }
  const double h = g.spacing();
  rep.flags.all_finite = finite && nvalid > 0;
  rep.flags.estimators_agree = rep.estimator_gap <= 10.0 * h * h;
  rep.flags.totally_geodesic = rep.sff_max <= 1e-6;
  rep.flags.flat_normal_bundle = kind == CaseKind::Sphere && rep.normal_curvature_max <= 10.0 * h * h;
  rep.flags.totally_real = kind == CaseKind::TotallyReal && rep.lagrangian_max <= 1e-7;
  rep.flags.legendrian = kind == CaseKind::TotallyReal && rep.legendrian_max <= 1e-7;
  rep.flags.transversal = true;  // refined by lagrangian_diagnostics
  return rep;
}

LagrangianDiagnostics lagrangian_diagnostics(const FrameField& field,
                                             const PairwiseSymmetricAlgebra& pair, double lambda) {
  const GridSpec& g = field.grid;
  const std::size_t npts = g.size();
  const int ambient = field.ambient();
  CaseLayout layout = layout_of(CaseKind::TotallyReal, ambient);
  const int n = layout.n;
  AlphaField al = alpha_at(field, pair, Cplx(lambda, 0.0));

  LagrangianDiagnostics out;
  out.totally_real.assign(npts, 0.0);
  out.legendrian.assign(npts, 0.0);
  out.transversality.assign(npts, 0.0);
  out.valid.assign(npts, 0);
  out.transversality_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < npts; ++i) {
    if (!al.ok[i]) continue;
    double tr = 0.0, leg = 0.0;
    Mat coframe(n, g.r);
    for (int d = 0; d < g.r; ++d) {
      const Mat& a = al.dirs[i][static_cast<std::size_t>(d)];
      tr = std::max(tr, a.block(0, layout.point_column, n, 1).norm());
      leg = std::max(leg, std::abs(a(2 * n + 1, layout.point_column)));
      coframe.col(d) = a.block(n + 1, layout.point_column, n, 1);
    }
    Eigen::JacobiSVD<Mat> svd(coframe);
    double smin = svd.singularValues().tail(1)(0);
    out.totally_real[i] = tr;
    out.legendrian[i] = leg;
    out.transversality[i] = smin;
    out.valid[i] = 1;
    out.totally_real_max = std::max(out.totally_real_max, tr);
    out.legendrian_max = std::max(out.legendrian_max, leg);
    out.transversality_min = std::min(out.transversality_min, smin);
  }
  if (!std::isfinite(out.transversality_min)) out.transversality_min = 0.0;
  return out;
}

G2Report g2_report(const FrameField& field, const PairwiseSymmetricAlgebra& pair, double lambda) {
  const GridSpec& g = field.grid;
  const std::size_t npts = g.size();
  if (field.ambient() != 7) throw ConfigError("g2 report needs 7x7 frames");
  const Cplx l(lambda, 0.0);
  AlphaField al = alpha_at(field, pair, l);

  G2Report rep;
  rep.valid.assign(npts, 0);

  const double cp = lambda + 1.0 / lambda;  // theta2, beta1 coefficient

  // block fields for the three bundle identities (unscaled beta1, theta2)
  MatrixField w1f{&g, std::vector<Mat>(npts)}, w2f = w1f, w3f = w1f;
  for (std::size_t i = 0; i < npts; ++i) {
    if (!al.ok[i]) continue;
    Mat w1(2, 4), w2(2, 4), w3(2, 4);
    for (int d = 0; d < 2; ++d) {
      w1.middleCols(d * 2, 2) = al.dirs[i][static_cast<std::size_t>(d)].block(1, 1, 2, 2);
      w2.middleCols(d * 2, 2) = al.dirs[i][static_cast<std::size_t>(d)].block(3, 3, 2, 2);
      w3.middleCols(d * 2, 2) = al.dirs[i][static_cast<std::size_t>(d)].block(5, 5, 2, 2);
    }
    w1f.v[i] = w1;
    w2f.v[i] = w2;
    w3f.v[i] = w3;

    // off-pattern mass: structurally zero blocks of the frame equation
    double off = 0.0;
    for (int d = 0; d < 2; ++d) {
      const Mat& a = al.dirs[i][static_cast<std::size_t>(d)];
      off = std::max({off, std::abs(a(0, 0)), a.block(0, 1, 1, 2).norm(), a.block(1, 0, 2, 1).norm(),
                      a.block(3, 5, 2, 2).norm(), a.block(5, 3, 2, 2).norm()});
    }
    rep.off_pattern_mass = std::max(rep.off_pattern_mass, off);
  }

  auto wedge22 = [](const Mat& a1, const Mat& a2, const Mat& b1, const Mat& b2) {
    return Mat(a1 * b2 - a2 * b1);
  };

  for (std::size_t i = 0; i < npts; ++i) {
    if (!al.ok[i]) continue;
    bool stencils = w1f.stencil_ok_2(i, 0) && w1f.stencil_ok_2(i, 1);
    if (!stencils) continue;
    const Mat& a1 = al.dirs[i][0];
    const Mat& a2 = al.dirs[i][1];
    Mat b1_1 = a1.block(1, 3, 2, 2) / cp, b1_2 = a2.block(1, 3, 2, 2) / cp;
    Eigen::VectorXcd t2_1 = a1.block(5, 0, 2, 1) / cp, t2_2 = a2.block(5, 0, 2, 1) / cp;

    // plain central differences: the identity residuals are the O(h^2) checks
    auto dblock = [&](const MatrixField& wf) {
      Mat du = wf.d1_2(i, 0), dv = wf.d1_2(i, 1);
      return Mat(du.rightCols(2) - dv.leftCols(2));
    };
    Mat w1a = w1f.v[i].leftCols(2), w1b = w1f.v[i].rightCols(2);
    Mat w2a = w2f.v[i].leftCols(2), w2b = w2f.v[i].rightCols(2);
    Mat w3a = w3f.v[i].leftCols(2), w3b = w3f.v[i].rightCols(2);

    Mat r1 = dblock(w1f) + wedge22(w1a, w1b, w1a, w1b) -
             4.0 * wedge22(b1_1, b1_2, Mat(b1_1.transpose()), Mat(b1_2.transpose()));
    Mat r2 = dblock(w2f) + wedge22(w2a, w2b, w2a, w2b) -
             4.0 * wedge22(Mat(b1_1.transpose()), Mat(b1_2.transpose()), b1_1, b1_2);
    Mat r3 = dblock(w3f) + wedge22(w3a, w3b, w3a, w3b) -
             4.0 * Mat(t2_1 * t2_2.transpose() - t2_2 * t2_1.transpose());
    rep.omega1_residual = std::max(rep.omega1_residual, r1.norm());
    rep.omega2_residual = std::max(rep.omega2_residual, r2.norm());
    rep.omega3_residual = std::max(rep.omega3_residual, r3.norm());
    rep.valid[i] = 1;
  }

  // J-invariance of the three sub-bundles: right octonion multiplication by f
  // maps each 2-plane spanned by the frame columns to itself
  using V7 = Eigen::Matrix<double, 7, 1>;
  for (std::size_t i = 0; i < npts; ++i) {
    if (!field.mask[i]) continue;
    Mat fr = frame_lookup(field, i, l);
    if (fr.imag().norm() > 1e-8) continue;
    RMat f = fr.real();
    V7 u = f.col(0);
    for (int bundle = 0; bundle < 3; ++bundle) {
      int c0 = 1 + 2 * bundle;
      RMat span(7, 2);
      span.col(0) = f.col(c0);
      span.col(1) = f.col(c0 + 1);
      for (int c = 0; c < 2; ++c) {
        V7 jv = oct_mul_im(span.col(c), u).im;
        V7 resid = jv - span * (span.transpose() * jv);
        rep.j_invariance = std::max(rep.j_invariance, resid.norm());
      }
      // lambda = 1: tangent plane is the Y span
      if (bundle == 2 && std::abs(lambda - 1.0) < 1e-12) {
        for (int c = 0; c < 2; ++c) {
          V7 jv = oct_mul_im(span.col(c), u).im;
          V7 resid = jv - span * (span.transpose() * jv);
          rep.tangent_j_invariance = std::max(rep.tangent_j_invariance, resid.norm());
        }
      }
    }
  }

  // lambda = 1 complex-curve degeneration: the (N,Y), (X,Y) and (f,X) blocks vanish
  if (std::abs(lambda - 1.0) < 1e-12) {
    for (std::size_t i = 0; i < npts; ++i) {
      if (!al.ok[i]) continue;
      for (int d = 0; d < 2; ++d) {
        const Mat& a = al.dirs[i][static_cast<std::size_t>(d)];
        rep.complex_curve_sff =
            std::max({rep.complex_curve_sff, a.block(1, 5, 2, 2).norm(), a.block(3, 5, 2, 2).norm(),
                      a.block(0, 3, 1, 2).norm()});
      }
    }
    rep.complex_curve = rep.complex_curve_sff <= 1e-6 && rep.tangent_j_invariance <= 1e-7;
  }
  return rep;
}

SecondaryFlatness secondary_projection_flatness(const FrameField& field,
                                                const PairwiseSymmetricAlgebra& pair,
                                                double lambda) {
  const GridSpec& g = field.grid;
  const std::size_t npts = g.size();
  AlphaField al = alpha_at(field, pair, Cplx(lambda, 0.0));
  SecondaryFlatness out;
  out.curvature_pointwise.assign(npts, 0.0);

  ScalarField e{&g, std::vector<double>(npts, 0.0), std::vector<std::uint8_t>(npts, 0)};
  ScalarField f = e, gm = e;
  for (std::size_t i = 0; i < npts; ++i) {
    if (!al.ok[i]) continue;
    std::vector<Mat> am, cs;
    for (int d = 0; d < g.r; ++d) {
      const Mat& a = al.dirs[i][static_cast<std::size_t>(d)];
      am.push_back(pair.u_minus.project(a));
      cs.push_back(pair.p_prime().project(a) / (lambda + 1.0 / lambda));
    }
    for (int ii = 0; ii < g.r; ++ii)
      for (int jj = ii + 1; jj < g.r; ++jj) {
        Mat w = comm(am[static_cast<std::size_t>(ii)], am[static_cast<std::size_t>(jj)]);
        Mat cc = comm(cs[static_cast<std::size_t>(ii)], cs[static_cast<std::size_t>(jj)]);
        out.wedge_residual = std::max(out.wedge_residual, w.norm());
        out.wedge_identity_residual = std::max(out.wedge_identity_residual, (w - 4.0 * cc).norm());
      }
    if (g.r == 2) {
      e.v[i] = pair.inner(am[0], am[0]);
      f.v[i] = pair.inner(am[0], am[1]);
      gm.v[i] = pair.inner(am[1], am[1]);
      e.ok[i] = f.ok[i] = gm.ok[i] = 1;
    }
  }
  if (g.r == 2) {
    BrioschiResult br = brioschi(g, e, f, gm);
    for (std::size_t i = 0; i < npts; ++i) {
      if (!br.ok[i]) continue;
      out.curvature_pointwise[i] = br.k[i];
      out.intrinsic_curvature = std::max(out.intrinsic_curvature, std::abs(br.k[i]));
    }
  }
  return out;
}

double geodesic_sphere_fit(const ImmersionSamples& samples, int k) {
  std::vector<RVec> pts;
  for (std::size_t i = 0; i < samples.points.size(); ++i)
    if (samples.mask[i]) pts.push_back(samples.points[i]);
  if (pts.empty()) throw ConfigError("no samples to fit");
  RMat m(static_cast<Eigen::Index>(pts.size()), pts[0].size());
  for (std::size_t i = 0; i < pts.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = pts[i].transpose();
  Eigen::JacobiSVD<RMat> svd(m, Eigen::ComputeThinV);
  RMat v = svd.matrixV().leftCols(k + 1);
  double worst = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    RVec p = pts[i];
    worst = std::max(worst, (p - v * (v.transpose() * p)).norm());
  }
  return worst;
}

double connection_lambda_drift(const FrameField& field, const PairwiseSymmetricAlgebra& pair,
                               const std::vector<double>& lambdas) {
  double worst = 0.0;
  std::vector<AlphaField> als;
  for (double l : lambdas) als.push_back(alpha_at(field, pair, Cplx(l, 0.0)));
  for (std::size_t i = 0; i < field.grid.size(); ++i) {
    for (std::size_t a = 0; a < als.size(); ++a) {
      if (!als[a].ok[i]) continue;
      for (std::size_t b = a + 1; b < als.size(); ++b) {
        if (!als[b].ok[i]) continue;
        for (int d = 0; d < field.grid.r; ++d) {
          Mat pa = pair.k_prime().project(als[a].dirs[i][static_cast<std::size_t>(d)]);
          Mat pb = pair.k_prime().project(als[b].dirs[i][static_cast<std::size_t>(d)]);
          worst = std::max(worst, (pa - pb).norm());
        }
      }
    }
  }
  return worst;
}

}  // namespace loopflat
