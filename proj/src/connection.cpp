#include "loopflat/connection.hpp"

#include <Eigen/QR>

#include "loopflat/errors.hpp"
#include "loopflat/parallel.hpp"

namespace loopflat {

namespace {

// F^{-1} dF in direction `axis` at grid index, from cached frame samples.
// 4th-order central stencil in the interior, 2nd-order one-sided at the faces.
// Returns false when a stencil point is masked.
bool mc_derivative(const FrameField& field, std::size_t li, std::size_t idx, int axis,
                   Mat* out, bool* boundary) {
  const GridSpec& g = field.grid;
  std::vector<int> c(static_cast<std::size_t>(g.r));
  g.coords_of(idx, c.data());
  const double h = g.spacing();
  auto sample = [&](int offset, Mat* m) {
    std::vector<int> cc = c;
    cc[static_cast<std::size_t>(axis)] += offset;
    if (cc[static_cast<std::size_t>(axis)] < 0 || cc[static_cast<std::size_t>(axis)] >= g.points) return false;
    std::size_t i = g.index_of(cc.data());
    if (!field.mask[i]) return false;
    *m = field.frames[li][i];
    return true;
  };
  Mat fm2, fm1, fp1, fp2, f0;
  if (!sample(0, &f0)) return false;
  bool interior = sample(-2, &fm2) && sample(-1, &fm1) && sample(+1, &fp1) && sample(+2, &fp2);
  Mat df;
  if (interior) {
    df = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
    *boundary = false;
  } else if (sample(+1, &fp1) && sample(+2, &fp2)) {
    df = (-3.0 * f0 + 4.0 * fp1 - fp2) / (2.0 * h);
    *boundary = true;
  } else if (sample(-1, &fm1) && sample(-2, &fm2)) {
    df = (3.0 * f0 - 4.0 * fm1 + fm2) / (2.0 * h);
    *boundary = true;
  } else {
    return false;
  }
  *out = f0.partialPivLu().solve(df);
  return true;
}

}  // namespace

ConnectionData11 extract_connection(const FrameField& field, const PairwiseSymmetricAlgebra& pair,
                                    double fit_tol) {
  int nl = 0;
  for (double l : field.lambdas)
    if (std::abs(l) > 1e-12) ++nl;
  if (nl < 4) throw ConfigError("connection extraction needs at least 4 real lambda samples");

  const GridSpec& g = field.grid;
  const std::size_t npts = g.size();
  const int r = g.r;
  const std::size_t nls = field.lambdas.size();

  // shared Vandermonde for the fit D = A + B (l - 1/l) + C (l + 1/l)
  RMat v(static_cast<Eigen::Index>(nls), 3);
  for (std::size_t s = 0; s < nls; ++s) {
    double l = field.lambdas[s];
    v(static_cast<Eigen::Index>(s), 0) = 1.0;
    v(static_cast<Eigen::Index>(s), 1) = l - 1.0 / l;
    v(static_cast<Eigen::Index>(s), 2) = l + 1.0 / l;
  }
  Eigen::ColPivHouseholderQR<RMat> vqr(v);

  ConnectionData11 conn;
  conn.grid = g;
  conn.a0.assign(npts, {});
  conn.a1pm.assign(npts, {});
  conn.a1mm.assign(npts, {});
  conn.valid.assign(npts, 0);

  std::vector<double> fitres(npts, 0.0), projres(npts, 0.0);
  const int n = field.ambient();

  parallel_for(npts, [&](std::size_t idx) {
    if (!field.mask[idx]) return;
    std::vector<Mat> a0(static_cast<std::size_t>(r)), apm(static_cast<std::size_t>(r)), amm(static_cast<std::size_t>(r));
    bool ok = true, any_boundary = false;
    double worst_fit = 0.0, worst_proj = 0.0;
    for (int axis = 0; axis < r && ok; ++axis) {
      Mat d_stack(static_cast<Eigen::Index>(nls) * n, n);
      for (std::size_t s = 0; s < nls && ok; ++s) {
        Mat d;
        bool boundary = false;
        if (!mc_derivative(field, s, idx, axis, &d, &boundary)) {
          ok = false;
          break;
        }
        any_boundary = any_boundary || boundary;
        d_stack.middleRows(static_cast<Eigen::Index>(s) * n, n) = d;
      }
      if (!ok) break;
      // entrywise least squares against the shared basis (real and imaginary parts separately)
      Mat coeff(3 * n, n);
      for (int col = 0; col < n; ++col) {
        Mat rhs(static_cast<Eigen::Index>(nls), n);
        for (std::size_t s = 0; s < nls; ++s) rhs.row(static_cast<Eigen::Index>(s)) = d_stack.block(static_cast<Eigen::Index>(s) * n, col, n, 1).transpose();
        RMat sol_re = vqr.solve(rhs.real());
        RMat sol_im = vqr.solve(rhs.imag());
        Mat sol = sol_re.cast<Cplx>() + Cplx(0.0, 1.0) * sol_im.cast<Cplx>();  // 3 x n
        for (int k = 0; k < 3; ++k) coeff.block(k * n, col, n, 1) = sol.row(k).transpose();
        Mat resid = v.cast<Cplx>() * sol - rhs;
        worst_fit = std::max(worst_fit, resid.cwiseAbs().maxCoeff());
      }
      Mat a = coeff.topRows(n), b = coeff.middleRows(n, n), c = coeff.bottomRows(n);
      // raw fitted coefficients are stored; the distance to the expected
      // subspaces is a diagnostic (stencil noise for a valid lifted field,
      // order-one for inputs that are not three-involution solutions)
      worst_proj = std::max({worst_proj, (a - pair.k_prime().project(a)).norm(),
                             (b - pair.upm.project(b)).norm(),
                             (c - pair.p_prime().project(c)).norm()});
      a0[static_cast<std::size_t>(axis)] = std::move(a);
      apm[static_cast<std::size_t>(axis)] = std::move(b);
      amm[static_cast<std::size_t>(axis)] = std::move(c);
    }
    if (!ok) return;
    conn.a0[idx] = std::move(a0);
    conn.a1pm[idx] = std::move(apm);
    conn.a1mm[idx] = std::move(amm);
    conn.valid[idx] = any_boundary ? 0 : 1;
    if (!any_boundary) {
      fitres[idx] = worst_fit;
      projres[idx] = worst_proj;
    }
  });

  for (std::size_t i = 0; i < npts; ++i) {
    conn.fit_residual = std::max(conn.fit_residual, fitres[i]);
    conn.proj_residual = std::max(conn.proj_residual, projres[i]);
  }
  if (conn.fit_residual > fit_tol)
    throw VerificationError("Maurer-Cartan form is not of connection order (-1,1): fit residual " +
                            std::to_string(conn.fit_residual));
  return conn;
}

ConnectionData11 connection_from_exact(const FrameField& field,
                                       const PairwiseSymmetricAlgebra& pair) {
  if (!field.has_exact_mc()) throw ConfigError("field has no exact Maurer-Cartan data");
  const GridSpec& g = field.grid;
  const std::size_t npts = g.size();
  ConnectionData11 conn;
  conn.grid = g;
  conn.a0.assign(npts, {});
  conn.a1pm.assign(npts, {});
  conn.a1mm.assign(npts, {});
  conn.valid.assign(npts, 0);
  for (std::size_t idx = 0; idx < npts; ++idx) {
    if (!field.mask[idx]) continue;
    const int r = g.r;
    conn.a0[idx].resize(static_cast<std::size_t>(r));
    conn.a1pm[idx].resize(static_cast<std::size_t>(r));
    conn.a1mm[idx].resize(static_cast<std::size_t>(r));
    for (int i = 0; i < r; ++i) {
      const Mat& c0 = field.mc_c0[idx][static_cast<std::size_t>(i)];
      const Mat& c1 = field.mc_c1[idx][static_cast<std::size_t>(i)];
      // alpha = c0 + c1 l + c-1 / l with c-1 = -tau0 c1; in the three-function
      // basis this is c0 + pi_pm(c1)(l - 1/l) + pi_mm(c1)(l + 1/l)
      Mat b = pair.upm.project(c1);
      Mat c = pair.p_prime().project(c1);
      conn.a0[idx][static_cast<std::size_t>(i)] = c0;
      conn.a1pm[idx][static_cast<std::size_t>(i)] = b;
      conn.a1mm[idx][static_cast<std::size_t>(i)] = c;
      double off = (c1 - b - c).norm() + (c0 - pair.k_prime().project(c0)).norm();
      conn.fit_residual = std::max(conn.fit_residual, off);
    }
    conn.valid[idx] = 1;
  }
  conn.proj_residual = conn.fit_residual;
  return conn;
}

namespace {

struct FieldDiff {
  // central difference of a per-point matrix field along an axis; only fully
  // trusted (interior-extracted) neighbours enter, so one-sided boundary
  // values cannot leak into the residual norms
  static bool diff(const ConnectionData11& conn, const std::vector<std::vector<Mat>>& f,
                   std::size_t idx, int axis, int dir_component, Mat* out) {
    const GridSpec& g = conn.grid;
    std::vector<int> c(static_cast<std::size_t>(g.r));
    g.coords_of(idx, c.data());
    std::vector<int> cm = c, cp = c;
    cm[static_cast<std::size_t>(axis)] -= 1;
    cp[static_cast<std::size_t>(axis)] += 1;
    if (cm[static_cast<std::size_t>(axis)] < 0 || cp[static_cast<std::size_t>(axis)] >= g.points) return false;
    std::size_t im = g.index_of(cm.data()), ip = g.index_of(cp.data());
    if (!conn.valid[im] || !conn.valid[ip]) return false;
    if (f[im].empty() || f[ip].empty()) return false;
    *out = (f[ip][static_cast<std::size_t>(dir_component)] - f[im][static_cast<std::size_t>(dir_component)]) /
           (2.0 * g.spacing());
    return true;
  }
};

}  // namespace

McResiduals mc_residuals(const ConnectionData11& conn, double physical_margin) {
  const GridSpec& g = conn.grid;
  const std::size_t npts = g.size();
  McResiduals res;
  res.wedge_balance_pointwise.assign(npts, 0.0);

  for (std::size_t idx = 0; idx < npts; ++idx) {
    if (!conn.valid[idx]) continue;
    if (physical_margin > 0.0) {
      bool inside = true;
      for (double x : g.point_of(idx)) inside = inside && std::abs(x) <= g.extent - physical_margin;
      if (!inside) continue;
    }
    const auto& a0 = conn.a0[idx];
    const auto& bpm = conn.a1pm[idx];
    const auto& cmm = conn.a1mm[idx];
    double wb_here = 0.0;
    for (int i = 0; i < g.r; ++i) {
      for (int j = i + 1; j < g.r; ++j) {
        auto wedge = [&](const std::vector<Mat>& u, const std::vector<Mat>& v) {
          return Mat(u[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)] -
                     u[static_cast<std::size_t>(j)] * v[static_cast<std::size_t>(i)]);
        };
        // derivative-free identities first
        Mat mixed = wedge(bpm, cmm) + wedge(cmm, bpm);
        Mat balance = wedge(cmm, cmm) + wedge(bpm, bpm);
        res.mixed_wedge = std::max(res.mixed_wedge, mixed.norm());
        wb_here = std::max(wb_here, balance.norm());

        // identities with exterior derivatives need full stencils
        Mat d_a0_i, d_a0_j, d_b_i, d_b_j, d_c_i, d_c_j;
        bool have = FieldDiff::diff(conn, conn.a0, idx, i, j, &d_a0_j) &&
                    FieldDiff::diff(conn, conn.a0, idx, j, i, &d_a0_i) &&
                    FieldDiff::diff(conn, conn.a1pm, idx, i, j, &d_b_j) &&
                    FieldDiff::diff(conn, conn.a1pm, idx, j, i, &d_b_i) &&
                    FieldDiff::diff(conn, conn.a1mm, idx, i, j, &d_c_j) &&
                    FieldDiff::diff(conn, conn.a1mm, idx, j, i, &d_c_i);
        if (!have) continue;
        Mat da0 = d_a0_j - d_a0_i;  // (d a0)(e_i, e_j)
        Mat db = d_b_j - d_b_i;
        Mat dc = d_c_j - d_c_i;
        Mat curv = da0 + wedge(a0, a0) + 2.0 * (wedge(cmm, cmm) - wedge(bpm, bpm));
        Mat pmp = db + wedge(a0, bpm) + wedge(bpm, a0);
        Mat mmp = dc + wedge(a0, cmm) + wedge(cmm, a0);
        res.curvature_balance = std::max(res.curvature_balance, curv.norm());
        res.pm_parallel = std::max(res.pm_parallel, pmp.norm());
        res.mm_parallel = std::max(res.mm_parallel, mmp.norm());
      }
    }
    res.wedge_balance_pointwise[idx] = wb_here;
    res.wedge_balance = std::max(res.wedge_balance, wb_here);
  }
  return res;
}

}  // namespace loopflat
