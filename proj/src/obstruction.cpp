#include "loopflat/obstruction.hpp"

#include <sstream>

#include "loopflat/errors.hpp"

namespace loopflat {

namespace {

Mat block_signs(int plus, int minus) {
  Mat m = Mat::Identity(plus + minus, plus + minus);
  for (int i = plus; i < plus + minus; ++i) m(i, i) = -1.0;
  return m;
}

// diag(a, b, a, b) for the real representation of complex conjugating matrices
Mat doubled_signs(int plus, int minus) {
  int m = plus + minus;
  Mat q = Mat::Identity(2 * m, 2 * m);
  for (int i = plus; i < m; ++i) q(i, i) = q(m + i, m + i) = -1.0;
  return q;
}

Mat symplectic_j(int m) {
  Mat j = Mat::Zero(2 * m, 2 * m);
  j.topRightCorner(m, m) = Mat::Identity(m, m);
  j.bottomLeftCorner(m, m) = -Mat::Identity(m, m);
  return j;
}

// so(n, 1): [[A, b], [b^t, 0]] with A skew. Not part of the public catalog of
// compact forms; used here as the seed of the twisted construction.
std::vector<Mat> so_lorentz_basis(int n) {
  std::vector<Mat> basis;
  for (int p = 0; p < n; ++p)
    for (int q = p + 1; q < n; ++q) {
      Mat e = Mat::Zero(n + 1, n + 1);
      e(p, q) = 1.0;
      e(q, p) = -1.0;
      basis.push_back(e);
    }
  for (int p = 0; p < n; ++p) {
    Mat e = Mat::Zero(n + 1, n + 1);
    e(p, n) = 1.0;
    e(n, p) = 1.0;
    basis.push_back(e);
  }
  return basis;
}

// su(n, 1): X^dagger J + J X = 0, tr X = 0, J = diag(I_n, -1).
std::vector<Mat> su_lorentz_basis(int n) {
  const Cplx iu(0.0, 1.0);
  std::vector<Mat> basis;
  const int m = n + 1;
  for (int p = 0; p < n; ++p)
    for (int q = p + 1; q < n; ++q) {
      Mat e = Mat::Zero(m, m);
      e(p, q) = 1.0;
      e(q, p) = -1.0;
      basis.push_back(e);
      e(p, q) = iu;
      e(q, p) = iu;
      basis.push_back(e);
    }
  for (int p = 0; p < m - 1; ++p) {
    Mat e = Mat::Zero(m, m);
    e(p, p) = iu;
    e(p + 1, p + 1) = -iu;
    basis.push_back(e);
  }
  for (int p = 0; p < n; ++p) {
    Mat e = Mat::Zero(m, m);
    e(p, n) = 1.0;
    e(n, p) = 1.0;
    basis.push_back(e);
    e(p, n) = iu;
    e(n, p) = -iu;
    basis.push_back(e);
  }
  return basis;
}

/// Real form of the complex span of `real_form_basis` fixed by the antilinear
/// involution theta: spanned by X + theta(X) over X in {b, ib}.
LieAlgebraBasis twisted_real_form(const std::string& name, int ambient,
                                  const std::vector<Mat>& real_form_basis, const MatMap& theta) {
  const Cplx iu(0.0, 1.0);
  std::vector<Mat> gens;
  for (const auto& b : real_form_basis) {
    gens.push_back(b + theta(b));
    Mat ib = iu * b;
    gens.push_back(ib + theta(ib));
  }
  SubspaceBasis span = SubspaceBasis::from_matrices(gens, 1e-9);
  if (span.dim() != static_cast<int>(real_form_basis.size()))
    throw NumericalError(name + ": twisted form has dimension " + std::to_string(span.dim()) +
                         ", expected " + std::to_string(real_form_basis.size()));
  return make_algebra(name, ambient, span.matrices());
}

// --- case builders ----------------------------------------------------------

PairwiseSymmetricAlgebra sphere_case(int n, int k) {
  auto alg = build_algebra(Family::so, n + 1);
  return decompose(alg, ad_involution(block_signs(n, 1), "tau"),
                   ad_involution(block_signs(k, n + 1 - k), "sigma"));
}

PairwiseSymmetricAlgebra cpn_complex_case(int n, int k) {
  auto alg = build_algebra(Family::su_real, n);
  return decompose(alg, ad_involution(doubled_signs(n, 1), "tau"),
                   ad_involution(doubled_signs(k, n + 1 - k), "sigma"));
}

PairwiseSymmetricAlgebra cpn_real_case(int n) {
  auto alg = build_algebra(Family::su_real, n);
  return decompose(alg, ad_involution(doubled_signs(n, 1), "tau"),
                   ad_involution(block_signs(n + 1, n + 1), "sigma"));
}

PairwiseSymmetricAlgebra hpn_case(int n) {
  auto alg = build_algebra(Family::sp, n + 1);
  return decompose(alg, ad_involution(doubled_signs(n, 1), "tau"),
                   ad_involution(symplectic_j(n + 1), "sigma"));
}

PairwiseSymmetricAlgebra g2_case() {
  auto alg = build_algebra(Family::g2, 0);
  Mat q = Mat::Identity(7, 7);
  q(1, 1) = q(2, 2) = q(5, 5) = q(6, 6) = -1.0;
  return decompose(alg, ad_involution(q, "tau"), ad_involution(block_signs(3, 4), "sigma"));
}

// primary hyperbolic pair (so(n,1), tau, sigma)
PairwiseSymmetricAlgebra hyperbolic_case(int n, int k) {
  auto alg = make_algebra("so_lorentz:" + std::to_string(n), n + 1, so_lorentz_basis(n));
  return decompose(alg, ad_involution(block_signs(n, 1), "tau"),
                   ad_involution(block_signs(k, n + 1 - k), "sigma"));
}

// twisted form of so(n,1): fixed points of X -> Ad_{QP} conj(X)
PairwiseSymmetricAlgebra hyperbolic_twisted(int n, int k) {
  Mat qp = Mat::Identity(n + 1, n + 1);
  for (int i = k; i < n; ++i) qp(i, i) = -1.0;
  MatMap theta = [qp](const Mat& x) { return Mat(qp * x.conjugate() * qp); };
  auto twisted = twisted_real_form("so_lorentz_twisted:" + std::to_string(n), n + 1,
                                   so_lorentz_basis(n), theta);
  return decompose(twisted, ad_involution(block_signs(n, 1), "tau"),
                   ad_involution(block_signs(k, n + 1 - k), "sigma"));
}

PairwiseSymmetricAlgebra chn_complex_case(int n, int k) {
  auto alg = make_algebra("su_lorentz:" + std::to_string(n), n + 1, su_lorentz_basis(n));
  return decompose(alg, ad_involution(block_signs(n, 1), "tau"),
                   ad_involution(block_signs(k, n + 1 - k), "sigma"));
}

PairwiseSymmetricAlgebra chn_complex_twisted(int n, int k) {
  Mat j = block_signs(n, 1);
  Mat p = block_signs(k, n + 1 - k);
  // conjugation fixing su(n,1) is X -> -J X^dagger J; compose with Ad_{JP}
  MatMap theta = [j, p](const Mat& x) {
    Mat y = j * p * x * p * j;             // tau(sigma(x))
    return Mat(-j * y.adjoint() * j);      // rho0 of it
  };
  auto twisted = twisted_real_form("su_lorentz_twisted:" + std::to_string(n), n + 1,
                                   su_lorentz_basis(n), theta);
  return decompose(twisted, ad_involution(block_signs(n, 1), "tau"),
                   ad_involution(block_signs(k, n + 1 - k), "sigma"));
}

// totally real hyperbolic case in the literal sl(n+1, R) presentation
PairwiseSymmetricAlgebra chn_real_case(int n) {
  auto alg = build_algebra(Family::sl_real, n + 1);
  Mat j = block_signs(n, 1);
  return decompose(alg, ad_involution(j, "tau"),
                   composite_involution([j](const Mat& x) { return Mat(-j * x.transpose() * j); },
                                        "sigma"));
}

std::vector<Mat> chn_real_witness(int n) {
  std::vector<Mat> gens;
  for (int i = 0; i < n - 1; ++i) {
    Mat e = Mat::Zero(n + 1, n + 1);
    e(i, n - 1) = 1.0;
    e(i, n) = 1.0;
    e(n - 1, i) = 1.0;
    e(n, i) = -1.0;
    gens.push_back(e);
  }
  Mat ehat = Mat::Zero(n + 1, n + 1);
  ehat(n - 1, n - 1) = 1.0;
  ehat(n - 1, n) = 1.0;
  ehat(n, n - 1) = -1.0;
  ehat(n, n) = -1.0;
  gens.push_back(ehat);
  return gens;
}

PairwiseSymmetricAlgebra hhn_twisted(int n) {
  auto alg = build_algebra(Family::sp_real, n + 1);
  return decompose(alg, ad_involution(doubled_signs(n, 1), "tau"),
                   ad_involution(symplectic_j(n + 1), "sigma"));
}

}  // namespace

std::vector<GeometryCase> catalog() {
  std::vector<GeometryCase> cases;

  for (int n = 2; n <= 7; ++n) {
    for (int k = 1; k < n; ++k) {
      GeometryCase c;
      c.key = "sphere:n=" + std::to_string(n) + ",k=" + std::to_string(k);
      c.description = "S^" + std::to_string(k) + " in S^" + std::to_string(n) +
                      " (flat normal bundle)";
      c.expected_verdict = 2 * k <= n + 1;
      c.build = [n, k] { return sphere_case(n, k); };
      cases.push_back(std::move(c));
    }
  }

  for (int n = 2; n <= 3; ++n) {
    for (int k = 1; k < n; ++k) {
      GeometryCase c;
      c.key = "cpn_complex:n=" + std::to_string(n) + ",k=" + std::to_string(k);
      c.description = "complex CP^" + std::to_string(k) + " in CP^" + std::to_string(n);
      c.expected_verdict = false;
      c.build = [n, k] { return cpn_complex_case(n, k); };
      cases.push_back(std::move(c));
    }
    GeometryCase r;
    r.key = "cpn_real:n=" + std::to_string(n);
    r.description = "totally real RP^" + std::to_string(n) + " in CP^" + std::to_string(n);
    r.expected_verdict = true;
    r.build = [n] { return cpn_real_case(n); };
    cases.push_back(std::move(r));
  }

  {
    GeometryCase c;
    c.key = "hpn:n=2";
    c.description = "totally complex CP^2 in HP^2";
    c.expected_verdict = false;
    c.build = [] { return hpn_case(2); };
    cases.push_back(std::move(c));
  }

  for (int n = 2; n <= 7; ++n) {
    for (int k = 1; k < n; ++k) {
      GeometryCase c;
      c.key = "hyperbolic:n=" + std::to_string(n) + ",k=" + std::to_string(k);
      c.description = "H^" + std::to_string(k) + " in H^" + std::to_string(n) +
                      " (flat normal bundle)";
      c.compact = false;
      c.reality_mode = RealityMode::rho_tilde;
      c.expected_verdict = 2 * k <= n + 1;
      c.build = [n, k] { return hyperbolic_case(n, k); };
      c.build_secondary = [n, k] { return hyperbolic_twisted(n, k); };
      cases.push_back(std::move(c));
    }
  }

  for (int n = 2; n <= 3; ++n) {
    for (int k = 1; k < n; ++k) {
      GeometryCase c;
      c.key = "chn_complex:n=" + std::to_string(n) + ",k=" + std::to_string(k);
      c.description = "complex CH^" + std::to_string(k) + " in CH^" + std::to_string(n);
      c.compact = false;
      c.reality_mode = RealityMode::rho_tilde;
      c.expected_verdict = false;
      c.build = [n, k] { return chn_complex_case(n, k); };
      c.build_secondary = [n, k] { return chn_complex_twisted(n, k); };
      cases.push_back(std::move(c));
    }
    GeometryCase r;
    r.key = "chn_real:n=" + std::to_string(n);
    r.description = "totally real H^" + std::to_string(n) + " in CH^" + std::to_string(n);
    r.compact = false;
    r.reality_mode = RealityMode::rho_tilde;
    r.expected_verdict = true;
    r.note = "non-Riemannian secondary space: existence by explicit abelian family";
    r.build = [n] { return chn_real_case(n); };
    r.build_secondary = [n] { return chn_real_case(n); };
    r.witness = [n] { return chn_real_witness(n); };
    cases.push_back(std::move(r));
  }

  {
    GeometryCase c;
    c.key = "hhn:n=2";
    c.description = "totally complex CH^2 in HH^2";
    c.compact = false;
    c.reality_mode = RealityMode::rho_tilde;
    c.expected_verdict = false;
    c.build = [] { return hhn_twisted(2); };  // verdict data lives in the twisted form
    c.build_secondary = [] { return hhn_twisted(2); };
    cases.push_back(std::move(c));
  }

  {
    GeometryCase c;
    c.key = "g2";
    c.description = "G2 pair: full-dimension deformations of the reflective submanifold";
    c.expected_verdict = false;
    c.note = "rank-2 surfaces in S^6 exist as the lower-dimensional sub-geometry";
    c.build = [] { return g2_case(); };
    cases.push_back(std::move(c));
  }

  {
    GeometryCase c;
    c.key = "symmetric_r_space";
    c.description = "geometries of symmetric R-spaces";
    c.excluded_by_citation = true;
    c.expected_verdict = false;
    c.note = "excluded by the cited classification: only homothety factors below one occur";
    cases.push_back(std::move(c));
  }
  return cases;
}

const GeometryCase* find_case(const std::vector<GeometryCase>& cases, const std::string& key) {
  for (const auto& c : cases)
    if (c.key == key) return &c;
  return nullptr;
}

VerdictRow verdict(const GeometryCase& gcase, std::uint64_t seed) {
  VerdictRow row;
  row.key = gcase.key;
  row.description = gcase.description;
  row.note = gcase.note;
  if (gcase.excluded_by_citation) {
    row.computed = false;
    row.exists = false;
    return row;
  }
  PairwiseSymmetricAlgebra primary = gcase.build();
  row.dim_p_prime = primary.p_prime().dim();

  PairwiseSymmetricAlgebra secondary =
      gcase.reality_mode == RealityMode::rho ? std::move(primary) : gcase.build_secondary();
  if (gcase.reality_mode == RealityMode::rho_tilde &&
      secondary.p_prime().dim() != row.dim_p_prime)
    throw NumericalError(gcase.key + ": twisted form changed dim p' (" +
                         std::to_string(secondary.p_prime().dim()) + " vs " +
                         std::to_string(row.dim_p_prime) + ")");

  row.riemannian_secondary = trace_form_definite(secondary.u_minus);
  row.rank = rank_of_subspace(secondary.u_minus, seed);

  if (row.riemannian_secondary) {
    row.exists = row.dim_p_prime <= row.rank;
    return row;
  }
  // non-Riemannian: only a verified explicit witness yields a positive verdict
  if (gcase.witness) {
    std::vector<Mat> w = gcase.witness();
    bool ok = static_cast<int>(w.size()) == row.dim_p_prime;
    for (const auto& a : w) {
      ok = ok && secondary.u_minus.membership_residual(a) < 1e-10;
      for (const auto& b : w) ok = ok && comm(a, b).norm() < 1e-12;
    }
    RMat proj(secondary.p_prime().dim(), static_cast<int>(w.size()));
    for (std::size_t i = 0; i < w.size(); ++i) proj.col(static_cast<Eigen::Index>(i)) = secondary.p_prime().coords(w[i]);
    Eigen::JacobiSVD<RMat> svd(proj);
    ok = ok && svd.singularValues().size() >= row.dim_p_prime &&
         svd.singularValues()(row.dim_p_prime - 1) > 1e-8;
    row.exists = ok;
    row.witness_used = true;
    if (!ok) row.note += " [witness failed verification]";
  } else {
    row.exists = false;
    row.note += " [non-Riemannian secondary space: no non-existence claim]";
  }
  return row;
}

std::vector<VerdictRow> full_table(std::uint64_t seed) {
  std::vector<VerdictRow> rows;
  for (const auto& c : catalog()) rows.push_back(verdict(c, seed));
  return rows;
}

std::string render_table(const std::vector<VerdictRow>& rows) {
  std::ostringstream os;
  auto pad = [](const std::string& s, std::size_t w) {
    return s.size() >= w ? s : s + std::string(w - s.size(), ' ');
  };
  os << pad("case", 26) << pad("dim N", 7) << pad("rank", 6) << pad("riem.", 7)
     << pad("exists", 8) << "note\n";
  for (const auto& r : rows) {
    os << pad(r.key, 26);
    if (r.computed) {
      os << pad(std::to_string(r.dim_p_prime), 7) << pad(std::to_string(r.rank), 6)
         << pad(r.riemannian_secondary ? "yes" : "no", 7);
    } else {
      os << pad("-", 7) << pad("-", 6) << pad("-", 7);
    }
    os << pad(r.exists ? "yes" : "no", 8) << r.note << "\n";
  }
  return os.str();
}

}  // namespace loopflat
