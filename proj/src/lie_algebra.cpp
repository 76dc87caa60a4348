#include "loopflat/lie_algebra.hpp"

#include <Eigen/QR>

#include "loopflat/errors.hpp"
#include "loopflat/octonion.hpp"

namespace loopflat {

Family family_from_string(const std::string& s) {
  if (s == "so") return Family::so;
  if (s == "su_real") return Family::su_real;
  if (s == "sp") return Family::sp;
  if (s == "sl_real") return Family::sl_real;
  if (s == "sp_real") return Family::sp_real;
  if (s == "g2") return Family::g2;
  throw ConfigError("unknown algebra family: " + s);
}

std::string family_to_string(Family f) {
  switch (f) {
    case Family::so: return "so";
    case Family::su_real: return "su_real";
    case Family::sp: return "sp";
    case Family::sl_real: return "sl_real";
    case Family::sp_real: return "sp_real";
    case Family::g2: return "g2";
  }
  return "?";
}

Involution ad_involution(const Mat& p, const std::string& label) {
  Involution inv;
  inv.kind = Involution::Kind::AdMatrix;
  inv.matrix = p;
  Mat pinv = p.inverse();
  inv.action = [p, pinv](const Mat& x) { return Mat(p * x * pinv); };
  inv.label = label;
  return inv;
}

Involution composite_involution(MatMap fn, const std::string& label) {
  Involution inv;
  inv.kind = Involution::Kind::Composite;
  inv.action = std::move(fn);
  inv.label = label;
  return inv;
}

Involution identity_involution(int ambient) {
  return ad_involution(Mat::Identity(ambient, ambient), "id");
}

RVec LieAlgebraBasis::coords(const Mat& x, double tol) const {
  if (span.membership_residual(x) > tol)
    throw ConfigError("element outside the algebra span (residual " +
                      std::to_string(span.membership_residual(x)) + ")");
  return pinv_ * vec_real(x);
}

double LieAlgebraBasis::killing_form(const Mat& x, const Mat& y) const {
  RVec cx = coords(x);
  RVec cy = coords(y);
  return cx.dot(killing * cy);
}

double LieAlgebraBasis::inner(const Mat& x, const Mat& y) const {
  double t = trace_form(x, y);
  return compact ? -t : t;
}

double LieAlgebraBasis::jacobi_residual() const {
  double worst = 0.0;
  for (const auto& x : basis)
    for (const auto& y : basis)
      for (const auto& z : basis) {
        Mat j = comm(comm(x, y), z) + comm(comm(y, z), x) + comm(comm(z, x), y);
        worst = std::max(worst, j.norm());
      }
  return worst;
}

double LieAlgebraBasis::closure_residual() const {
  double worst = 0.0;
  for (const auto& x : basis)
    for (const auto& y : basis) worst = std::max(worst, span.membership_residual(comm(x, y)) * std::max(1.0, comm(x, y).norm()));
  return worst;
}

LieAlgebraBasis make_algebra(std::string name, int ambient, std::vector<Mat> basis) {
  LieAlgebraBasis alg;
  alg.name = std::move(name);
  alg.ambient = ambient;
  alg.basis = std::move(basis);
  alg.span = SubspaceBasis::from_matrices(alg.basis);
  const int d = alg.dim();
  if (alg.span.dim() != d)
    throw NumericalError(alg.name + ": basis is rank deficient (" + std::to_string(alg.span.dim()) +
                         " of " + std::to_string(d) + ")");

  RMat b(2 * ambient * ambient, d);
  for (int i = 0; i < d; ++i) b.col(i) = vec_real(alg.basis[i]);
  alg.pinv_ = (b.transpose() * b).ldlt().solve(b.transpose());

  // structure constants -> ad matrices
  alg.ad.assign(d, RMat::Zero(d, d));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      Mat br = comm(alg.basis[i], alg.basis[j]);
      if (alg.span.membership_residual(br) > 1e-9)
        throw NumericalError(alg.name + ": bracket not closed at basis pair (" + std::to_string(i) +
                             "," + std::to_string(j) + ")");
      alg.ad[i].col(j) = alg.pinv_ * vec_real(br);
    }
  }
  alg.killing.resize(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j)
      alg.killing(i, j) = alg.killing(j, i) = (alg.ad[i] * alg.ad[j]).trace();

  double herm = 0.0;
  for (const auto& m : alg.basis) herm = std::max(herm, (m + m.adjoint()).norm());
  alg.compact = herm < 1e-12;
  return alg;
}

namespace {

Mat rz(const RMat& m) { return m.cast<Cplx>(); }

LieAlgebraBasis build_so(int m) {
  if (m < 2 || m > 16) throw ConfigError("so: ambient size out of range: " + std::to_string(m));
  std::vector<Mat> basis;
  for (int p = 0; p < m; ++p)
    for (int q = p + 1; q < m; ++q) {
      RMat e = RMat::Zero(m, m);
      e(p, q) = 1.0;
      e(q, p) = -1.0;
      basis.push_back(rz(e));
    }
  return make_algebra("so:" + std::to_string(m), m, std::move(basis));
}

// su(n+1) as the subalgebra of so(2n+2) of matrices [[a, b], [-b, a]],
// a skew, b symmetric traceless.
LieAlgebraBasis build_su_real(int n) {
  const int m = n + 1;
  if (n < 1 || 2 * m > 16) throw ConfigError("su_real: size out of range: n = " + std::to_string(n));
  std::vector<Mat> basis;
  auto embed = [m](const RMat& a, const RMat& b) {
    RMat x = RMat::Zero(2 * m, 2 * m);
    x.topLeftCorner(m, m) = a;
    x.bottomRightCorner(m, m) = a;
    x.topRightCorner(m, m) = b;
    x.bottomLeftCorner(m, m) = -b;
    return rz(x);
  };
  for (int p = 0; p < m; ++p)
    for (int q = p + 1; q < m; ++q) {
      RMat a = RMat::Zero(m, m);
      a(p, q) = 1.0;
      a(q, p) = -1.0;
      basis.push_back(embed(a, RMat::Zero(m, m)));
    }
  for (int p = 0; p < m; ++p)
    for (int q = p; q < m; ++q) {
      RMat b = RMat::Zero(m, m);
      if (p == q) {
        if (p == m - 1) continue;  // tracelessness: use E_pp - E_{p+1,p+1}
        b(p, p) = 1.0;
        b(p + 1, p + 1) = -1.0;
      } else {
        b(p, q) = b(q, p) = 1.0;
      }
      basis.push_back(embed(RMat::Zero(m, m), b));
    }
  return make_algebra("su_real:" + std::to_string(n), 2 * m, std::move(basis));
}

// Compact sp(m) in the complex 2m-dimensional representation:
// [[A, B], [-conj(B), conj(A)]], A anti-Hermitian, B symmetric.
LieAlgebraBasis build_sp(int m) {
  if (m < 1 || 2 * m > 16) throw ConfigError("sp: size out of range: m = " + std::to_string(m));
  std::vector<Mat> basis;
  auto embed = [m](const Mat& a, const Mat& b) {
    Mat x = Mat::Zero(2 * m, 2 * m);
    x.topLeftCorner(m, m) = a;
    x.bottomRightCorner(m, m) = a.conjugate();
    x.topRightCorner(m, m) = b;
    x.bottomLeftCorner(m, m) = -b.conjugate();
    return x;
  };
  const Cplx iu(0.0, 1.0);
  Mat zero = Mat::Zero(m, m);
  for (int p = 0; p < m; ++p) {
    Mat a = zero;
    a(p, p) = iu;
    basis.push_back(embed(a, zero));
  }
  for (int p = 0; p < m; ++p)
    for (int q = p + 1; q < m; ++q) {
      Mat a = zero;
      a(p, q) = 1.0;
      a(q, p) = -1.0;
      basis.push_back(embed(a, zero));
      a(p, q) = iu;
      a(q, p) = iu;
      basis.push_back(embed(a, zero));
    }
  for (int p = 0; p < m; ++p)
    for (int q = p; q < m; ++q) {
      Mat b = zero;
      b(p, q) = 1.0;
      b(q, p) = 1.0;
      basis.push_back(embed(zero, b));
      b(p, q) = iu;
      b(q, p) = iu;
      basis.push_back(embed(zero, b));
    }
  return make_algebra("sp:" + std::to_string(m), 2 * m, std::move(basis));
}

LieAlgebraBasis build_sl_real(int m) {
  if (m < 2 || m > 16) throw ConfigError("sl_real: size out of range: m = " + std::to_string(m));
  std::vector<Mat> basis;
  for (int p = 0; p < m; ++p)
    for (int q = 0; q < m; ++q) {
      if (p == q) continue;
      RMat e = RMat::Zero(m, m);
      e(p, q) = 1.0;
      basis.push_back(rz(e));
    }
  for (int p = 0; p + 1 < m; ++p) {
    RMat e = RMat::Zero(m, m);
    e(p, p) = 1.0;
    e(p + 1, p + 1) = -1.0;
    basis.push_back(rz(e));
  }
  return make_algebra("sl_real:" + std::to_string(m), m, std::move(basis));
}

// sp(m, R) in the real 2m representation: [[A, B], [C, -A^t]], B, C symmetric.
LieAlgebraBasis build_sp_real(int m) {
  if (m < 1 || 2 * m > 16) throw ConfigError("sp_real: size out of range: m = " + std::to_string(m));
  std::vector<Mat> basis;
  auto block = [m](const RMat& a, const RMat& b, const RMat& c) {
    RMat x = RMat::Zero(2 * m, 2 * m);
    x.topLeftCorner(m, m) = a;
    x.bottomRightCorner(m, m) = -a.transpose();
    x.topRightCorner(m, m) = b;
    x.bottomLeftCorner(m, m) = c;
    return rz(x);
  };
  RMat zero = RMat::Zero(m, m);
  for (int p = 0; p < m; ++p)
    for (int q = 0; q < m; ++q) {
      RMat a = zero;
      a(p, q) = 1.0;
      basis.push_back(block(a, zero, zero));
    }
  for (int p = 0; p < m; ++p)
    for (int q = p; q < m; ++q) {
      RMat b = zero;
      b(p, q) = b(q, p) = 1.0;
      basis.push_back(block(zero, b, zero));
      basis.push_back(block(zero, zero, b));
    }
  return make_algebra("sp_real:" + std::to_string(m), 2 * m, std::move(basis));
}

LieAlgebraBasis build_g2() {
  std::vector<RMat> ders = g2_derivation_basis();
  std::vector<Mat> basis;
  basis.reserve(ders.size());
  for (const auto& d : ders) basis.push_back(rz(d));
  return make_algebra("g2", 7, std::move(basis));
}

}  // namespace

LieAlgebraBasis build_algebra(Family f, int n) {
  switch (f) {
    case Family::so: return build_so(n);
    case Family::su_real: return build_su_real(n);
    case Family::sp: return build_sp(n);
    case Family::sl_real: return build_sl_real(n);
    case Family::sp_real: return build_sp_real(n);
    case Family::g2: return build_g2();
  }
  throw ConfigError("unknown family");
}

LieAlgebraBasis build_algebra(const std::string& key) {
  auto colon = key.find(':');
  std::string fam = key.substr(0, colon);
  int n = 0;
  if (colon != std::string::npos) {
    try {
      n = std::stoi(key.substr(colon + 1));
    } catch (const std::exception&) {
      throw ConfigError("bad algebra key: " + key);
    }
  } else if (fam != "g2") {
    throw ConfigError("algebra key needs a size: " + key);
  }
  return build_algebra(family_from_string(fam), n);
}

}  // namespace loopflat
