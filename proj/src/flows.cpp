#include "loopflat/flows.hpp"

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <deque>

#include "loopflat/errors.hpp"
#include "loopflat/parallel.hpp"

namespace loopflat {

std::size_t GridSpec::size() const {
  std::size_t s = 1;
  for (int i = 0; i < r; ++i) s *= static_cast<std::size_t>(points);
  return s;
}

std::size_t GridSpec::base_index() const {
  std::vector<int> c(static_cast<std::size_t>(r), points / 2);
  return index_of(c.data());
}

void GridSpec::coords_of(std::size_t idx, int* out) const {
  for (int i = r - 1; i >= 0; --i) {
    out[i] = static_cast<int>(idx % static_cast<std::size_t>(points));
    idx /= static_cast<std::size_t>(points);
  }
}

std::size_t GridSpec::index_of(const int* c) const {
  std::size_t idx = 0;
  for (int i = 0; i < r; ++i) idx = idx * static_cast<std::size_t>(points) + static_cast<std::size_t>(c[i]);
  return idx;
}

std::vector<double> GridSpec::point_of(std::size_t idx) const {
  std::vector<int> c(static_cast<std::size_t>(r));
  coords_of(idx, c.data());
  std::vector<double> x(static_cast<std::size_t>(r));
  for (int i = 0; i < r; ++i) x[static_cast<std::size_t>(i)] = -extent + c[static_cast<std::size_t>(i)] * spacing();
  return x;
}

bool GridSpec::interior(std::size_t idx, int margin) const {
  std::vector<int> c(static_cast<std::size_t>(r));
  coords_of(idx, c.data());
  for (int i = 0; i < r; ++i)
    if (c[static_cast<std::size_t>(i)] < margin || c[static_cast<std::size_t>(i)] >= points - margin) return false;
  return true;
}

void GridSpec::validate() const {
  if (r < 1 || r > 3) throw ConfigError("grid rank must be 1, 2 or 3");
  if (points < 5 || points % 2 == 0) throw ConfigError("grid needs an odd point count >= 5");
  if (!(extent > 0.0)) throw ConfigError("grid extent must be positive");
}

CurvedFlatSeed make_seed(std::vector<Mat> generators, const PairwiseSymmetricAlgebra& pair) {
  if (generators.empty()) throw ConfigError("seed needs at least one generator");
  for (std::size_t i = 0; i < generators.size(); ++i) {
    if (pair.u_minus.membership_residual(generators[i]) > 1e-8)
      throw ConfigError("seed generator " + std::to_string(i) + " is not in u_-");
    for (std::size_t j = 0; j < generators.size(); ++j)
      if (comm(generators[i], generators[j]).norm() > 1e-10)
        throw ConfigError("seed generators " + std::to_string(i) + "," + std::to_string(j) +
                          " do not commute");
  }
  RMat stacked(2 * generators[0].size(), static_cast<Eigen::Index>(generators.size()));
  for (std::size_t i = 0; i < generators.size(); ++i) stacked.col(static_cast<Eigen::Index>(i)) = vec_real(generators[i]);
  Eigen::JacobiSVD<RMat> svd(stacked);
  if (svd.singularValues().tail(1)(0) < 1e-8)
    throw ConfigError("seed generators are linearly dependent");
  return CurvedFlatSeed{std::move(generators)};
}

CurvedFlatSeed seed_from_alignment(const PairwiseSymmetricAlgebra& pair, const SubspaceBasis& v,
                                   double scale, std::uint64_t seed) {
  AlignmentResult ar = align_cartan(pair, v, AlignMode::constructive, seed);
  std::vector<Mat> gens;
  for (const auto& m : ar.cartan.matrices()) gens.push_back(m * (scale / m.norm()));
  return make_seed(std::move(gens), pair);
}

Mat curved_flat_frame(const CurvedFlatSeed& seed, const std::vector<double>& x, Cplx lambda) {
  const int n = static_cast<int>(seed.generators[0].rows());
  Mat psi = Mat::Zero(n, n);
  for (std::size_t i = 0; i < seed.generators.size(); ++i) psi += x[i] * seed.generators[i];
  return Mat(lambda * psi).exp();
}

FrameField curved_flat_field(const CurvedFlatSeed& seed, const GridSpec& grid,
                             std::vector<double> lambdas, int window) {
  grid.validate();
  const int n = static_cast<int>(seed.generators[0].rows());
  const std::size_t npts = grid.size();
  FrameField field;
  field.grid = grid;
  field.lambdas = std::move(lambdas);
  field.mask.assign(npts, 1);
  field.loops.assign(npts, LaurentLoop());
  field.frames.assign(field.lambdas.size(), std::vector<Mat>(npts, Mat()));
  parallel_for(npts, [&](std::size_t idx) {
    std::vector<double> x = grid.point_of(idx);
    Mat psi = Mat::Zero(n, n);
    for (int i = 0; i < grid.r; ++i) psi += x[static_cast<std::size_t>(i)] * seed.generators[static_cast<std::size_t>(i)];
    field.loops[idx] = loop_exp_monomial(psi, 1, window);
    for (std::size_t li = 0; li < field.lambdas.size(); ++li)
      field.frames[li][idx] = field.loops[idx].eval(field.lambdas[li]);
  });
  return field;
}

int FrameField::ambient() const {
  for (const auto& per_lambda : frames)
    for (const auto& f : per_lambda)
      if (f.size() > 0) return static_cast<int>(f.rows());
  return 0;
}

Mat FrameField::frame_at(std::size_t point, Cplx lambda) const {
  if (!has_loops()) throw ConfigError("frame field carries no loops (loaded from samples only)");
  return loops[point].eval(lambda);
}

int FrameField::lambda_index(double lambda) const {
  for (std::size_t i = 0; i < lambdas.size(); ++i)
    if (std::abs(lambdas[i] - lambda) < 1e-12) return static_cast<int>(i);
  return -1;
}

namespace {

// a X + X a = rhs for X (a close to the identity, so the spectrum is safe).
Mat sylvester_symmetric(const Mat& a, const Mat& rhs) {
  const int n = static_cast<int>(a.rows());
  Mat id = Mat::Identity(n, n);
  Mat k = Eigen::kroneckerProduct(id, a) + Eigen::kroneckerProduct(a.transpose(), id);
  Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(rhs.data(), rhs.size());
  Eigen::VectorXcd sol = k.partialPivLu().solve(v);
  return Eigen::Map<const Mat>(sol.data(), n, n);
}

// keep the connected component of the base point (face-neighbour connectivity)
void mask_connected_component(const GridSpec& grid, std::vector<std::uint8_t>& mask) {
  std::vector<std::uint8_t> reach(grid.size(), 0);
  std::deque<std::size_t> queue;
  std::size_t base = grid.base_index();
  if (!mask[base]) throw NumericalError("factorization failed at the base point");
  reach[base] = 1;
  queue.push_back(base);
  std::vector<int> c(static_cast<std::size_t>(grid.r));
  while (!queue.empty()) {
    std::size_t idx = queue.front();
    queue.pop_front();
    grid.coords_of(idx, c.data());
    for (int axis = 0; axis < grid.r; ++axis) {
      for (int step : {-1, +1}) {
        int old = c[static_cast<std::size_t>(axis)];
        int moved = old + step;
        if (moved < 0 || moved >= grid.points) continue;
        c[static_cast<std::size_t>(axis)] = moved;
        std::size_t nidx = grid.index_of(c.data());
        c[static_cast<std::size_t>(axis)] = old;
        if (mask[nidx] && !reach[nidx]) {
          reach[nidx] = 1;
          queue.push_back(nidx);
        }
      }
    }
  }
  mask = reach;
}

}  // namespace

FrameField kdpw_lift(const CurvedFlatSeed& seed, const PairwiseSymmetricAlgebra& pair,
                     const GridSpec& grid, std::vector<double> lambdas,
                     const LiftOptions& options) {
  grid.validate();
  if (!pair.algebra.compact)
    throw ConfigError("lift construction path requires a compact real form");
  if (seed.dim() != grid.r)
    throw ConfigError("seed dimension " + std::to_string(seed.dim()) +
                      " does not match grid rank " + std::to_string(grid.r));
  const int rank = rank_of_subspace(pair.u_minus);
  if (seed.dim() > rank) throw ObstructionError("seed dimension exceeds the secondary rank");

  const int n = static_cast<int>(seed.generators[0].rows());
  const int w = options.window;
  const std::size_t npts = grid.size();

  FrameField field;
  field.grid = grid;
  field.lambdas = std::move(lambdas);
  field.mask.assign(npts, 0);
  field.loops.assign(npts, LaurentLoop());
  field.mc_c0.assign(npts, {});
  field.mc_c1.assign(npts, {});
  field.frames.assign(field.lambdas.size(), std::vector<Mat>(npts, Mat()));

  std::vector<Mat> tau_gens;
  for (const auto& g : seed.generators) tau_gens.push_back(pair.tau(g));

  parallel_for(npts, [&](std::size_t idx) {
    std::vector<double> x = grid.point_of(idx);
    Mat psi = Mat::Zero(n, n);
    Mat tpsi = Mat::Zero(n, n);
    for (int i = 0; i < grid.r; ++i) {
      psi += x[static_cast<std::size_t>(i)] * seed.generators[static_cast<std::size_t>(i)];
      tpsi += x[static_cast<std::size_t>(i)] * tau_gens[static_cast<std::size_t>(i)];
    }
    try {
      LaurentLoop fplus = loop_exp_monomial(psi, 1, w);
      LaurentLoop tfp_inv = loop_exp_monomial(tpsi, -1, w);
      LaurentLoop wloop = tfp_inv * fplus;

      BirkhoffFactors bf = factorize(wloop, options.birkhoff);
      const int d = bf.degree_used;
      Mat w0 = bf.minus.coeff(0);
      Mat a = w0.sqrt();
      Mat ainv = a.inverse();
      LaurentLoop minus_inv = invert_onesided(bf.minus, d);
      LaurentLoop f = ((fplus * minus_inv) * a).truncated(-w, w);

      // exact Maurer-Cartan coefficients per direction:
      //   c1  = a A_i a^{-1}
      //   c-1 = -tau0(c1)
      //   c0  = a^{-1} (-X1) a + a^{-1} da,  X1 = [ (W+)^{-1} tau0(A_i) W+ ]_1
      // with da from a da + da a = dw0, dw0 = (X1 + [W- A_i (W-)^{-1}]_{-1}) w0.
      LaurentLoop plus_inv = invert_onesided(bf.plus, d);
      std::vector<Mat> c0s(static_cast<std::size_t>(grid.r)), c1s(static_cast<std::size_t>(grid.r));
      for (int i = 0; i < grid.r; ++i) {
        const Mat& gi = seed.generators[static_cast<std::size_t>(i)];
        Mat x1 = ((plus_inv * tau_gens[static_cast<std::size_t>(i)]) * bf.plus).coeff(1);
        Mat adwm_m1 = ((bf.minus * gi) * minus_inv).coeff(-1);
        Mat dw0 = (x1 + adwm_m1) * w0;
        Mat da = sylvester_symmetric(a, dw0);
        c1s[static_cast<std::size_t>(i)] = a * gi * ainv;
        c0s[static_cast<std::size_t>(i)] = ainv * (-x1) * a + ainv * da;
      }
      field.loops[idx] = std::move(f);
      field.mc_c0[idx] = std::move(c0s);
      field.mc_c1[idx] = std::move(c1s);
      field.mask[idx] = 1;
    } catch (const NumericalError&) {
      // point stays masked
    }
  });

  mask_connected_component(grid, field.mask);
  std::size_t good = 0;
  for (auto m : field.mask) good += m;
  field.masked_fraction = 1.0 - static_cast<double>(good) / static_cast<double>(npts);
  if (good == 0) throw NumericalError("no surviving domain around the base point");

  // base normalization holds by construction; assert rather than renormalize
  if ((field.loops[grid.base_index()].eval(1.0) - Mat::Identity(n, n)).norm() > 1e-9)
    throw NumericalError("frame at the base point is not the identity");

  for (std::size_t li = 0; li < field.lambdas.size(); ++li) {
    parallel_for(npts, [&, li](std::size_t idx) {
      if (!field.mask[idx]) {
        field.frames[li][idx] = Mat::Zero(n, n);
        return;
      }
      field.frames[li][idx] = field.loops[idx].eval(field.lambdas[li]);
    });
  }
  return field;
}

std::vector<std::uint8_t> regularity_probe(const FrameField& field,
                                           const PairwiseSymmetricAlgebra& pair) {
  if (!field.has_exact_mc())
    throw ConfigError("regularity probe needs the lift's Maurer-Cartan data");
  const std::size_t npts = field.grid.size();
  std::vector<std::uint8_t> out(npts, 0);
  const auto& pp = pair.p_prime();
  for (std::size_t idx = 0; idx < npts; ++idx) {
    if (!field.mask[idx]) continue;
    RMat m(pp.dim(), field.grid.r);
    for (int i = 0; i < field.grid.r; ++i) m.col(i) = pp.coords(field.mc_c1[idx][static_cast<std::size_t>(i)]);
    Eigen::JacobiSVD<RMat> svd(m);
    double smin = svd.singularValues().size() >= field.grid.r
                      ? svd.singularValues()(field.grid.r - 1)
                      : 0.0;
    out[idx] = smin >= 1e-6 ? 1 : 0;
  }
  return out;
}

}  // namespace loopflat
