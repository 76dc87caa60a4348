#pragma once

#include "loopflat/birkhoff.hpp"
#include "loopflat/cartan_align.hpp"

namespace loopflat {

/// Rectangular sample grid on [-L, L]^r, odd point count per axis, base point
/// at the center. Indexing is row-major with the last axis fastest.
struct GridSpec {
  int r = 2;
  double extent = 1.0;
  int points = 33;

  double spacing() const { return points > 1 ? 2.0 * extent / (points - 1) : 0.0; }
  std::size_t size() const;
  std::size_t base_index() const;
  void coords_of(std::size_t idx, int* out) const;
  std::size_t index_of(const int* c) const;
  std::vector<double> point_of(std::size_t idx) const;
  /// true when every coordinate is at least `margin` away from the faces
  bool interior(std::size_t idx, int margin) const;
  void validate() const;
};

/// Commuting, independent generators in u_- spanning a flat.
struct CurvedFlatSeed {
  std::vector<Mat> generators;
  int dim() const { return static_cast<int>(generators.size()); }
};

/// Validates commutation (<= 1e-10), independence (smallest singular value of
/// the stacked system >= 1e-8) and membership in u_-.
CurvedFlatSeed make_seed(std::vector<Mat> generators, const PairwiseSymmetricAlgebra& pair);

/// Align a maximal abelian subspace onto V and rescale its basis to `scale`.
CurvedFlatSeed seed_from_alignment(const PairwiseSymmetricAlgebra& pair, const SubspaceBasis& v,
                                   double scale, std::uint64_t seed);

/// exp(lambda sum x_i A_i): the flat family frame with Maurer-Cartan form
/// lambda sum A_i dx_i.
Mat curved_flat_frame(const CurvedFlatSeed& seed, const std::vector<double>& x, Cplx lambda);

struct LiftOptions {
  int window = 16;  // Laurent window of the one-sided exponentials
  BirkhoffOptions birkhoff{16, 28, 1e-10, 1e12};
  bool keep_loops = true;
};

/// A family of group-valued frames over the grid, normalized to the identity
/// at the base point. Frames are cached at the requested lambda samples; when
/// built by the lift, the full truncated loops and the exact Maurer-Cartan
/// coefficients per direction are kept as well (degree -1 coefficient is
/// -tau0 applied to the degree 1 coefficient).
struct FrameField {
  GridSpec grid;
  std::vector<double> lambdas;
  std::vector<std::vector<Mat>> frames;  // [lambda][point]
  std::vector<std::uint8_t> mask;        // 1 = valid
  std::vector<LaurentLoop> loops;        // empty when loaded from a dump
  std::vector<std::vector<Mat>> mc_c0;   // [point][direction]
  std::vector<std::vector<Mat>> mc_c1;
  double masked_fraction = 0.0;
  std::string case_key;

  bool has_loops() const { return !loops.empty(); }
  bool has_exact_mc() const { return !mc_c1.empty(); }
  int ambient() const;
  Mat frame_at(std::size_t point, Cplx lambda) const;  // evaluates the loop
  int lambda_index(double lambda) const;               // -1 when absent
};

/// The flat family over a grid, as a frame field (loops kept; no exact
/// degree-(-1,1) data since the family is one-sided of degree (1,1)).
FrameField curved_flat_field(const CurvedFlatSeed& seed, const GridSpec& grid,
                             std::vector<double> lambdas, int window = 16);

/// Lift a flat family to a frame field whose Maurer-Cartan form is a Laurent
/// polynomial of degree (-1, 1) fixed by the three involutions. Per grid point:
/// form W = (tau F_+)^{-1} F_+ from the two one-sided exponentials, factorize
/// W = W+ W-, and set F = F_+ (W-)^{-1} sqrt(w0) with w0 the constant
/// coefficient of W- (tau0 w0 = w0^{-1}, so the square-root gauge makes F
/// exactly tau-fixed). Points where the factorization fails are masked and the
/// connected region containing the base point is returned.
FrameField kdpw_lift(const CurvedFlatSeed& seed, const PairwiseSymmetricAlgebra& pair,
                     const GridSpec& grid, std::vector<double> lambdas,
                     const LiftOptions& options = {});

/// Per-point regularity: the p'-projections of the degree-1 Maurer-Cartan
/// coefficients are linearly independent (smallest singular value >= 1e-6).
std::vector<std::uint8_t> regularity_probe(const FrameField& field,
                                           const PairwiseSymmetricAlgebra& pair);

}  // namespace loopflat
