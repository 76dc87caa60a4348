#pragma once

#include "loopflat/symmetric_pair.hpp"

namespace loopflat {

enum class AlignMode { constructive, randomized };

struct AlignmentResult {
  SubspaceBasis cartan;     // maximal abelian subspace of u_- projecting onto V
  int steps = 0;            // conjugation steps used (constructive mode)
  int projection_rank = 0;  // rank of the projection onto V at exit
  double smallest_singular = 0.0;
};

/// Produce a maximal abelian subspace m of u_- with pi_V(m) = V, where pi_V is
/// the orthogonal projection for the invariant metric. Requires the secondary
/// space to be Riemannian and dim V <= rank; dim V > rank raises the rank
/// obstruction.
///
/// Constructive mode starts from a random maximal abelian subspace with a
/// regular orthonormal basis and repeatedly conjugates by exp(t [a, y]) with
/// y in V orthogonal to the current subspace, t chosen by a line search that
/// must strictly increase the projection rank. Randomized mode simply draws
/// subspaces until one projects onto V.
AlignmentResult align_cartan(const PairwiseSymmetricAlgebra& pair, const SubspaceBasis& v,
                             AlignMode mode, std::uint64_t seed = 11,
                             const SubspaceBasis* start = nullptr);

}  // namespace loopflat
