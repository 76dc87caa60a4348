#pragma once

#include <optional>

#include "loopflat/lie_algebra.hpp"

namespace loopflat {

/// A Lie algebra with two commuting involutions and the induced four-fold
/// decomposition. Immutable after construction.
struct PairwiseSymmetricAlgebra {
  LieAlgebraBasis algebra;
  Involution tau;    // defines the ambient symmetric space
  Involution sigma;  // defines the secondary symmetric space
  MatMap rho_hat;    // antilinear conjugation fixing the real form (entrywise conj for real representations)

  SubspaceBasis k_space;   // tau = +1
  SubspaceBasis p_space;   // tau = -1
  SubspaceBasis u_plus;    // sigma = +1
  SubspaceBasis u_minus;   // sigma = -1
  SubspaceBasis upp, upm, ump, umm;  // (tau sign, sigma sign) components

  const SubspaceBasis& k_prime() const { return upp; }  // k ∩ u_+
  const SubspaceBasis& p_prime() const { return umm; }  // p ∩ u_-

  double inner(const Mat& x, const Mat& y) const { return algebra.inner(x, y); }

  /// The secondary space is Riemannian iff the trace form is definite on u_-.
  bool secondary_riemannian(int* sign = nullptr) const;
};

/// Build the four-fold decomposition. Validates involutivity, the automorphism
/// property and commutation; throws with the failing identity otherwise.
PairwiseSymmetricAlgebra decompose(const LieAlgebraBasis& alg, const Involution& tau,
                                   const Involution& sigma);

/// Dimension of a maximal abelian subspace of u_-, estimated as the generic
/// dimension of centralizers of random elements (majority vote over >= 5 draws).
int rank_of(const LieAlgebraBasis& alg, const Involution& sigma, std::uint64_t seed = 7);
int rank_of_subspace(const SubspaceBasis& u_minus, std::uint64_t seed = 7);

/// x is regular in the subspace when its centralizer there has the generic dimension.
bool is_regular_in(const SubspaceBasis& sub, const Mat& x, int rank, double tol = 1e-8);

/// A maximal abelian subspace of `sub`: the centralizer of a random regular
/// element. Verified to pairwise-commute to 1e-10 and to have dimension rank.
SubspaceBasis maximal_abelian_in(const SubspaceBasis& sub, std::uint64_t seed = 7,
                                 int expected_rank = -1);

/// max over pairs of ‖[b_i, b_j]‖ for the basis of a subspace.
double commutation_residual(const SubspaceBasis& s);

}  // namespace loopflat
