#pragma once

#include "loopflat/laurent.hpp"

namespace loopflat {

/// x = plus * minus with plus holomorphic in the disc (window in [0, d],
/// plus(0) = I) and minus holomorphic at infinity (window in [-d, 0]).
struct BirkhoffFactors {
  LaurentLoop plus;
  LaurentLoop minus;
  double residual = 0.0;  // recomposition error over the sample set
  int degree_used = 0;
  double condition = 0.0;  // condition estimate of the coefficient system
};

struct BirkhoffOptions {
  int degree = 12;
  int max_degree = 28;
  double tol = 1e-10;
  double cond_limit = 1e12;
};

/// Near-identity Birkhoff factorization via a linear solve on the coefficients:
/// find y with window [-d, 0], y_0 = I, such that all negative-degree
/// coefficients of x*y vanish (a block-Toeplitz least-squares system). Then
/// with P the degree-0 coefficient of x*y,
///   plus = x*y*P^{-1},  minus = P*y^{-1}.
/// The truncation degree is raised by 4 until the recomposition residual is
/// below tol; an ill-conditioned system raises BigCellError, a residual floor
/// that never clears raises TruncationError.
BirkhoffFactors factorize(const LaurentLoop& x, const BirkhoffOptions& opt = {});

enum class SubgroupReality { rho, rho_tilde };

/// Factorization of a loop fixed by sigma and a first-kind conjugation.
/// By uniqueness the factors lie in the same fixed-point subgroup; this is
/// verified a posteriori and a violation beyond 1e-7 signals an internal bug.
BirkhoffFactors factorize_in_subgroup(const LaurentLoop& x, const PairwiseSymmetricAlgebra& pair,
                                      SubgroupReality reality, const BirkhoffOptions& opt = {});

/// max over the sample set (16 circle points plus real radii) of the
/// pointwise recomposition error relative to ‖x‖.
double recomposition_residual(const LaurentLoop& plus, const LaurentLoop& minus,
                              const LaurentLoop& x);

}  // namespace loopflat
