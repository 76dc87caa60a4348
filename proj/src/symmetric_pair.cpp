#include "loopflat/symmetric_pair.hpp"

#include <map>

#include "loopflat/errors.hpp"

namespace loopflat {

bool PairwiseSymmetricAlgebra::secondary_riemannian(int* sign) const {
  return trace_form_definite(u_minus, 1e-8, sign);
}

PairwiseSymmetricAlgebra decompose(const LieAlgebraBasis& alg, const Involution& tau,
                                   const Involution& sigma) {
  // validation: involutive, automorphism, commuting — each reported with the failing identity
  for (const auto& inv : {std::cref(tau), std::cref(sigma)}) {
    const Involution& f = inv.get();
    for (const auto& b : alg.basis) {
      if ((f(f(b)) - b).norm() > 1e-10)
        throw ConfigError(f.label + " is not involutive: f(f(X)) != X");
      if (alg.span.membership_residual(f(b)) > 1e-9)
        throw ConfigError(f.label + " does not preserve the algebra");
    }
    for (const auto& x : alg.basis)
      for (const auto& y : alg.basis)
        if ((f(comm(x, y)) - comm(f(x), f(y))).norm() > 1e-9)
          throw ConfigError(f.label + " is not an automorphism: f([X,Y]) != [fX, fY]");
  }
  for (const auto& b : alg.basis)
    if ((tau(sigma(b)) - sigma(tau(b))).norm() > 1e-10)
      throw ConfigError("involutions do not commute: tau(sigma(X)) != sigma(tau(X))");

  PairwiseSymmetricAlgebra pair;
  pair.algebra = alg;
  pair.tau = tau;
  pair.sigma = sigma;
  pair.rho_hat = [](const Mat& x) { return x.conjugate().eval(); };

  pair.k_space = eigenspace_in(alg.span, tau.action, +1.0);
  pair.p_space = eigenspace_in(alg.span, tau.action, -1.0);
  pair.u_plus = eigenspace_in(alg.span, sigma.action, +1.0);
  pair.u_minus = eigenspace_in(alg.span, sigma.action, -1.0);
  pair.upp = eigenspace_in(pair.k_space, sigma.action, +1.0);
  pair.upm = eigenspace_in(pair.k_space, sigma.action, -1.0);
  pair.ump = eigenspace_in(pair.p_space, sigma.action, +1.0);
  pair.umm = eigenspace_in(pair.p_space, sigma.action, -1.0);

  int total = pair.upp.dim() + pair.upm.dim() + pair.ump.dim() + pair.umm.dim();
  if (total != alg.dim())
    throw NumericalError("four-fold decomposition dimensions sum to " + std::to_string(total) +
                         ", expected " + std::to_string(alg.dim()));
  return pair;
}

int rank_of_subspace(const SubspaceBasis& u_minus, std::uint64_t seed) {
  if (u_minus.dim() == 0)
    throw ConfigError("rank is undefined: the (-1)-eigenspace is zero");
  std::mt19937_64 rng(seed);
  std::map<int, int> votes;
  const int min_draws = 5, max_draws = 15;
  for (int draw = 0; draw < max_draws; ++draw) {
    Mat x = u_minus.random_element(rng);
    int d = centralizer_in(u_minus, x).dim();
    votes[d]++;
    if (draw + 1 >= min_draws) {
      for (const auto& [dim, count] : votes)
        if (2 * count > draw + 1) return dim;
    }
  }
  throw NumericalError("rank estimate did not stabilize: inconsistent centralizer dimensions");
}

int rank_of(const LieAlgebraBasis& alg, const Involution& sigma, std::uint64_t seed) {
  SubspaceBasis u_minus = eigenspace_in(alg.span, sigma.action, -1.0);
  return rank_of_subspace(u_minus, seed);
}

bool is_regular_in(const SubspaceBasis& sub, const Mat& x, int rank, double tol) {
  return centralizer_in(sub, x, tol).dim() == rank;
}

double commutation_residual(const SubspaceBasis& s) {
  double worst = 0.0;
  for (const auto& a : s.matrices())
    for (const auto& b : s.matrices()) worst = std::max(worst, comm(a, b).norm());
  return worst;
}

SubspaceBasis maximal_abelian_in(const SubspaceBasis& sub, std::uint64_t seed, int expected_rank) {
  int rank = expected_rank > 0 ? expected_rank : rank_of_subspace(sub, seed);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  const int budget = 50;
  for (int attempt = 0; attempt < budget; ++attempt) {
    Mat x = sub.random_element(rng);
    SubspaceBasis c = centralizer_in(sub, x);
    if (c.dim() != rank) continue;
    if (commutation_residual(c) > 1e-10) continue;
    return c;
  }
  throw NumericalError("maximal_abelian_in: no abelian subspace of dimension " +
                       std::to_string(rank) + " found within the draw budget");
}

}  // namespace loopflat
