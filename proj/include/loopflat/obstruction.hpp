#pragma once

#include <optional>

#include "loopflat/cartan_align.hpp"

namespace loopflat {

enum class RealityMode { rho, rho_tilde };

/// A catalog entry: the pairwise symmetric algebra of one geometry, plus how
/// its secondary space is reached (directly, or through the twisted real form
/// for the non-compact families).
struct GeometryCase {
  std::string key;
  std::string description;
  bool compact = true;
  RealityMode reality_mode = RealityMode::rho;
  std::optional<bool> expected_verdict;  // golden from the classification theorems
  std::string note;                      // e.g. excluded-by-citation
  bool excluded_by_citation = false;
  int dim_n = -1;  // dim of the reflective submanifold (overrides dim p' display for doc rows)

  std::function<PairwiseSymmetricAlgebra()> build;            // (u, tau, sigma)
  std::function<PairwiseSymmetricAlgebra()> build_secondary;  // (u~, tau, sigma) when twisted
  std::function<std::vector<Mat>()> witness;                  // explicit abelian family, if any
};

struct VerdictRow {
  std::string key;
  std::string description;
  int dim_p_prime = -1;
  int rank = -1;
  bool riemannian_secondary = false;
  bool exists = false;
  bool witness_used = false;
  bool computed = true;  // false for excluded-by-citation rows
  std::string note;
};

/// All catalog entries at desk scale: spheres (n = 2..7, all k), complex and
/// totally real projective cases (n = 2, 3), the quaternionic case (n = 2),
/// their non-compact analogues through the twisted real form, the exceptional
/// G2 surface case, and the symmetric-R-space row recorded without
/// computation.
std::vector<GeometryCase> catalog();

/// Find a catalog entry by key ("sphere:n=4,k=2", "cpn_real:n=2", ...).
const GeometryCase* find_case(const std::vector<GeometryCase>& cases, const std::string& key);

/// Decide existence: dim p' <= rank of the (possibly twisted) secondary space
/// when that space is Riemannian; otherwise only an explicit abelian witness
/// yields a positive verdict and no non-existence claim is made.
VerdictRow verdict(const GeometryCase& gcase, std::uint64_t seed = 17);

std::vector<VerdictRow> full_table(std::uint64_t seed = 17);

/// Text rendering of the verdict table (aligned columns).
std::string render_table(const std::vector<VerdictRow>& rows);

}  // namespace loopflat
