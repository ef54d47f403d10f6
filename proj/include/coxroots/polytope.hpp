// Lattice polytopes: Newton polytopes, exact convex hulls, Minkowski sums,
// lattice-point enumeration and mixed volumes.
#pragma once

#include "coxroots/lattice.hpp"

#include <algorithm>
#include <complex>
#include <optional>
#include <span>
#include <vector>

namespace coxroots {

using Complex = std::complex<double>;

/// Lexicographic order on integer vectors.
struct LexLess {
  bool operator()(const LatticeVector& a, const LatticeVector& b) const {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
  }
};

/// Polytope in Z^n. Full-dimensional polytopes carry an irredundant facet
/// representation {m : normals^T m + offsets >= 0} with primitive inward
/// normals stored as columns. Lower-dimensional polytopes carry vertices only.
struct LatticePolytope {
  Eigen::Index dim = 0;
  Eigen::Index affine_dim = 0;
  std::vector<LatticeVector> vertices;
  LatticeMatrix normals;
  LatticeVector offsets;

  bool full_dimensional() const { return affine_dim == dim; }
  Eigen::Index num_facets() const { return normals.cols(); }
  /// normals^T m + offsets >= 0 for every facet.
  bool contains(const LatticeVector& m) const;
};

struct Term {
  LatticeVector exponent;
  Complex coefficient;
};

/// Sparse Laurent polynomial: distinct exponents with complex coefficients.
struct Support {
  std::vector<Term> terms;

  Eigen::Index dimension() const { return terms.empty() ? 0 : terms.front().exponent.size(); }
  /// Throws std::invalid_argument if exponents repeat, dimensions disagree or
  /// all coefficients vanish.
  void validate() const;
};

/// Exact convex hull of a point set of any affine dimension.
LatticePolytope convex_hull(std::span<const LatticeVector> points);

/// Facet representation of a full-dimensional hull. Throws
/// std::invalid_argument naming the deficient dimension otherwise.
LatticePolytope facet_representation(std::span<const LatticeVector> points);

LatticePolytope newton_polytope(const Support& s);

LatticePolytope minkowski_sum(const LatticePolytope& P, const LatticePolytope& Q);

/// Integer points of P in lexicographic order.
std::vector<LatticeVector> lattice_points(const LatticePolytope& P);

/// Integer points of {m : F^T m + a >= 0} in lexicographic order. The region
/// must be bounded (columns of F positively span R^n); an infeasible region
/// yields an empty list.
std::vector<LatticeVector> lattice_points(const LatticeMatrix& F, const LatticeVector& a);

/// a_i = -min over P of <u_i, m> for every column u_i of F.
LatticeVector divisor_offsets(const LatticePolytope& P, const LatticeMatrix& F);

/// Mixed volume through signed lattice-point counts of P0 + P_J over all
/// subsets J. P0 defaults to the Minkowski sum of the inputs.
std::int64_t mixed_volume(std::span<const LatticePolytope> polytopes,
                          const std::optional<LatticePolytope>& p0 = std::nullopt);

/// d * standard simplex in Z^n.
LatticePolytope dilated_simplex(Eigen::Index n, std::int64_t d);

/// Smallest dilate of the standard simplex whose lattice-point differences
/// generate Z^n.
LatticePolytope generate_alpha0(const LatticePolytope& P);

/// Checks that a user supplied auxiliary polytope is full-dimensional in the
/// right ambient space and that its lattice-point differences generate Z^n.
/// Throws std::invalid_argument otherwise.
void validate_alpha0(const LatticePolytope& P0, Eigen::Index n);

}  // namespace coxroots
