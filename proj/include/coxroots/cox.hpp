// Cox ring of the toric variety of a lattice polytope: class-group grading,
// homogenization, graded monomial bases and the quotient map to the torus.
#pragma once

#include "coxroots/polytope.hpp"

#include <Eigen/Core>

#include <map>
#include <optional>
#include <vector>

namespace coxroots {

using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

/// Degree class in Z^k / im F^T. `canonical` is the torsion part reduced
/// modulo the invariant factors followed by the free coordinates.
struct GradedDegree {
  LatticeVector representative;
  LatticeVector canonical;

  bool operator==(const GradedDegree& other) const { return canonical == other.canonical; }
};

class CoxRing {
 public:
  /// rays: n x k matrix of primitive ray generators (columns). Throws
  /// std::invalid_argument if the rank is below n.
  CoxRing() = default;
  explicit CoxRing(LatticeMatrix rays);

  Eigen::Index n() const { return rays_.rows(); }
  Eigen::Index k() const { return rays_.cols(); }
  const LatticeMatrix& rays() const { return rays_; }

  /// Unimodular k x k matrix from the SNF of F^T; rows [0, n) carry torsion
  /// modulo the invariant factors, rows [n, k) the free part of the class group.
  const LatticeMatrix& degree_projection() const { return projection_; }
  /// Invariant factors of F^T greater than one: the torsion of the class group.
  const std::vector<std::int64_t>& torsion_moduli() const { return moduli_; }

  GradedDegree degree(const LatticeVector& a) const;
  Eigen::Index class_group_rank() const { return k() - n(); }

 private:
  LatticeMatrix rays_;
  LatticeMatrix projection_;
  std::vector<std::int64_t> factors_;
  std::vector<std::int64_t> moduli_;
};

CoxRing build_cox_ring(const LatticePolytope& P);

/// Homogeneous element of the Cox ring.
struct CoxPolynomial {
  std::vector<LatticeVector> exponents;
  std::vector<Complex> coefficients;
  GradedDegree degree;

  std::size_t size() const { return exponents.size(); }
};

struct LaurentSystem {
  Eigen::Index n = 0;
  std::vector<Support> polynomials;

  /// Throws std::invalid_argument unless square with valid supports.
  void validate() const;
};

/// c_m t^m  ->  c_m x^(F^T m + a). Terms with zero coefficient are dropped.
/// Throws std::invalid_argument naming the offending exponent and facet if
/// F^T m + a has a negative entry.
CoxPolynomial homogenize(const CoxRing& ring, const Support& s, const LatticeVector& a);

/// Lattice points of {m : F^T m + a >= 0} in lexicographic order.
std::vector<LatticeVector> graded_piece_points(const CoxRing& ring, const LatticeVector& a);

/// Monomials x^(F^T m + a) over graded_piece_points(ring, a).
std::vector<LatticeVector> graded_basis(const CoxRing& ring, const LatticeVector& a);

/// Position of each monomial of a basis.
std::map<LatticeVector, Eigen::Index, LexLess> index_monomials(const std::vector<LatticeVector>& basis);

/// z^e with 0^0 = 1 and integer powers by repeated squaring.
Complex monomial(const ComplexVector& z, const LatticeVector& e);

Complex evaluate(const CoxPolynomial& p, const ComplexVector& z);

/// Laurent evaluation at a torus point.
Complex evaluate(const Support& s, const ComplexVector& t);

struct TorusImage {
  std::optional<ComplexVector> torus;
  std::vector<Eigen::Index> boundary_incidence;
};

/// t_j = prod_i z_i^(F_ji). Coordinates with |z_i| <= zero_tol * max|z| are
/// treated as zero; any zero coordinate places the point on the boundary.
TorusImage pi_map(const CoxRing& ring, const ComplexVector& z, double zero_tol = 0.0);

}  // namespace coxroots
