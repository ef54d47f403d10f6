// Residuals, regularity probes and the moment map.
#pragma once

#include "coxroots/cox.hpp"

#include <Eigen/Core>

#include <span>
#include <vector>

namespace coxroots {

struct ResidualReport {
  Eigen::VectorXd per_equation;
  double max = 0.0;
  double mean_digits = 0.0;  // -log10 of the geometric mean of per_equation
};

/// r_j = |f_j(z)| / sum |c z^e|; 0/0 counts as 0 and x/0 as infinity.
ResidualReport residual(std::span<const CoxPolynomial> f, const ComplexVector& z);

/// Digits summary over per-solution residuals. Residuals below 1e-20 are
/// clamped there before taking logarithms.
struct DigitsSummary {
  double mean_digits = 0.0;  // -log10 geometric mean
  double max_digits = 0.0;   // -log10 max
  int d_mean = 0;            // ceil of mean_digits
  int d_max = 0;             // ceil of max_digits
};

DigitsSummary summarize_residuals(std::span<const double> residuals);

struct CorankReport {
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  Eigen::Index corank = 0;
  double gap_ratio = 0.0;  // sigma_{rank-1} / sigma_rank, infinite at the ends
  Eigen::VectorXd singular_values;
};

CorankReport hilbert_corank(const CoxRing& ring, std::span<const CoxPolynomial> f, const LatticeVector& target,
                            double rank_tol = 1e-8);

struct LagrangeReport {
  Eigen::Index rank = 0;
  double gap_ratio = 0.0;
  ComplexMatrix L;  // n_alpha x delta, monomials of graded_basis(alpha) at each solution
};

/// Columns are normalized before the rank decision since Cox coordinates are
/// only defined up to scaling.
LagrangeReport lagrange_rank(const CoxRing& ring, std::span<const ComplexVector> solutions, const LatticeVector& alpha,
                             double rank_tol = 1e-8);

/// mu(z) = sum |z^(F^T m + a)| m / sum |z^(F^T m + a)| over the lattice points
/// of P. Throws std::invalid_argument if every monomial vanishes.
Eigen::VectorXd moment_map(const CoxRing& ring, const LatticePolytope& P, const ComplexVector& z);

/// <u_i, x> + a_i for facet i of P.
double facet_slack(const LatticePolytope& P, const Eigen::VectorXd& x, Eigen::Index facet);

}  // namespace coxroots
