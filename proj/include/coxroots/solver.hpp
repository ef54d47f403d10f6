// Eigenvalue solver for square Laurent systems: resultant map, cokernel,
// basis selection, multiplication matrices, joint eigenvalues and recovery
// of Cox coordinates.
#pragma once

#include "coxroots/cox.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace coxroots {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The resultant matrix does not have the expected corank.
class RegularityError : public SolverError {
 public:
  RegularityError(const std::string& what, Eigen::Index expected, Eigen::Index observed, double gap)
      : SolverError(what), expected_corank(expected), observed_corank(observed), gap_ratio(gap) {}

  Eigen::Index expected_corank;
  Eigen::Index observed_corank;
  double gap_ratio;
};

/// N_h0 is rank deficient for every h0 tried.
class BasisSelectionError : public SolverError {
 public:
  using SolverError::SolverError;
};

struct SolveOptions {
  double tol = 1e-6;        // SNF recovery if min|lambda| / |lambda| exceeds this
  double rank_tol = 1e-8;   // relative singular value gap
  std::uint64_t seed = 0;
  int newton_max_iter = 50;
  double newton_tol = 1e-14;
  double zero_tol = 1e-8;   // boundary incidence threshold relative to max|z_i|
  std::optional<LatticePolytope> alpha0_override;
  /// Coefficients of h0 on graded_basis(alpha0); used for the first attempt only.
  std::optional<std::vector<Complex>> h0_override;
  /// Cap on concurrent recovery tasks; 0 reads SOLVER_THREADS, defaulting to
  /// the hardware concurrency.
  int threads = 0;

  void validate() const;
};

struct ResultantMatrix {
  ComplexMatrix matrix;
  LatticeVector target;
  std::vector<LatticeVector> row_basis;
  /// (equation, multiplier monomial) for every column.
  std::vector<std::pair<Eigen::Index, LatticeVector>> columns;
};

/// Column (i, x^c) holds the coefficients of x^c f_i in graded_basis(target).
ResultantMatrix resultant_map(const CoxRing& ring, std::span<const CoxPolynomial> f, const LatticeVector& target);

struct Cokernel {
  ComplexMatrix N;  // delta x rows, orthonormal rows
  Eigen::VectorXd singular_values;  // padded with zeros to the row count
  Eigen::Index observed_corank = 0;
  double gap_ratio = 0.0;  // sigma_{r-1} / sigma_r with r = rows - delta
};

/// Left null space of R from the last delta left singular vectors. Throws
/// RegularityError if sigma_r > rank_tol * sigma_{r-1}.
Cokernel cokernel(const ComplexMatrix& R, Eigen::Index delta, double rank_tol);

/// Numerical rank: singular values above rank_tol * sigma_max.
Eigen::Index numerical_rank(const Eigen::VectorXd& singular_values, double rank_tol);

struct BasisSelection {
  ComplexMatrix N_h0;    // delta x n_alpha
  ComplexMatrix W;       // n_alpha x delta, top right singular vectors of N_h0
  ComplexMatrix N_star;  // N_h0 * W
  double condition = 0.0;
};

/// Matrix of f -> N(g f) on the basis monomials, with g a Cox polynomial.
ComplexMatrix multiplier_map(const ComplexMatrix& N, const std::map<LatticeVector, Eigen::Index, LexLess>& rows,
                             const CoxPolynomial& g, const std::vector<LatticeVector>& basis);

/// Throws BasisSelectionError if sigma_{delta-1} <= rank_tol * sigma_0.
BasisSelection select_basis(const ComplexMatrix& N, const std::map<LatticeVector, Eigen::Index, LexLess>& rows,
                            const CoxPolynomial& h0, const std::vector<LatticeVector>& basis, Eigen::Index delta,
                            double rank_tol);

/// M_i = N_star^{-1} N_i W for every monomial x^(b_i) of S_alpha0.
std::vector<ComplexMatrix> multiplication_matrices(const ComplexMatrix& N,
                                                   const std::map<LatticeVector, Eigen::Index, LexLess>& rows,
                                                   const BasisSelection& sel, const std::vector<LatticeVector>& basis,
                                                   const std::vector<LatticeVector>& alpha0_basis);

struct EigenData {
  std::vector<ComplexMatrix> mult_matrices;
  ComplexMatrix lambda;  // n_alpha0 x delta
  ComplexMatrix schur_vectors;
  int redraws = 0;
  bool clustered = false;
};

/// Joint eigenvalues by triangularizing a random real combination of the
/// matrices. lambda(i, j) = (Q^* M_i Q)(j, j).
EigenData simultaneous_eigenvalues(std::vector<ComplexMatrix> mats, std::uint64_t seed);

enum class RecoveryPath { snf, newton };

struct Recovery {
  ComplexVector z;
  bool recovered = false;
  RecoveryPath path = RecoveryPath::snf;
  double error = 0.0;  // max_i |z^(b_i) - lambda_i| / (1 + |lambda_i|)
  int restarts = 0;
};

/// Precomputed Smith form of the exponent matrix A (k x n_alpha0, columns b_i).
struct ExponentSnf {
  LatticeMatrix A;
  ComplexMatrix U;  // k x k
  ComplexMatrix V_r;  // n_alpha0 x r
  Eigen::VectorXd inv_factors;  // 1 / m_j, length r
  Eigen::MatrixXd kernel;  // log|g| directions of G that fix every z^(b_i)
};

ExponentSnf exponent_snf(const LatticeMatrix& A);

/// Solves z^(b_i) = lambda_i: through the logarithm and the Smith form when
/// min|lambda| / |lambda| > opts.tol and the result passes the check
/// |z^(b_i) - lambda_i| <= 1e-10 (1 + |lambda_i|); otherwise by damped
/// Gauss-Newton from the clamped Smith estimate and up to five random unit
/// starts. The result is rebalanced by positive real elements of G that fix
/// every z^(b_i), bringing coordinates not forced to zero by lambda as close
/// to modulus one as possible.
Recovery recover_coordinates(const ComplexVector& lambda, const ExponentSnf& snf, const SolveOptions& opts,
                             std::uint64_t seed);
Recovery recover_coordinates(const ComplexVector& lambda, const LatticeMatrix& A, const SolveOptions& opts,
                             std::uint64_t seed);

struct Solution {
  ComplexVector cox;
  std::optional<ComplexVector> torus;
  std::vector<Eigen::Index> boundary_incidence;
  double residual = 0.0;
  bool recovered = true;
  RecoveryPath path = RecoveryPath::snf;
};

struct StageTimings {
  double setup = 0.0;  // polytopes, Cox ring, mixed volume
  double resultant = 0.0;
  double cokernel = 0.0;
  double basis = 0.0;
  double multiplication = 0.0;
  double eigen = 0.0;
  double recovery = 0.0;
  double total = 0.0;
};

struct SolveDiagnostics {
  Eigen::Index delta = 0;
  Eigen::Index k = 0;
  Eigen::Index n_alpha0 = 0;
  Eigen::Index n_alpha = 0;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  Eigen::Index observed_corank = 0;
  double gap_ratio = 0.0;
  double condition_number = 0.0;
  bool enlarged = false;
  int h0_retries = 0;
  int eigen_redraws = 0;
  bool clustered = false;
  StageTimings timings;
};

struct SolveResult {
  std::vector<Solution> solutions;
  SolveDiagnostics diagnostics;
  LatticePolytope polytope;
  CoxRing ring;
  std::vector<CoxPolynomial> equations;
  std::vector<LatticeVector> offsets;  // a_j per equation
  LatticeVector alpha;                 // degree used for the quotient basis
  LatticeVector alpha0;
  std::vector<LatticeVector> alpha0_basis;
  CoxPolynomial h0;
  EigenData eigen;

  bool all_recovered() const;
};

/// Computes all delta = MV(P_1..P_n) solutions in Cox coordinates.
SolveResult solve(const LaurentSystem& system, const SolveOptions& opts = {});

/// Number of concurrent recovery tasks for the given option value.
int resolve_threads(int requested);

}  // namespace coxroots
