#include "coxroots/solver.hpp"

#include "coxroots/verify.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <random>
#include <thread>

namespace coxroots {

namespace {

using Index = Eigen::Index;
using Clock = std::chrono::steady_clock;

constexpr double kGate = 1e-10;
constexpr int kRestarts = 5;
constexpr int kRedraws = 3;
constexpr int kH0Retries = 3;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// splitmix64 finalizer, used to derive independent per-task seeds.
std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double gate_error(const ComplexVector& z, const ComplexVector& lambda, const LatticeMatrix& A) {
  double worst = 0.0;
  for (Index i = 0; i < A.cols(); ++i) {
    const double e = std::abs(monomial(z, A.col(i)) - lambda(i)) / (1.0 + std::abs(lambda(i)));
    if (!(e <= worst)) worst = e;  // propagates NaN
  }
  return worst;
}

// log z = [w, 0] U with w = log(lambda) V_r diag(1/m).
ComplexVector snf_estimate(const ComplexVector& lambda, const ExponentSnf& snf, double floor) {
  ComplexVector logl(lambda.size());
  for (Index i = 0; i < lambda.size(); ++i) {
    Complex l = lambda(i);
    if (std::abs(l) < floor) l = (l == Complex(0.0)) ? Complex(floor) : l * (floor / std::abs(l));
    logl(i) = std::log(l);
  }
  const Index k = snf.U.rows();
  const Index r = snf.V_r.cols();
  Eigen::RowVectorXcd y = Eigen::RowVectorXcd::Zero(k);
  if (r > 0) {
    const Eigen::RowVectorXcd w = logl.transpose() * snf.V_r;
    for (Index j = 0; j < r; ++j) y(j) = w(j) * snf.inv_factors(j);
  }
  const Eigen::RowVectorXcd logz = y * snf.U;
  return logz.transpose().array().exp();
}

// Moves z along exp(K c) so that log|z_i| is as close to zero as possible over
// the coordinates that some nonvanishing lambda_b depends on.
ComplexVector balance(ComplexVector z, const ComplexVector& lambda, const ExponentSnf& snf, double zero_tol) {
  const Index k = z.size();
  if (snf.kernel.cols() == 0) return z;
  const double scale = lambda.cwiseAbs().maxCoeff();
  std::vector<Index> live;
  for (Index i = 0; i < k; ++i) {
    double reach = 0.0;
    for (Index b = 0; b < snf.A.cols(); ++b)
      if (snf.A(i, b) > 0) reach = std::max(reach, std::abs(lambda(b)));
    if (reach > zero_tol * scale && std::abs(z(i)) > 0.0 && std::isfinite(std::abs(z(i)))) live.push_back(i);
  }
  if (live.empty()) return z;
  Eigen::MatrixXd K(static_cast<Index>(live.size()), snf.kernel.cols());
  Eigen::VectorXd y(static_cast<Index>(live.size()));
  for (std::size_t r = 0; r < live.size(); ++r) {
    K.row(static_cast<Index>(r)) = snf.kernel.row(live[r]);
    y(static_cast<Index>(r)) = std::log(std::abs(z(live[r])));
  }
  const Eigen::VectorXd c = K.completeOrthogonalDecomposition().solve(-y);
  const Eigen::VectorXd g = (snf.kernel * c).array().exp();
  for (Index i = 0; i < k; ++i) z(i) *= g(i);
  return z;
}

struct NewtonOutcome {
  ComplexVector z;
  double error = std::numeric_limits<double>::infinity();
};

// Damped Gauss-Newton on the weighted system (z^(b_i) - lambda_i) / (1 + |lambda_i|).
NewtonOutcome gauss_newton(ComplexVector z, const ComplexVector& lambda, const LatticeMatrix& A, const SolveOptions& opts) {
  const Index m = A.cols();
  const Index k = A.rows();
  Eigen::VectorXd weight(m);
  for (Index i = 0; i < m; ++i) weight(i) = 1.0 / (1.0 + std::abs(lambda(i)));

  auto residual_vec = [&](const ComplexVector& x) {
    ComplexVector F(m);
    for (Index i = 0; i < m; ++i) F(i) = weight(i) * (monomial(x, A.col(i)) - lambda(i));
    return F;
  };

  ComplexVector F = residual_vec(z);
  double fnorm = F.norm();
  LatticeVector e(k);
  for (int it = 0; it < opts.newton_max_iter; ++it) {
    if (F.cwiseAbs().maxCoeff() <= opts.newton_tol) break;
    ComplexMatrix J = ComplexMatrix::Zero(m, k);
    for (Index i = 0; i < m; ++i) {
      for (Index l = 0; l < k; ++l) {
        if (A(l, i) == 0) continue;
        e = A.col(i);
        e(l) -= 1;
        J(i, l) = weight(i) * static_cast<double>(A(l, i)) * monomial(z, e);
      }
    }
    const ComplexVector step = J.completeOrthogonalDecomposition().solve(-F);
    if (!step.allFinite()) break;
    double t = 1.0;
    bool improved = false;
    for (int ls = 0; ls < 40; ++ls, t *= 0.5) {
      const ComplexVector trial = z + t * step;
      const ComplexVector Ft = residual_vec(trial);
      const double n = Ft.norm();
      if (std::isfinite(n) && n < fnorm) {
        z = trial;
        F = Ft;
        fnorm = n;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  return {z, F.allFinite() ? F.cwiseAbs().maxCoeff() : std::numeric_limits<double>::infinity()};
}

}  // namespace

void SolveOptions::validate() const {
  if (!(tol > 0.0 && tol < 1.0)) throw std::invalid_argument("tol must lie in (0, 1)");
  if (!(rank_tol > 0.0)) throw std::invalid_argument("rank_tol must be positive");
  if (!(newton_tol > 0.0)) throw std::invalid_argument("newton_tol must be positive");
  if (!(zero_tol >= 0.0)) throw std::invalid_argument("zero_tol must be nonnegative");
  if (newton_max_iter < 1) throw std::invalid_argument("newton_max_iter must be positive");
  if (threads < 0) throw std::invalid_argument("threads must be nonnegative");
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SOLVER_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

ResultantMatrix resultant_map(const CoxRing& ring, std::span<const CoxPolynomial> f, const LatticeVector& target) {
  ResultantMatrix R;
  R.target = target;
  R.row_basis = graded_basis(ring, target);
  const auto rows = index_monomials(R.row_basis);

  std::vector<std::vector<LatticeVector>> multipliers;
  Index cols = 0;
  for (const auto& fi : f) {
    multipliers.push_back(graded_basis(ring, target - fi.degree.representative));
    cols += static_cast<Index>(multipliers.back().size());
  }
  R.matrix = ComplexMatrix::Zero(static_cast<Index>(R.row_basis.size()), cols);
  Index col = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    for (const auto& c : multipliers[i]) {
      for (std::size_t t = 0; t < f[i].size(); ++t) {
        const auto it = rows.find(c + f[i].exponents[t]);
        if (it == rows.end()) throw std::logic_error("resultant_map: product monomial outside the row basis");
        R.matrix(it->second, col) += f[i].coefficients[t];
      }
      R.columns.emplace_back(static_cast<Index>(i), c);
      ++col;
    }
  }
  return R;
}

Index numerical_rank(const Eigen::VectorXd& sv, double rank_tol) {
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  Index r = 0;
  while (r < sv.size() && sv(r) > rank_tol * sv(0)) ++r;
  return r;
}

Cokernel cokernel(const ComplexMatrix& R, Index delta, double rank_tol) {
  const Index rows = R.rows();
  if (delta < 1 || delta > rows) throw std::invalid_argument("cokernel: corank must lie in [1, rows]");
  Cokernel out;
  out.singular_values = Eigen::VectorXd::Zero(rows);
  ComplexMatrix U;
  if (R.cols() == 0) {
    U = ComplexMatrix::Identity(rows, rows);
  } else {
    Eigen::BDCSVD<ComplexMatrix> svd(R, Eigen::ComputeFullU);
    const Index s = svd.singularValues().size();
    out.singular_values.head(s) = svd.singularValues();
    U = svd.matrixU();
  }
  const Eigen::VectorXd& sv = out.singular_values;
  out.observed_corank = rows - numerical_rank(sv, rank_tol);
  const Index r = rows - delta;
  const double inf = std::numeric_limits<double>::infinity();
  if (r == 0) {
    out.gap_ratio = inf;
  } else {
    out.gap_ratio = sv(r) == 0.0 ? inf : sv(r - 1) / sv(r);
    if (sv(r - 1) == 0.0 || sv(r) > rank_tol * sv(r - 1)) {
      throw RegularityError("regularity failure: expected corank " + std::to_string(delta) + ", observed " +
                                std::to_string(out.observed_corank) + " (gap ratio " + std::to_string(out.gap_ratio) + ")",
                            delta, out.observed_corank, out.gap_ratio);
    }
  }
  out.N = U.rightCols(delta).adjoint();
  return out;
}

ComplexMatrix multiplier_map(const ComplexMatrix& N, const std::map<LatticeVector, Index, LexLess>& rows,
                             const CoxPolynomial& g, const std::vector<LatticeVector>& basis) {
  ComplexMatrix out = ComplexMatrix::Zero(N.rows(), static_cast<Index>(basis.size()));
  for (std::size_t c = 0; c < basis.size(); ++c) {
    for (std::size_t t = 0; t < g.size(); ++t) {
      const auto it = rows.find(basis[c] + g.exponents[t]);
      if (it == rows.end()) throw std::logic_error("multiplier_map: product monomial outside the row basis");
      out.col(static_cast<Index>(c)) += g.coefficients[t] * N.col(it->second);
    }
  }
  return out;
}

BasisSelection select_basis(const ComplexMatrix& N, const std::map<LatticeVector, Index, LexLess>& rows,
                            const CoxPolynomial& h0, const std::vector<LatticeVector>& basis, Index delta,
                            double rank_tol) {
  if (static_cast<Index>(basis.size()) < delta) {
    throw BasisSelectionError("basis selection: graded piece has " + std::to_string(basis.size()) +
                              " monomials, fewer than " + std::to_string(delta) + " solutions");
  }
  BasisSelection sel;
  sel.N_h0 = multiplier_map(N, rows, h0, basis);
  Eigen::BDCSVD<ComplexMatrix> svd(sel.N_h0, Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (sv(0) == 0.0 || sv(delta - 1) <= rank_tol * sv(0)) {
    throw BasisSelectionError("basis selection: N_h0 has rank below " + std::to_string(delta) +
                              " (h0 not generic or base point failure)");
  }
  sel.W = svd.matrixV().leftCols(delta);
  sel.N_star = sel.N_h0 * sel.W;
  sel.condition = sv(0) / sv(delta - 1);
  return sel;
}

std::vector<ComplexMatrix> multiplication_matrices(const ComplexMatrix& N, const std::map<LatticeVector, Index, LexLess>& rows,
                                                   const BasisSelection& sel, const std::vector<LatticeVector>& basis,
                                                   const std::vector<LatticeVector>& alpha0_basis) {
  const Eigen::PartialPivLU<ComplexMatrix> lu(sel.N_star);
  std::vector<ComplexMatrix> out;
  out.reserve(alpha0_basis.size());
  for (const auto& b : alpha0_basis) {
    CoxPolynomial g;
    g.exponents = {b};
    g.coefficients = {Complex(1.0)};
    out.push_back(lu.solve(multiplier_map(N, rows, g, basis) * sel.W));
  }
  return out;
}

EigenData simultaneous_eigenvalues(std::vector<ComplexMatrix> mats, std::uint64_t seed) {
  if (mats.empty()) throw std::invalid_argument("simultaneous_eigenvalues: no matrices");
  const Index d = mats.front().rows();
  EigenData out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::ComplexSchur<ComplexMatrix> schur;

  for (int attempt = 0; attempt <= kRedraws; ++attempt) {
    ComplexMatrix C = ComplexMatrix::Zero(d, d);
    for (const auto& M : mats) C += normal(rng) * M;
    schur.compute(C);
    const ComplexVector diag = schur.matrixT().diagonal();
    const double scale = std::max(diag.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    double sep = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < d; ++i)
      for (Index j = i + 1; j < d; ++j) sep = std::min(sep, std::abs(diag(i) - diag(j)));
    if (sep >= 1e-12 * scale) break;
    if (attempt == kRedraws) {
      out.clustered = true;
    } else {
      ++out.redraws;
    }
  }

  out.schur_vectors = schur.matrixU();
  const ComplexMatrix& Q = out.schur_vectors;
  out.lambda = ComplexMatrix(static_cast<Index>(mats.size()), d);
  for (std::size_t i = 0; i < mats.size(); ++i)
    out.lambda.row(static_cast<Index>(i)) = (Q.adjoint() * mats[i] * Q).diagonal().transpose();
  out.mult_matrices = std::move(mats);
  return out;
}

ExponentSnf exponent_snf(const LatticeMatrix& A) {
  ExponentSnf out;
  out.A = A;
  const SnfDecomposition snf = smith_normal_form(to_big(A));
  out.U = to_int64(snf.U).cast<double>().cast<Complex>();
  const LatticeMatrix V = to_int64(snf.V);
  out.V_r = V.leftCols(snf.rank).cast<double>().cast<Complex>();
  out.inv_factors = Eigen::VectorXd(snf.rank);
  for (Index j = 0; j < snf.rank; ++j)
    out.inv_factors(j) = 1.0 / static_cast<double>(snf.invariant_factors[static_cast<std::size_t>(j)]);
  if (A.cols() > 1) {
    Eigen::MatrixXd D(A.cols() - 1, A.rows());
    for (Index j = 1; j < A.cols(); ++j) D.row(j - 1) = (A.col(j) - A.col(0)).cast<double>().transpose();
    out.kernel = Eigen::FullPivLU<Eigen::MatrixXd>(D).kernel();
    if (out.kernel.cols() == 1 && out.kernel.norm() == 0.0) out.kernel.resize(A.rows(), 0);
  } else {
    out.kernel = Eigen::MatrixXd::Identity(A.rows(), A.rows());
  }
  // Keep only directions that leave every z^(b_i) unchanged.
  if (out.kernel.cols() > 0 && A.cols() > 0) {
    const Eigen::RowVectorXd character = A.col(0).cast<double>().transpose() * out.kernel;
    if (character.norm() > 0.0) {
      const Eigen::MatrixXd keep = Eigen::FullPivLU<Eigen::MatrixXd>(character).kernel();
      out.kernel = (keep.norm() == 0.0) ? Eigen::MatrixXd(A.rows(), 0) : Eigen::MatrixXd(out.kernel * keep);
    }
  }
  return out;
}

Recovery recover_coordinates(const ComplexVector& lambda, const ExponentSnf& snf, const SolveOptions& opts,
                             std::uint64_t seed) {
  const LatticeMatrix& A = snf.A;
  const Index k = A.rows();
  Recovery out;
  const double norm = lambda.norm();
  if (!(norm > 0.0) || !lambda.allFinite()) {
    out.z = ComplexVector::Ones(k);
    out.error = std::numeric_limits<double>::infinity();
    out.path = RecoveryPath::newton;
    return out;
  }

  if (lambda.cwiseAbs().minCoeff() / norm > opts.tol) {
    out.z = snf_estimate(lambda, snf, 0.0);
    out.error = gate_error(out.z, lambda, A);
    if (out.error <= kGate) {
      out.recovered = true;
      out.path = RecoveryPath::snf;
      out.z = balance(std::move(out.z), lambda, snf, opts.zero_tol);
      return out;
    }
  }

  out.path = RecoveryPath::newton;
  NewtonOutcome best = gauss_newton(balance(snf_estimate(lambda, snf, 1e-8 * norm), lambda, snf, opts.zero_tol), lambda, A, opts);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  while (best.error > opts.newton_tol && out.restarts < kRestarts) {
    ++out.restarts;
    ComplexVector start(k);
    for (Index l = 0; l < k; ++l) start(l) = std::polar(1.0, angle(rng));
    NewtonOutcome trial = gauss_newton(start, lambda, A, opts);
    if (trial.error < best.error) best = std::move(trial);
  }
  out.z = balance(std::move(best.z), lambda, snf, opts.zero_tol);
  out.error = best.error;
  out.recovered = best.error <= kGate;
  return out;
}

Recovery recover_coordinates(const ComplexVector& lambda, const LatticeMatrix& A, const SolveOptions& opts,
                             std::uint64_t seed) {
  return recover_coordinates(lambda, exponent_snf(A), opts, seed);
}

bool SolveResult::all_recovered() const {
  return std::all_of(solutions.begin(), solutions.end(), [](const Solution& s) { return s.recovered; });
}

SolveResult solve(const LaurentSystem& system, const SolveOptions& opts) {
  const auto t_start = Clock::now();
  system.validate();
  opts.validate();

  SolveResult res;
  SolveDiagnostics& diag = res.diagnostics;
  const Index n = system.n;

  // Polytopes, Cox ring, degrees.
  auto t0 = Clock::now();
  std::vector<LatticePolytope> newton;
  for (const auto& s : system.polynomials) newton.push_back(newton_polytope(s));
  res.polytope = newton.front();
  for (std::size_t j = 1; j < newton.size(); ++j) res.polytope = minkowski_sum(res.polytope, newton[j]);
  if (!res.polytope.full_dimensional()) {
    throw SolverError("Minkowski sum of the Newton polytopes has dimension " + std::to_string(res.polytope.affine_dim) +
                      " < " + std::to_string(n));
  }
  res.ring = build_cox_ring(res.polytope);
  const CoxRing& ring = res.ring;
  diag.k = ring.k();

  LatticeVector alpha = LatticeVector::Zero(ring.k());
  for (std::size_t j = 0; j < newton.size(); ++j) {
    res.offsets.push_back(divisor_offsets(newton[j], ring.rays()));
    alpha += res.offsets.back();
    res.equations.push_back(homogenize(ring, system.polynomials[j], res.offsets.back()));
  }

  LatticePolytope P0;
  if (opts.alpha0_override) {
    validate_alpha0(*opts.alpha0_override, n);
    P0 = *opts.alpha0_override;
  } else {
    P0 = generate_alpha0(res.polytope);
  }
  res.alpha0 = divisor_offsets(P0, ring.rays());
  res.alpha0_basis = graded_basis(ring, res.alpha0);
  diag.n_alpha0 = static_cast<Index>(res.alpha0_basis.size());

  diag.delta = mixed_volume(newton);
  if (diag.delta == 0) throw SolverError("mixed volume is zero: the system has no isolated torus solutions");
  const Index delta = diag.delta;
  diag.timings.setup = seconds_since(t0);

  // Resultant matrix and cokernel, enlarging alpha by alpha0 once on failure.
  Cokernel coker;
  ResultantMatrix R;
  for (int pass = 0;; ++pass) {
    t0 = Clock::now();
    R = resultant_map(ring, res.equations, alpha + res.alpha0);
    diag.timings.resultant += seconds_since(t0);
    diag.rows = R.matrix.rows();
    diag.cols = R.matrix.cols();
    t0 = Clock::now();
    try {
      if (delta > R.matrix.rows()) {
        throw RegularityError("regularity failure: expected corank " + std::to_string(delta) + " exceeds " +
                                  std::to_string(R.matrix.rows()) + " rows",
                              delta, R.matrix.rows(), 0.0);
      }
      coker = cokernel(R.matrix, delta, opts.rank_tol);
      diag.timings.cokernel += seconds_since(t0);
      break;
    } catch (const RegularityError&) {
      diag.timings.cokernel += seconds_since(t0);
      if (pass == 1) throw;
      alpha += res.alpha0;
      diag.enlarged = true;
    }
  }
  res.alpha = alpha;
  diag.observed_corank = coker.observed_corank;
  diag.gap_ratio = coker.gap_ratio;

  // h0 and basis selection.
  t0 = Clock::now();
  const auto rows = index_monomials(R.row_basis);
  const std::vector<LatticeVector> basis = graded_basis(ring, alpha);
  diag.n_alpha = static_cast<Index>(basis.size());
  std::mt19937_64 rng(mix_seed(opts.seed));
  std::normal_distribution<double> normal;
  BasisSelection sel;
  for (int attempt = 0;; ++attempt) {
    res.h0 = CoxPolynomial{};
    res.h0.degree = ring.degree(res.alpha0);
    for (std::size_t i = 0; i < res.alpha0_basis.size(); ++i) {
      Complex c;
      if (attempt == 0 && opts.h0_override) {
        if (opts.h0_override->size() != res.alpha0_basis.size())
          throw std::invalid_argument("h0 override has the wrong number of coefficients");
        c = (*opts.h0_override)[i];
      } else {
        c = Complex(normal(rng), 0.0);
      }
      if (c == Complex(0.0)) continue;
      res.h0.exponents.push_back(res.alpha0_basis[i]);
      res.h0.coefficients.push_back(c);
    }
    try {
      sel = select_basis(coker.N, rows, res.h0, basis, delta, opts.rank_tol);
      break;
    } catch (const BasisSelectionError&) {
      if (attempt == kH0Retries) throw;
      ++diag.h0_retries;
    }
  }
  diag.condition_number = sel.condition;
  diag.timings.basis = seconds_since(t0);

  t0 = Clock::now();
  std::vector<ComplexMatrix> mats = multiplication_matrices(coker.N, rows, sel, basis, res.alpha0_basis);
  diag.timings.multiplication = seconds_since(t0);

  t0 = Clock::now();
  res.eigen = simultaneous_eigenvalues(std::move(mats), mix_seed(opts.seed + 1));
  diag.eigen_redraws = res.eigen.redraws;
  diag.clustered = res.eigen.clustered;
  diag.timings.eigen = seconds_since(t0);

  // Recovery, one independent task per eigenvalue column.
  t0 = Clock::now();
  LatticeMatrix A(ring.k(), diag.n_alpha0);
  for (Index i = 0; i < diag.n_alpha0; ++i) A.col(i) = res.alpha0_basis[static_cast<std::size_t>(i)];
  const ExponentSnf snf = exponent_snf(A);
  std::vector<Recovery> recovered(static_cast<std::size_t>(delta));
  std::atomic<Index> next{0};
  auto worker = [&] {
    for (Index j = next++; j < delta; j = next++) {
      recovered[static_cast<std::size_t>(j)] =
          recover_coordinates(res.eigen.lambda.col(j), snf, opts, mix_seed(opts.seed + 2 + static_cast<std::uint64_t>(j)));
    }
  };
  const int threads = std::min<int>(resolve_threads(opts.threads), static_cast<int>(delta));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  for (auto& rec : recovered) {
    Solution s;
    s.cox = std::move(rec.z);
    s.recovered = rec.recovered;
    s.path = rec.path;
    TorusImage img = pi_map(ring, s.cox, opts.zero_tol);
    s.torus = std::move(img.torus);
    s.boundary_incidence = std::move(img.boundary_incidence);
    s.residual = residual(res.equations, s.cox).max;
    res.solutions.push_back(std::move(s));
  }
  diag.timings.recovery = seconds_since(t0);
  diag.timings.total = seconds_since(t_start);
  return res;
}

}  // namespace coxroots
