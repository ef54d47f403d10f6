#include "coxroots/verify.hpp"

#include "coxroots/solver.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace coxroots {

namespace {

using Index = Eigen::Index;

constexpr double kResidualFloor = 1e-20;

double gap_at(const Eigen::VectorXd& sv, Index rank) {
  const double inf = std::numeric_limits<double>::infinity();
  if (rank == 0 || rank >= sv.size()) return inf;
  return sv(rank) == 0.0 ? inf : sv(rank - 1) / sv(rank);
}

}  // namespace

ResidualReport residual(std::span<const CoxPolynomial> f, const ComplexVector& z) {
  // Terms are formed as exp(log|c z^e| - shift) with the largest term at 1;
  // the ratio is unchanged and high-degree monomials cannot underflow.
  const Index k = z.size();
  Eigen::VectorXd logabs(k), phase(k);
  for (Index i = 0; i < k; ++i) {
    logabs(i) = std::log(std::abs(z(i)));
    phase(i) = std::arg(z(i));
  }
  const double neg_inf = -std::numeric_limits<double>::infinity();

  ResidualReport out;
  out.per_equation = Eigen::VectorXd::Zero(static_cast<Index>(f.size()));
  double log_sum = 0.0;
  std::vector<double> mag;
  std::vector<double> ang;
  for (std::size_t j = 0; j < f.size(); ++j) {
    mag.assign(f[j].size(), neg_inf);
    ang.assign(f[j].size(), 0.0);
    double shift = neg_inf;
    for (std::size_t t = 0; t < f[j].size(); ++t) {
      const Complex c = f[j].coefficients[t];
      if (c == Complex(0.0)) continue;
      double lm = std::log(std::abs(c));
      double a = std::arg(c);
      bool vanishes = false;
      for (Index i = 0; i < k; ++i) {
        const auto e = f[j].exponents[t](i);
        if (e == 0) continue;
        if (logabs(i) == neg_inf) {
          vanishes = true;
          break;
        }
        lm += static_cast<double>(e) * logabs(i);
        a += static_cast<double>(e) * phase(i);
      }
      if (vanishes) continue;
      mag[t] = lm;
      ang[t] = a;
      shift = std::max(shift, lm);
    }
    double r = 0.0;
    if (shift == std::numeric_limits<double>::infinity() || std::isnan(shift)) {
      r = std::numeric_limits<double>::infinity();
    } else if (shift > neg_inf) {
      Complex value(0.0);
      double scale = 0.0;
      const double unshift = std::exp(-shift);
      for (std::size_t t = 0; t < f[j].size(); ++t) {
        if (mag[t] == neg_inf) continue;
        const double w = std::exp(mag[t] - shift);
        // Direct products are more accurate in the phase; use them while
        // they stay within floating point range.
        if (std::abs(mag[t]) < 600.0 && std::abs(shift) < 600.0) {
          value += f[j].coefficients[t] * monomial(z, f[j].exponents[t]) * unshift;
        } else {
          value += std::polar(w, ang[t]);
        }
        scale += w;
      }
      r = std::abs(value) / scale;
    }
    out.per_equation(static_cast<Index>(j)) = r;
    out.max = std::max(out.max, r);
    log_sum += std::log10(std::max(r, kResidualFloor));
  }
  out.mean_digits = f.empty() ? 0.0 : -log_sum / static_cast<double>(f.size());
  return out;
}

DigitsSummary summarize_residuals(std::span<const double> residuals) {
  DigitsSummary out;
  if (residuals.empty()) return out;
  double log_sum = 0.0;
  double worst = 0.0;
  for (double r : residuals) {
    log_sum += std::log10(std::max(r, kResidualFloor));
    worst = std::max(worst, r);
  }
  out.mean_digits = -log_sum / static_cast<double>(residuals.size());
  out.max_digits = -std::log10(std::max(worst, kResidualFloor));
  out.d_mean = static_cast<int>(std::ceil(out.mean_digits));
  out.d_max = static_cast<int>(std::ceil(out.max_digits));
  return out;
}

CorankReport hilbert_corank(const CoxRing& ring, std::span<const CoxPolynomial> f, const LatticeVector& target,
                            double rank_tol) {
  const ResultantMatrix R = resultant_map(ring, f, target);
  CorankReport out;
  out.rows = R.matrix.rows();
  out.cols = R.matrix.cols();
  out.singular_values = Eigen::VectorXd::Zero(out.rows);
  if (out.rows > 0 && out.cols > 0) {
    Eigen::BDCSVD<ComplexMatrix> svd(R.matrix);
    out.singular_values.head(svd.singularValues().size()) = svd.singularValues();
  }
  const Index rank = numerical_rank(out.singular_values, rank_tol);
  out.corank = out.rows - rank;
  out.gap_ratio = gap_at(out.singular_values, rank);
  return out;
}

LagrangeReport lagrange_rank(const CoxRing& ring, std::span<const ComplexVector> solutions, const LatticeVector& alpha,
                             double rank_tol) {
  const std::vector<LatticeVector> basis = graded_basis(ring, alpha);
  LagrangeReport out;
  out.L = ComplexMatrix::Zero(static_cast<Index>(basis.size()), static_cast<Index>(solutions.size()));
  for (std::size_t j = 0; j < solutions.size(); ++j)
    for (std::size_t i = 0; i < basis.size(); ++i)
      out.L(static_cast<Index>(i), static_cast<Index>(j)) = monomial(solutions[j], basis[i]);
  if (out.L.size() == 0) return out;
  ComplexMatrix normalized = out.L;
  for (Index j = 0; j < normalized.cols(); ++j) {
    const double c = normalized.col(j).norm();
    if (c > 0.0) normalized.col(j) /= c;
  }
  Eigen::BDCSVD<ComplexMatrix> svd(normalized);
  const Eigen::VectorXd sv = svd.singularValues();
  out.rank = numerical_rank(sv, rank_tol);
  out.gap_ratio = gap_at(sv, out.rank);
  return out;
}

Eigen::VectorXd moment_map(const CoxRing& ring, const LatticePolytope& P, const ComplexVector& z) {
  if (P.dim != ring.n()) throw std::invalid_argument("moment_map: dimension mismatch");
  const LatticeVector a = divisor_offsets(P, ring.rays());
  const LatticeMatrix Ft = ring.rays().transpose();
  const std::vector<LatticeVector> points = lattice_points(P);

  // Weights in the log domain; zero coordinates give -inf.
  Eigen::VectorXd logabs(z.size());
  for (Index i = 0; i < z.size(); ++i) logabs(i) = std::log(std::abs(z(i)));
  const double neg_inf = -std::numeric_limits<double>::infinity();
  std::vector<double> logw(points.size(), 0.0);
  double top = neg_inf;
  for (std::size_t p = 0; p < points.size(); ++p) {
    const LatticeVector e = Ft * points[p] + a;
    double s = 0.0;
    for (Index i = 0; i < e.size(); ++i) {
      if (e(i) == 0) continue;
      s += static_cast<double>(e(i)) * logabs(i);
    }
    logw[p] = std::isnan(s) ? neg_inf : s;
    top = std::max(top, logw[p]);
  }
  if (top == neg_inf) throw std::invalid_argument("moment_map: every monomial vanishes at z");

  Eigen::VectorXd mu = Eigen::VectorXd::Zero(P.dim);
  double total = 0.0;
  for (std::size_t p = 0; p < points.size(); ++p) {
    const double w = std::exp(logw[p] - top);
    mu += w * points[p].cast<double>();
    total += w;
  }
  return mu / total;
}

double facet_slack(const LatticePolytope& P, const Eigen::VectorXd& x, Eigen::Index facet) {
  return P.normals.col(facet).cast<double>().dot(x) + static_cast<double>(P.offsets(facet));
}

}  // namespace coxroots
