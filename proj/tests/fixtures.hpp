// Shared systems and helpers for the unit and acceptance tests.
#pragma once

#include "coxroots/experiments.hpp"
#include "coxroots/solver.hpp"

#include "oracles.hpp"

#include <initializer_list>
#include <map>
#include <random>
#include <vector>

namespace fixture {

using namespace coxroots;

inline LatticeVector vec(std::initializer_list<std::int64_t> v) {
  LatticeVector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (auto x : v) out(i++) = x;
  return out;
}

inline ComplexVector cvec(std::initializer_list<Complex> v) {
  ComplexVector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (auto x : v) out(i++) = x;
  return out;
}

inline Support support(const std::vector<LatticeVector>& exps, const std::vector<Complex>& coeffs) {
  Support s;
  for (std::size_t i = 0; i < exps.size(); ++i) s.terms.push_back({exps[i], coeffs[i]});
  return s;
}

inline Support ones(const std::vector<LatticeVector>& exps) {
  return support(exps, std::vector<Complex>(exps.size(), Complex(1.0)));
}

inline Support random_coefficients(const std::vector<LatticeVector>& exps, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<Complex> c;
  for (std::size_t i = 0; i < exps.size(); ++i) c.emplace_back(normal(rng), 0.0);
  return support(exps, c);
}

/// Hirzebruch surface example: f1 = 1 + t1 + t2 + t1 t2 + t1^2 t2 + t1^3 t2,
/// f2 = 1 + t2 + t1 t2 + t1^2 t2.
inline std::vector<LatticeVector> h2_support1() {
  return {vec({0, 0}), vec({1, 0}), vec({0, 1}), vec({1, 1}), vec({2, 1}), vec({3, 1})};
}
inline std::vector<LatticeVector> h2_support2() { return {vec({0, 0}), vec({0, 1}), vec({1, 1}), vec({2, 1})}; }

inline LaurentSystem hirzebruch() {
  LaurentSystem sys;
  sys.n = 2;
  sys.polynomials = {ones(h2_support1()), ones(h2_support2())};
  return sys;
}

inline LatticeMatrix h2_rays() {
  LatticeMatrix F(2, 4);
  F << 1, 0, -1, 0, 0, 1, 2, -1;
  return F;
}

inline LatticeVector h2_a1() { return vec({0, 0, 1, 1}); }
inline LatticeVector h2_a2() { return vec({0, 0, 0, 1}); }

// Orbit representatives of the three solutions.
inline ComplexVector h2_z1() { return cvec({-1.0, -1.0, 1.0, 1.0}); }
inline ComplexVector h2_z2() { return cvec({0.0, -1.0, 1.0, 1.0}); }
inline ComplexVector h2_z3() { return cvec({1.0, -1.0, 0.0, 1.0}); }

/// Element (l, m, l, l^2 m) of the group acting on the H2 Cox coordinates.
inline ComplexVector h2_group_act(const ComplexVector& z, Complex l, Complex m) {
  ComplexVector g = cvec({l, m, l, l * l * m});
  return z.cwiseProduct(g);
}

inline std::vector<LatticeVector> simplex_points(Eigen::Index n, std::int64_t d) {
  std::vector<LatticeVector> out;
  LatticeVector x = LatticeVector::Zero(n);
  while (true) {
    if (x.sum() <= d) out.push_back(x);
    Eigen::Index i = 0;
    while (i < n && x(i) == d) x(i++) = 0;
    if (i == n) break;
    ++x(i);
  }
  return out;
}

inline std::vector<LatticeVector> box_points(Eigen::Index n, std::int64_t d) {
  std::vector<LatticeVector> out;
  for (const auto& p : simplex_points(n, n * d))
    if (p.maxCoeff() <= d) out.push_back(p);
  return out;
}

inline oracle::Point to_point(const LatticeVector& v) { return {v.data(), v.data() + v.size()}; }

inline std::vector<oracle::Point> to_points(const std::vector<LatticeVector>& vs) {
  std::vector<oracle::Point> out;
  for (const auto& v : vs) out.push_back(to_point(v));
  return out;
}

/// max_i |z^(b_i) - lambda_i h0(z)| relative to max_i |lambda_i h0(z)|.
inline double soundness_error(const ComplexVector& z, const ComplexVector& lambda, const std::vector<LatticeVector>& b,
                              const CoxPolynomial& h0) {
  const Complex h = evaluate(h0, z);
  double err = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const Complex rhs = lambda(static_cast<Eigen::Index>(i)) * h;
    err = std::max(err, std::abs(monomial(z, b[i]) - rhs));
    scale = std::max(scale, std::abs(rhs));
  }
  return scale > 0.0 ? err / scale : err;
}

/// Largest relative violation of lambda_i lambda_j = lambda_k lambda_l over
/// exponent relations b_i + b_j = b_k + b_l.
inline double binomial_error(const ComplexMatrix& lambda, const std::vector<LatticeVector>& b) {
  std::map<LatticeVector, std::vector<std::pair<std::size_t, std::size_t>>, LexLess> sums;
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = i; j < b.size(); ++j) sums[LatticeVector(b[i] + b[j])].emplace_back(i, j);
  double worst = 0.0;
  for (Eigen::Index c = 0; c < lambda.cols(); ++c) {
    const double scale = lambda.col(c).cwiseAbs().maxCoeff();
    if (scale == 0.0) continue;
    for (const auto& [sum, pairs] : sums) {
      if (pairs.size() < 2) continue;
      const auto [i0, j0] = pairs.front();
      const Complex ref = lambda(static_cast<Eigen::Index>(i0), c) * lambda(static_cast<Eigen::Index>(j0), c);
      for (const auto& [i, j] : pairs) {
        const Complex v = lambda(static_cast<Eigen::Index>(i), c) * lambda(static_cast<Eigen::Index>(j), c);
        worst = std::max(worst, std::abs(v - ref) / (scale * scale));
      }
    }
  }
  return worst;
}

inline double max_commutator(const std::vector<ComplexMatrix>& M) {
  double worst = 0.0;
  for (std::size_t i = 0; i < M.size(); ++i)
    for (std::size_t j = i + 1; j < M.size(); ++j) {
      const double denom = M[i].norm() * M[j].norm();
      if (denom == 0.0) continue;
      worst = std::max(worst, (M[i] * M[j] - M[j] * M[i]).norm() / denom);
    }
  return worst;
}

}  // namespace fixture
