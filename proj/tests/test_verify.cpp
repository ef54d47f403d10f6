#include "coxroots/verify.hpp"

#include "doctest.h"
#include "fixtures.hpp"

#include <random>

using namespace coxroots;
using fixture::cvec;
using fixture::vec;

namespace {

CoxRing h2_ring() { return CoxRing(fixture::h2_rays()); }

std::vector<CoxPolynomial> h2_equations(const CoxRing& ring) {
  return {homogenize(ring, fixture::ones(fixture::h2_support1()), fixture::h2_a1()),
          homogenize(ring, fixture::ones(fixture::h2_support2()), fixture::h2_a2())};
}

LatticePolytope h2_polytope() {
  return minkowski_sum(newton_polytope(fixture::ones(fixture::h2_support1())),
                       newton_polytope(fixture::ones(fixture::h2_support2())));
}

}  // namespace

TEST_CASE("residuals of the Hirzebruch solutions") {
  const SolveResult r = solve(fixture::hirzebruch());
  for (const auto& s : r.solutions) CHECK(residual(r.equations, s.cox).max <= 1e-14);
  const CoxRing ring = h2_ring();
  for (const auto& z : {fixture::h2_z1(), fixture::h2_z2(), fixture::h2_z3()}) CHECK(residual(h2_equations(ring), z).max == 0.0);
}

TEST_CASE("residual of single-term equations") {
  CoxPolynomial p;
  p.exponents = {vec({1, 2})};
  p.coefficients = {Complex(3.0, -1.0)};
  const std::vector<CoxPolynomial> f{p};
  CHECK(residual(f, cvec({0.7, -1.3})).max == doctest::Approx(1.0));
  CHECK(residual(f, cvec({0.0, -1.3})).max == 0.0);

  CoxPolynomial q;
  q.exponents = {vec({1, 0}), vec({0, 1})};
  q.coefficients = {1.0, -1.0};
  const std::vector<CoxPolynomial> g{q};
  CHECK(residual(g, cvec({0.0, 0.0})).max == 0.0);
}

TEST_CASE("residual grows when a solution is perturbed") {
  const SolveResult r = solve(fixture::hirzebruch());
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal;
  for (const auto& s : r.solutions) {
    ComplexVector z = s.cox;
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) += 1e-3 * Complex(normal(rng), normal(rng)) * (1.0 + std::abs(z(i)));
    CHECK(residual(r.equations, z).max > residual(r.equations, s.cox).max);
  }
}

TEST_CASE("residual is invariant under coefficient scaling and the group action") {
  const CoxRing ring = h2_ring();
  const auto f = h2_equations(ring);
  auto scaled = f;
  for (auto& c : scaled[0].coefficients) c *= Complex(-4.0, 2.5);
  for (auto& c : scaled[1].coefficients) c *= 1e-7;
  const ComplexVector z = cvec({Complex(0.3, 0.1), Complex(-1.2, 0.4), Complex(0.9, -0.8), Complex(1.7, 0.2)});
  const ResidualReport a = residual(f, z), b = residual(scaled, z);
  const ResidualReport c = residual(f, fixture::h2_group_act(z, Complex(2.0, -1.0), Complex(0.01, 0.02)));
  for (Eigen::Index j = 0; j < 2; ++j) {
    CHECK(b.per_equation(j) == doctest::Approx(a.per_equation(j)).epsilon(1e-12));
    CHECK(c.per_equation(j) == doctest::Approx(a.per_equation(j)).epsilon(1e-10));
  }
}

TEST_CASE("residual survives extreme coordinate magnitudes") {
  CoxPolynomial p;
  p.exponents = {vec({400}), vec({0})};
  p.coefficients = {1.0, -1.0};
  const std::vector<CoxPolynomial> f{p};
  // 10^(400 * 2) overflows a double; the ratio must not.
  const ResidualReport r = residual(f, cvec({100.0}));
  CHECK(r.max == doctest::Approx(1.0));
  CHECK(std::isfinite(r.mean_digits));
}

TEST_CASE("digit summaries") {
  const std::vector<double> res{1e-16, 5e-15, 1e-25};
  const DigitsSummary d = summarize_residuals(res);
  const double worst = -std::log10(5e-15);
  CHECK(d.mean_digits == doctest::Approx((16.0 + worst + 20.0) / 3.0));
  CHECK(d.d_mean == 17);
  CHECK(d.max_digits == doctest::Approx(worst));
  CHECK(d.d_max == 15);
  const DigitsSummary none = summarize_residuals({});
  CHECK(none.d_mean == 0);
}

TEST_CASE("hilbert function probes") {
  const CoxRing ring = h2_ring();
  const auto f = h2_equations(ring);
  const LatticeVector alpha = fixture::h2_a1() + fixture::h2_a2();
  const CorankReport at_alpha = hilbert_corank(ring, f, alpha);
  CHECK(at_alpha.corank == 3);
  CHECK(at_alpha.rows == 12);
  CHECK(at_alpha.gap_ratio > 1e6);
  CHECK(hilbert_corank(ring, f, alpha + fixture::h2_a2()).corank == 3);
  const CorankReport zero = hilbert_corank(ring, f, LatticeVector::Zero(4));
  CHECK(zero.rows == 1);
  CHECK(zero.cols == 0);
  CHECK(zero.corank == 1);
}

TEST_CASE("lagrange matrix of the orbit representatives") {
  const CoxRing ring = h2_ring();
  const LatticeVector alpha = fixture::h2_a1() + fixture::h2_a2();
  const std::vector<ComplexVector> z{fixture::h2_z1(), fixture::h2_z2(), fixture::h2_z3()};
  const LagrangeReport L = lagrange_rank(ring, z, alpha);
  CHECK(L.rank == 3);
  CHECK(L.gap_ratio > 1e6);

  // Transposed display, columns labelled by these monomials.
  const std::vector<LatticeVector> labels{vec({0, 0, 1, 2}), vec({1, 0, 0, 2}), vec({0, 1, 3, 1}), vec({1, 1, 2, 1}),
                                          vec({2, 1, 1, 1}), vec({3, 1, 0, 1}), vec({0, 2, 5, 0}), vec({1, 2, 4, 0}),
                                          vec({2, 2, 3, 0}), vec({3, 2, 2, 0}), vec({4, 2, 1, 0}), vec({5, 2, 0, 0})};
  const double display[3][12] = {{1, -1, -1, 1, -1, 1, 1, -1, 1, -1, 1, -1},
                                 {1, 0, -1, 0, 0, 0, 1, 0, 0, 0, 0, 0},
                                 {0, 1, 0, 0, 0, -1, 0, 0, 0, 0, 0, 1}};
  const auto rows = index_monomials(graded_basis(ring, alpha));
  for (int j = 0; j < 3; ++j) {
    // Match up to a column scale fixed by the first nonzero entry.
    Complex scale(0.0);
    for (int i = 0; i < 12; ++i) {
      const Complex got = L.L(rows.at(labels[static_cast<std::size_t>(i)]), j);
      if (scale == Complex(0.0) && display[j][i] != 0.0) scale = got / display[j][i];
      CHECK(std::abs(got - scale * display[j][i]) < 1e-14);
    }
  }

  const std::vector<ComplexVector> one{fixture::h2_z1()};
  CHECK(lagrange_rank(ring, one, alpha).rank == 1);
  // Another point of the orbit of z1 adds no rank.
  const std::vector<ComplexVector> dup{fixture::h2_z1(), fixture::h2_z2(), fixture::h2_z3(),
                                       fixture::h2_group_act(fixture::h2_z1(), 2.0, 3.0)};
  CHECK(lagrange_rank(ring, dup, alpha).rank == 3);
}

TEST_CASE("lagrange rank equals delta at the sum of the degrees") {
  const SolveResult r = solve(fixture::hirzebruch());
  std::vector<ComplexVector> z;
  for (const auto& s : r.solutions) z.push_back(s.cox);
  CHECK(lagrange_rank(r.ring, z, r.alpha).rank == 3);
}

TEST_CASE("moment map") {
  const CoxRing ring = h2_ring();
  const LatticePolytope P = h2_polytope();
  const auto pts = lattice_points(P);
  Eigen::VectorXd centroid = Eigen::VectorXd::Zero(2);
  for (const auto& m : pts) centroid += m.cast<double>();
  centroid /= static_cast<double>(pts.size());
  const ComplexVector unit = cvec({Complex(0.0, 1.0), -1.0, Complex(0.6, 0.8), 1.0});
  CHECK((moment_map(ring, P, unit) - centroid).norm() < 1e-14);

  const Eigen::VectorXd mu3 = moment_map(ring, P, fixture::h2_z3());
  CHECK(std::abs(facet_slack(P, mu3, 2)) < 1e-14);
  const Eigen::VectorXd mu2 = moment_map(ring, P, fixture::h2_z2());
  CHECK(std::abs(facet_slack(P, mu2, 0)) < 1e-14);
  const Eigen::VectorXd mu1 = moment_map(ring, P, fixture::h2_z1());
  for (Eigen::Index i = 0; i < P.num_facets(); ++i) CHECK(facet_slack(P, mu1, i) > 1e-3);

  CHECK_THROWS_AS(moment_map(ring, P, ComplexVector::Zero(4)), std::invalid_argument);
}

TEST_CASE("moment map images lie in the polytope") {
  const CoxRing ring = h2_ring();
  const LatticePolytope P = h2_polytope();
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> expo(-30.0, 30.0), ang(-3.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    ComplexVector z(4);
    for (Eigen::Index i = 0; i < 4; ++i) z(i) = std::polar(std::pow(10.0, expo(rng)), ang(rng));
    const Eigen::VectorXd mu = moment_map(ring, P, z);
    for (Eigen::Index i = 0; i < P.num_facets(); ++i) CHECK(facet_slack(P, mu, i) >= -1e-12);
  }
}
