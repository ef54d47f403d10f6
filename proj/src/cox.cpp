#include "coxroots/cox.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

namespace coxroots {

namespace {

using Index = Eigen::Index;

std::string format_vector(const LatticeVector& v) {
  std::ostringstream os;
  os << '(';
  for (Index i = 0; i < v.size(); ++i) os << (i ? "," : "") << v(i);
  os << ')';
  return os.str();
}

Complex int_power(Complex base, std::int64_t e) {
  if (e < 0) return Complex(1.0) / int_power(base, -e);
  Complex result(1.0);
  while (e > 0) {
    if (e & 1) result *= base;
    base *= base;
    e >>= 1;
  }
  return result;
}

}  // namespace

CoxRing::CoxRing(LatticeMatrix rays) : rays_(std::move(rays)) {
  if (rays_.rows() == 0 || rays_.cols() == 0) throw std::invalid_argument("CoxRing: empty ray matrix");
  const SnfDecomposition snf = smith_normal_form(to_big(rays_.transpose()));
  if (snf.rank != rays_.rows()) {
    throw std::invalid_argument("CoxRing: ray matrix has rank " + std::to_string(snf.rank) + " < " +
                                std::to_string(rays_.rows()) + " (fan is not complete)");
  }
  projection_ = to_int64(snf.U);
  for (const auto& m : snf.invariant_factors) {
    factors_.push_back(static_cast<std::int64_t>(m));
    if (m > 1) moduli_.push_back(factors_.back());
  }
}

GradedDegree CoxRing::degree(const LatticeVector& a) const {
  if (a.size() != k()) throw std::invalid_argument("CoxRing::degree: offset length does not match ray count");
  const LatticeVector y = projection_ * a;
  std::vector<std::int64_t> parts;
  for (Index i = 0; i < n(); ++i) {
    const std::int64_t m = factors_[static_cast<std::size_t>(i)];
    if (m > 1) parts.push_back(((y(i) % m) + m) % m);
  }
  for (Index i = n(); i < k(); ++i) parts.push_back(y(i));
  GradedDegree d;
  d.representative = a;
  d.canonical = Eigen::Map<LatticeVector>(parts.data(), static_cast<Index>(parts.size()));
  return d;
}

CoxRing build_cox_ring(const LatticePolytope& P) {
  if (!P.full_dimensional()) throw std::invalid_argument("build_cox_ring: polytope is not full-dimensional");
  return CoxRing(P.normals);
}

void LaurentSystem::validate() const {
  if (polynomials.empty()) throw std::invalid_argument("system has no equations");
  if (static_cast<Index>(polynomials.size()) != n) {
    throw std::invalid_argument("system is not square: " + std::to_string(polynomials.size()) + " equations in dimension " +
                                std::to_string(n));
  }
  for (const auto& s : polynomials) {
    s.validate();
    if (s.dimension() != n) throw std::invalid_argument("equation exponents do not match the system dimension");
  }
}

CoxPolynomial homogenize(const CoxRing& ring, const Support& s, const LatticeVector& a) {
  if (a.size() != ring.k()) throw std::invalid_argument("homogenize: offset length does not match ray count");
  CoxPolynomial p;
  p.degree = ring.degree(a);
  const LatticeMatrix Ft = ring.rays().transpose();
  for (const auto& t : s.terms) {
    if (t.coefficient == Complex(0.0, 0.0)) continue;
    if (t.exponent.size() != ring.n()) throw std::invalid_argument("homogenize: exponent dimension mismatch");
    LatticeVector e = Ft * t.exponent + a;
    for (Index i = 0; i < e.size(); ++i) {
      if (e(i) < 0) {
        throw std::invalid_argument("homogenize: exponent " + format_vector(t.exponent) + " violates facet " +
                                    std::to_string(i) + " (offset too small)");
      }
    }
    p.exponents.push_back(std::move(e));
    p.coefficients.push_back(t.coefficient);
  }
  return p;
}

std::vector<LatticeVector> graded_piece_points(const CoxRing& ring, const LatticeVector& a) {
  if (a.size() != ring.k()) throw std::invalid_argument("graded_piece_points: offset length does not match ray count");
  return lattice_points(ring.rays(), a);
}

std::vector<LatticeVector> graded_basis(const CoxRing& ring, const LatticeVector& a) {
  std::vector<LatticeVector> basis;
  const LatticeMatrix Ft = ring.rays().transpose();
  for (const auto& m : graded_piece_points(ring, a)) basis.push_back(Ft * m + a);
  return basis;
}

std::map<LatticeVector, Eigen::Index, LexLess> index_monomials(const std::vector<LatticeVector>& basis) {
  std::map<LatticeVector, Index, LexLess> index;
  for (std::size_t i = 0; i < basis.size(); ++i) index.emplace(basis[i], static_cast<Index>(i));
  return index;
}

Complex monomial(const ComplexVector& z, const LatticeVector& e) {
  Complex r(1.0);
  for (Index i = 0; i < e.size(); ++i)
    if (e(i) != 0) r *= int_power(z(i), e(i));
  return r;
}

Complex evaluate(const CoxPolynomial& p, const ComplexVector& z) {
  Complex sum(0.0);
  for (std::size_t j = 0; j < p.size(); ++j) sum += p.coefficients[j] * monomial(z, p.exponents[j]);
  return sum;
}

Complex evaluate(const Support& s, const ComplexVector& t) {
  Complex sum(0.0);
  for (const auto& term : s.terms) sum += term.coefficient * monomial(t, term.exponent);
  return sum;
}

TorusImage pi_map(const CoxRing& ring, const ComplexVector& z, double zero_tol) {
  if (z.size() != ring.k()) throw std::invalid_argument("pi_map: coordinate count does not match ray count");
  TorusImage out;
  const double scale = z.size() ? z.cwiseAbs().maxCoeff() : 0.0;
  for (Index i = 0; i < z.size(); ++i)
    if (std::abs(z(i)) <= zero_tol * scale) out.boundary_incidence.push_back(i);
  if (!out.boundary_incidence.empty()) return out;
  ComplexVector t(ring.n());
  for (Index j = 0; j < ring.n(); ++j) t(j) = monomial(z, ring.rays().row(j).transpose());
  out.torus = std::move(t);
  return out;
}

}  // namespace coxroots
