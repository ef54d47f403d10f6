#include "coxroots/experiments.hpp"

#include "coxroots/verify.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <random>
#include <sstream>

namespace coxroots {

namespace {

using Index = Eigen::Index;

std::vector<LatticeVector> draw_points(const GeneratorSpec& spec, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> coord(0, spec.d_max);
  std::vector<LatticeVector> pts;
  for (int p = 0; p < spec.nz; ++p) {
    LatticeVector v(spec.n);
    for (Index i = 0; i < spec.n; ++i) v(i) = coord(rng);
    pts.push_back(std::move(v));
  }
  const LatticeVector first = pts.front();
  for (auto& v : pts) v -= first;
  return pts;
}

Support with_coefficients(const std::vector<LatticeVector>& pts, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Support s;
  std::map<LatticeVector, std::size_t, LexLess> where;
  for (const auto& m : pts) {
    const double c = normal(rng);
    auto [it, fresh] = where.emplace(m, s.terms.size());
    if (fresh) {
      s.terms.push_back({m, Complex(c, 0.0)});
    } else {
      s.terms[it->second].coefficient += c;
    }
  }
  return s;
}

}  // namespace

void GeneratorSpec::validate() const {
  if (n < 1 || nz < 1 || d_max < 1) throw std::invalid_argument("generator: n, NZ and d_max must be positive");
}

LaurentSystem generate_system(const GeneratorSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  LaurentSystem sys;
  sys.n = spec.n;
  std::vector<LatticeVector> shared;
  if (spec.mode == SupportMode::unmixed) shared = draw_points(spec, rng);
  for (Index j = 0; j < spec.n; ++j) {
    const std::vector<LatticeVector> pts = spec.mode == SupportMode::unmixed ? shared : draw_points(spec, rng);
    sys.polynomials.push_back(with_coefficients(pts, rng));
  }
  return sys;
}

LaurentSystem blend_facet(const LaurentSystem& base, Index facet, double e) {
  if (base.polynomials.size() < 2) throw std::invalid_argument("blend_facet: need at least two equations");
  const LatticePolytope P = newton_polytope(base.polynomials[0]);
  if (!P.full_dimensional()) throw std::invalid_argument("blend_facet: Newton polytope of equation 0 is not full-dimensional");
  if (facet < 0 || facet >= P.num_facets()) {
    throw std::invalid_argument("blend_facet: facet index " + std::to_string(facet) + " out of range (polytope has " +
                                std::to_string(P.num_facets()) + " facets)");
  }
  auto on_facet = [&](const LatticeVector& m) { return P.normals.col(facet).dot(m) + P.offsets(facet) == 0; };

  const double w = std::pow(10.0, -e);
  std::map<LatticeVector, Complex, LexLess> first;
  for (const auto& t : base.polynomials[0].terms)
    if (on_facet(t.exponent)) first[t.exponent] = t.coefficient;

  LaurentSystem out = base;
  Support& target = out.polynomials[1];
  std::map<LatticeVector, bool, LexLess> seen;
  for (auto& t : target.terms) {
    if (!on_facet(t.exponent)) continue;
    seen[t.exponent] = true;
    const auto it = first.find(t.exponent);
    const Complex c0 = it == first.end() ? Complex(0.0) : it->second;
    t.coefficient = w * t.coefficient + (1.0 - w) * c0;
  }
  for (const auto& [m, c0] : first)
    if (!seen.count(m)) target.terms.push_back({m, (1.0 - w) * c0});
  return out;
}

std::vector<FamilyRow> degenerate_family(const LaurentSystem& base, Index facet, const std::vector<double>& es,
                                         const SolveOptions& opts) {
  blend_facet(base, facet, 0.0);  // validates the facet index up front
  std::vector<FamilyRow> rows;
  for (double e : es) {
    FamilyRow row;
    row.e = e;
    try {
      const SolveResult res = solve(blend_facet(base, facet, e), opts);
      row.solutions = res.solutions.size();
      row.r_min = std::numeric_limits<double>::infinity();
      row.min_relative_coordinate = std::numeric_limits<double>::infinity();
      for (const auto& s : res.solutions) {
        if (s.recovered) ++row.recovered;
        row.r_min = std::min(row.r_min, s.residual);
        row.r_max = std::max(row.r_max, s.residual);
        const Eigen::VectorXd mags = s.cox.cwiseAbs();
        const double ratio = mags.maxCoeff() > 0.0 ? mags.minCoeff() / mags.maxCoeff() : 0.0;
        row.min_relative_coordinate = std::min(row.min_relative_coordinate, ratio);
        if (ratio <= opts.zero_tol) ++row.near_boundary;
      }
    } catch (const std::exception& ex) {
      row.error = ex.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string family_csv(const std::vector<FamilyRow>& rows) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "e,solutions,recovered,r_min,r_max,min_relative_coordinate,near_boundary,error\n";
  for (const auto& r : rows) {
    os << r.e << ',' << r.solutions << ',' << r.recovered << ',' << r.r_min << ',' << r.r_max << ','
       << r.min_relative_coordinate << ',' << r.near_boundary << ',' << r.error << "\n";
  }
  return os.str();
}

std::vector<PlotRow> plot_rows(const SolveResult& result) {
  std::vector<PlotRow> rows;
  for (const auto& s : result.solutions) {
    PlotRow row;
    row.mu = moment_map(result.ring, result.polytope, s.cox);
    row.boundary_incidence = s.boundary_incidence;
    row.residual = s.residual;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string plot_csv(const std::vector<PlotRow>& rows, Index n) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "index";
  for (Index i = 0; i < n; ++i) os << ",mu_" << i;
  os << ",residual,boundary_incidence\n";
  for (std::size_t j = 0; j < rows.size(); ++j) {
    os << j;
    for (Index i = 0; i < n; ++i) os << ',' << rows[j].mu(i);
    os << ',' << rows[j].residual << ',';
    for (std::size_t b = 0; b < rows[j].boundary_incidence.size(); ++b) os << (b ? ";" : "") << rows[j].boundary_incidence[b];
    os << "\n";
  }
  return os.str();
}

std::string polytope_csv(const LatticePolytope& P) {
  std::ostringstream os;
  os << "kind";
  for (Index i = 0; i < P.dim; ++i) os << ",x_" << i;
  os << "\n";
  auto emit = [&](const char* kind, const LatticeVector& v) {
    os << kind;
    for (Index i = 0; i < v.size(); ++i) os << ',' << v(i);
    os << "\n";
  };
  for (const auto& v : P.vertices) emit("vertex", v);
  for (const auto& m : lattice_points(P)) emit("lattice_point", m);
  return os.str();
}

}  // namespace coxroots
