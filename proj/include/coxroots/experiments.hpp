// Random system generator, the blended-facet degeneration family and
// moment-map plot data.
#pragma once

#include "coxroots/solver.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace coxroots {

enum class SupportMode { mixed, unmixed };

struct GeneratorSpec {
  Eigen::Index n = 2;
  int nz = 20;
  int d_max = 10;
  SupportMode mode = SupportMode::mixed;
  std::uint64_t seed = 0;

  void validate() const;
};

/// NZ points per support drawn uniformly from {0..d_max}^n, shifted by the
/// first point; coefficients of coincident points are summed. Coefficients
/// are real standard normal. Unmixed mode draws one support for all equations.
LaurentSystem generate_system(const GeneratorSpec& spec);

/// Equation 1 with its coefficients on facet `facet` of the Newton polytope of
/// equation 0 replaced by 10^-e c_1 + (1 - 10^-e) c_0. Exponents of either
/// equation lying on that facet take part in the blend.
LaurentSystem blend_facet(const LaurentSystem& base, Eigen::Index facet, double e);

struct FamilyRow {
  double e = 0.0;
  std::size_t solutions = 0;
  std::size_t recovered = 0;
  double r_min = 0.0;
  double r_max = 0.0;
  double min_relative_coordinate = 0.0;  // min over solutions of min_i |z_i| / max_i |z_i|
  std::size_t near_boundary = 0;         // solutions with that ratio <= zero_tol
  std::string error;                     // solver failure message, empty on success
};

std::vector<FamilyRow> degenerate_family(const LaurentSystem& base, Eigen::Index facet, const std::vector<double>& es,
                                         const SolveOptions& opts);

std::string family_csv(const std::vector<FamilyRow>& rows);

struct PlotRow {
  Eigen::VectorXd mu;
  std::vector<Eigen::Index> boundary_incidence;
  double residual = 0.0;
};

std::vector<PlotRow> plot_rows(const SolveResult& result);

/// Header "index,mu_0,..,mu_{n-1},residual,boundary_incidence", one row per solution.
std::string plot_csv(const std::vector<PlotRow>& rows, Eigen::Index n);

/// "kind,x_0,..,x_{n-1}" rows with kind vertex or lattice_point.
std::string polytope_csv(const LatticePolytope& P);

}  // namespace coxroots
