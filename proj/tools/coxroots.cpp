// Command line front end: solve, mixed-volume, generate, degenerate-family,
// plot-data.
#include "coxroots/experiments.hpp"
#include "coxroots/io.hpp"
#include "coxroots/verify.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace coxroots;

enum ExitCode { kOk = 0, kFailure = 1, kPartial = 2, kRegularity = 3, kParse = 4 };

struct SolverFlags {
  std::optional<double> tol;
  std::optional<double> rank_tol;
  std::optional<std::uint64_t> seed;
  std::string alpha0;
  std::string output;
  std::string format = "json";
};

void add_solver_flags(CLI::App* cmd, SolverFlags& f) {
  cmd->add_option("--tol", f.tol, "Switch between Smith-form and Newton recovery");
  cmd->add_option("--rank-tol", f.rank_tol, "Relative singular value gap threshold");
  cmd->add_option("--seed", f.seed, "Seed for h0 and the eigenvalue combination");
  cmd->add_option("--alpha0", f.alpha0, "Polytope file overriding the auxiliary simplex");
  cmd->add_option("--output", f.output, "Write results here instead of stdout");
  cmd->add_option("--format", f.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
}

SolveOptions apply_flags(SolveOptions opts, const SolverFlags& f) {
  if (f.tol) opts.tol = *f.tol;
  if (f.rank_tol) opts.rank_tol = *f.rank_tol;
  if (f.seed) opts.seed = *f.seed;
  if (!f.alpha0.empty()) opts.alpha0_override = parse_polytope(read_file(f.alpha0));
  opts.validate();
  return opts;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
  } else {
    write_file(path, text);
  }
}

int run_solve(const std::string& input, const SolverFlags& flags, double max_residual) {
  const SystemFile file = parse_system(read_file(input));
  const SolveResult result = solve(file.system, apply_flags(file.options, flags));
  emit(flags.output, flags.format == "csv" ? results_csv(result) : results_json(result).dump(2) + "\n");
  if (flags.output.empty()) {
    std::cerr << summary_line(result) << "\n";
  } else {
    std::cout << summary_line(result) << "\n";
  }
  for (const auto& s : result.solutions)
    if (!s.recovered || !(s.residual <= max_residual)) return kPartial;
  return kOk;
}

int run_mixed_volume(const std::string& input) {
  const SystemFile file = parse_system(read_file(input));
  std::vector<LatticePolytope> polytopes;
  for (const auto& s : file.system.polynomials) polytopes.push_back(newton_polytope(s));
  std::cout << mixed_volume(polytopes) << "\n";
  return kOk;
}

int run_generate(const GeneratorSpec& spec, const std::string& output) {
  SystemFile file;
  file.system = generate_system(spec);
  emit(output, write_system(file));
  return kOk;
}

int run_family(const std::string& input, Eigen::Index facet, const std::vector<double>& es, const SolverFlags& flags) {
  const SystemFile file = parse_system(read_file(input));
  const auto rows = degenerate_family(file.system, facet, es, apply_flags(file.options, flags));
  emit(flags.output, family_csv(rows));
  for (const auto& r : rows)
    if (!r.error.empty() || r.recovered != r.solutions) return kPartial;
  return kOk;
}

int run_plot(const std::string& input, const SolverFlags& flags, const std::string& polytope_out) {
  const SystemFile file = parse_system(read_file(input));
  const SolveResult result = solve(file.system, apply_flags(file.options, flags));
  emit(flags.output, plot_csv(plot_rows(result), result.ring.n()));
  if (!polytope_out.empty()) write_file(polytope_out, polytope_csv(result.polytope));
  return result.all_recovered() ? kOk : kPartial;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Solve square Laurent polynomial systems in Cox coordinates"};
  app.require_subcommand(1);

  std::string input;
  SolverFlags flags;
  double max_residual = 1e-6;

  auto* solve_cmd = app.add_subcommand("solve", "Solve a system file");
  solve_cmd->add_option("input", input, "System file (JSON)")->required();
  solve_cmd->add_option("--max-residual", max_residual, "Residual above which a solution counts as failed");
  add_solver_flags(solve_cmd, flags);

  auto* mv_cmd = app.add_subcommand("mixed-volume", "Mixed volume of the Newton polytopes");
  mv_cmd->add_option("input", input, "System file (JSON)")->required();

  GeneratorSpec spec;
  std::string mode = "mixed";
  std::string gen_output;
  auto* gen_cmd = app.add_subcommand("generate", "Random system with uniformly drawn supports");
  gen_cmd->add_option("--n", spec.n, "Dimension")->required();
  gen_cmd->add_option("--nz", spec.nz, "Points per support")->required();
  gen_cmd->add_option("--d-max", spec.d_max, "Coordinate bound")->required();
  gen_cmd->add_option("--mode", mode, "mixed or unmixed")->check(CLI::IsMember({"mixed", "unmixed"}));
  gen_cmd->add_option("--seed", spec.seed, "Random seed");
  gen_cmd->add_option("--output", gen_output, "Write the system here instead of stdout");

  Eigen::Index facet = 0;
  std::vector<double> es;
  auto* fam_cmd = app.add_subcommand("degenerate-family", "Solve a facet-blended family over e values");
  fam_cmd->add_option("input", input, "System file (JSON)")->required();
  fam_cmd->add_option("--facet", facet, "Facet index of the first equation's Newton polytope")->required();
  fam_cmd->add_option("--e", es, "Blend exponents")->required()->delimiter(',');
  add_solver_flags(fam_cmd, flags);

  std::string polytope_out;
  auto* plot_cmd = app.add_subcommand("plot-data", "Moment-map image of the solutions as CSV");
  plot_cmd->add_option("input", input, "System file (JSON)")->required();
  plot_cmd->add_option("--polytope-out", polytope_out, "Also write vertices and lattice points of P");
  add_solver_flags(plot_cmd, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*solve_cmd) return run_solve(input, flags, max_residual);
    if (*mv_cmd) return run_mixed_volume(input);
    if (*gen_cmd) {
      spec.mode = mode == "unmixed" ? SupportMode::unmixed : SupportMode::mixed;
      return run_generate(spec, gen_output);
    }
    if (*fam_cmd) return run_family(input, facet, es, flags);
    if (*plot_cmd) return run_plot(input, flags, polytope_out);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParse;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kRegularity;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}
