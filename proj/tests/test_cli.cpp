#include "coxroots/experiments.hpp"
#include "coxroots/io.hpp"
#include "coxroots/verify.hpp"

#include "doctest.h"
#include "fixtures.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <sstream>

using namespace coxroots;
using fixture::vec;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / ("coxroots_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string write_scratch(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  write_file(p.string(), text);
  return p.string();
}

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run_tool(const std::string& args) {
  const std::string out = (scratch() / "stdout.txt").string(), err = (scratch() / "stderr.txt").string();
  const std::string cmd = std::string("\"") + COXROOTS_TOOL + "\" " + args + " > \"" + out + "\" 2> \"" + err + "\"";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, read_file(out), read_file(err)};
}

std::string h2_file() {
  SystemFile f;
  f.system = fixture::hirzebruch();
  return write_system(f);
}

bool same_system(const LaurentSystem& a, const LaurentSystem& b) {
  if (a.n != b.n || a.polynomials.size() != b.polynomials.size()) return false;
  for (std::size_t j = 0; j < a.polynomials.size(); ++j) {
    const auto& s = a.polynomials[j].terms;
    const auto& t = b.polynomials[j].terms;
    if (s.size() != t.size()) return false;
    for (std::size_t i = 0; i < s.size(); ++i)
      if (s[i].exponent != t[i].exponent || s[i].coefficient != t[i].coefficient) return false;
  }
  return true;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("system files round trip") {
  GeneratorSpec spec;
  spec.n = 3;
  spec.nz = 7;
  spec.d_max = 5;
  spec.seed = 21;
  SystemFile f;
  f.system = generate_system(spec);
  f.options.seed = 5;
  f.options.tol = 1e-4;
  const SystemFile back = parse_system(write_system(f));
  CHECK(same_system(f.system, back.system));
  CHECK(back.options.seed == 5);
  CHECK(back.options.tol == 1e-4);
}

TEST_CASE("parse errors") {
  const std::string empty = R"({"schema_version": 1, "dimension": 2, "equations": []})";
  CHECK_THROWS_AS(parse_system(empty), ParseError);

  const std::string broken = "{\n  \"schema_version\": 1,\n  \"dimension\": 2,\n  oops\n}\n";
  try {
    parse_system(broken);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 4);
    CHECK(e.column == 3);
  }

  CHECK_THROWS_AS(parse_system(R"({"schema_version": 2, "dimension": 1, "equations": [[{"exponent": [1]}]]})"), ParseError);
  CHECK_THROWS_AS(parse_system(R"({"schema_version": 1, "dimension": 2, "equations": [[{"exponent": [1, 0], "re": 1}]]})"),
                  ParseError);
  CHECK_THROWS_AS(parse_system(R"({"schema_version": 1, "dimension": 1, "equations": [[{"exponent": [1, 0], "re": 1}]]})"),
                  ParseError);
  CHECK_THROWS_AS(parse_system(R"({"schema_version": 1, "dimension": 1, "equations": [[{"exponent": [1.5], "re": 1}]]})"),
                  ParseError);
  CHECK_THROWS_AS(
      parse_system(R"({"schema_version": 1, "dimension": 1, "equations": [[{"exponent": [1], "re": 1}, {"exponent": [1], "re": 2}]]})"),
      ParseError);
  CHECK_THROWS_AS(
      parse_system(R"({"schema_version": 1, "dimension": 1, "equations": [[{"exponent": [1], "re": 1}]], "options": {"tol": 2}})"),
      ParseError);
}

TEST_CASE("polytope files") {
  const LatticePolytope P = parse_polytope(R"({"schema_version": 1, "points": [[0,0],[2,0],[0,2],[1,1]]})");
  CHECK(P.vertices.size() == 3);
  CHECK_THROWS_AS(parse_polytope(R"({"schema_version": 1, "points": []})"), ParseError);
  CHECK_THROWS_AS(parse_polytope(R"({"schema_version": 1, "points": [[0,0],[1]]})"), ParseError);
}

TEST_CASE("generator follows its specification") {
  GeneratorSpec spec;
  spec.n = 2;
  spec.nz = 20;
  spec.d_max = 10;
  spec.seed = 3;
  const LaurentSystem a = generate_system(spec);
  const LaurentSystem b = generate_system(spec);
  CHECK(same_system(a, b));
  for (const auto& s : a.polynomials) {
    CHECK(s.terms.size() <= 20);
    CHECK(s.terms.front().exponent == LatticeVector::Zero(2));
    for (const auto& t : s.terms) {
      CHECK(t.coefficient.imag() == 0.0);
      CHECK(t.exponent.cwiseAbs().maxCoeff() <= 10);
    }
  }
  spec.seed = 4;
  CHECK_FALSE(same_system(a, generate_system(spec)));

  GeneratorSpec unmixed;
  unmixed.n = 4;
  unmixed.nz = 6;
  unmixed.d_max = 3;
  unmixed.mode = SupportMode::unmixed;
  const LaurentSystem u = generate_system(unmixed);
  for (const auto& s : u.polynomials) {
    REQUIRE(s.terms.size() == u.polynomials[0].terms.size());
    for (std::size_t i = 0; i < s.terms.size(); ++i) CHECK(s.terms[i].exponent == u.polynomials[0].terms[i].exponent);
  }

  GeneratorSpec single;
  single.n = 2;
  single.nz = 1;
  single.d_max = 5;
  const LaurentSystem m = generate_system(single);
  for (const auto& s : m.polynomials) CHECK(s.terms.size() == 1);
  CHECK_THROWS_AS(solve(m), SolverError);

  GeneratorSpec bad;
  bad.nz = 0;
  CHECK_THROWS_AS(generate_system(bad), std::invalid_argument);
}

TEST_CASE("result serialization") {
  const SolveResult r = solve(fixture::hirzebruch());
  const nlohmann::json j = results_json(r);
  CHECK(j["schema_version"] == kSchemaVersion);
  CHECK(j["summary"]["delta"] == 3);
  CHECK(j["summary"]["k"] == 4);
  CHECK(j["summary"]["recovered"] == 3);
  CHECK(j["summary"]["d_mean"].get<int>() >= 13);
  CHECK(j["rays"].size() == 4);
  REQUIRE(j["solutions"].size() == 3);
  int torus = 0;
  for (const auto& s : j["solutions"]) {
    CHECK(s["cox"].size() == 4);
    if (!s["torus"].is_null()) ++torus;
  }
  CHECK(torus == 1);

  const std::string csv = results_csv(r);
  CHECK(count_lines(csv) == 4);
  CHECK(csv.rfind("index,recovered,path,residual,boundary_incidence", 0) == 0);
  CHECK(summary_line(r).rfind("delta=3 k=4", 0) == 0);
}

TEST_CASE("degenerate family on a square support") {
  LaurentSystem base;
  base.n = 2;
  base.polynomials = {fixture::random_coefficients(fixture::box_points(2, 3), 1),
                      fixture::random_coefficients(fixture::box_points(2, 3), 2)};
  SolveOptions opts;
  opts.tol = 1e-4;
  const auto rows = degenerate_family(base, 0, {0.0, 6.0}, opts);
  REQUIRE(rows.size() == 2);
  for (const auto& row : rows) {
    CHECK(row.error.empty());
    CHECK(row.solutions == 18);
    CHECK(row.recovered == 18);
    CHECK(row.r_max <= 1e-9);
  }
  CHECK(count_lines(family_csv(rows)) == 3);
  CHECK_THROWS_AS(degenerate_family(base, 9, {0.0}, opts), std::invalid_argument);

  // e = 0 leaves the system unchanged; for huge e the facet coefficients of
  // the second equation become those of the first.
  const LaurentSystem generic = blend_facet(base, 0, 0.0);
  for (std::size_t i = 0; i < base.polynomials[1].terms.size(); ++i)
    CHECK(generic.polynomials[1].terms[i].coefficient == base.polynomials[1].terms[i].coefficient);
  const LaurentSystem limit = blend_facet(base, 0, 400.0);
  const LatticePolytope P = newton_polytope(base.polynomials[0]);
  for (const auto& t : limit.polynomials[1].terms) {
    if (P.normals.col(0).dot(t.exponent) + P.offsets(0) != 0) continue;
    for (const auto& u : base.polynomials[0].terms)
      if (u.exponent == t.exponent) CHECK(t.coefficient == u.coefficient);
  }
}

TEST_CASE("plot data") {
  const SolveResult r = solve(fixture::hirzebruch());
  const auto rows = plot_rows(r);
  REQUIRE(rows.size() == 3);
  for (const auto& row : rows) {
    for (Eigen::Index i = 0; i < r.polytope.num_facets(); ++i) {
      const double slack = facet_slack(r.polytope, row.mu, i);
      const bool incident = std::find(row.boundary_incidence.begin(), row.boundary_incidence.end(), i) != row.boundary_incidence.end();
      if (incident) {
        CHECK(std::abs(slack) <= 1e-10);
      } else {
        CHECK(slack > 1e-6);
      }
    }
  }
  CHECK(count_lines(plot_csv(rows, 2)) == 4);
  CHECK(plot_csv({}, 2) == "index,mu_0,mu_1,residual,boundary_incidence\n");
  const std::string poly = polytope_csv(r.polytope);
  CHECK(poly.rfind("kind,x_0,x_1\n", 0) == 0);
  CHECK(count_lines(poly) == 1 + r.polytope.vertices.size() + 12);

  LaurentSystem forty;
  forty.n = 2;
  forty.polynomials = {fixture::random_coefficients(fixture::box_points(2, 4), 8),
                       fixture::random_coefficients(fixture::simplex_points(2, 5), 9)};
  CHECK(plot_rows(solve(forty)).size() == 40);
}

TEST_CASE("command line tool") {
  const std::string h2 = write_scratch("h2.json", h2_file());

  const Run solved = run_tool("solve \"" + h2 + "\" --output \"" + (scratch() / "res.json").string() + "\"");
  CHECK(solved.code == 0);
  CHECK(solved.out.rfind("delta=3 k=4", 0) == 0);
  const nlohmann::json res = nlohmann::json::parse(read_file((scratch() / "res.json").string()));
  CHECK(res["solutions"].size() == 3);

  const Run to_stdout = run_tool("solve \"" + h2 + "\" --format csv");
  CHECK(to_stdout.code == 0);
  CHECK(count_lines(to_stdout.out) == 4);
  CHECK(to_stdout.err.rfind("delta=3 k=4", 0) == 0);

  CHECK(run_tool("mixed-volume \"" + h2 + "\"").out == "3\n");
  SystemFile box;
  box.system.n = 2;
  box.system.polynomials = {fixture::ones(fixture::box_points(2, 4)), fixture::ones(fixture::simplex_points(2, 5))};
  CHECK(run_tool("mixed-volume \"" + write_scratch("box.json", write_system(box)) + "\"").out == "40\n");
  SystemFile bez;
  bez.system.n = 3;
  bez.system.polynomials = {fixture::ones(fixture::simplex_points(3, 2)), fixture::ones(fixture::simplex_points(3, 3)),
                            fixture::ones(fixture::simplex_points(3, 4))};
  CHECK(run_tool("mixed-volume \"" + write_scratch("bez.json", write_system(bez)) + "\"").out == "24\n");

  const std::string broken = write_scratch("broken.json", "{\n  \"schema_version\": 1,\n  oops\n}\n");
  const Run parse = run_tool("solve \"" + broken + "\"");
  CHECK(parse.code == 4);
  CHECK(parse.err.find("line 3") != std::string::npos);
  const std::string empty = write_scratch("empty.json", R"({"schema_version": 1, "dimension": 2, "equations": []})");
  CHECK(run_tool("solve \"" + empty + "\"").code == 4);

  const std::string gen = (scratch() / "gen.json").string();
  CHECK(run_tool("generate --n 2 --nz 1 --d-max 5 --seed 2 --output \"" + gen + "\"").code == 0);
  CHECK(run_tool("solve \"" + gen + "\"").code == 3);

  CHECK(run_tool("generate --n 2 --nz 6 --d-max 4 --seed 7 --output \"" + gen + "\"").code == 0);
  GeneratorSpec spec;
  spec.n = 2;
  spec.nz = 6;
  spec.d_max = 4;
  spec.seed = 7;
  CHECK(same_system(parse_system(read_file(gen)).system, generate_system(spec)));
  CHECK(run_tool("solve \"" + gen + "\" --max-residual 1e-300").code == 2);

  const Run plot = run_tool("plot-data \"" + h2 + "\" --polytope-out \"" + (scratch() / "poly.csv").string() + "\"");
  CHECK(plot.code == 0);
  CHECK(count_lines(plot.out) == 4);
  CHECK(fs::exists(scratch() / "poly.csv"));

  const std::string sq = write_scratch("sq.json", [] {
    SystemFile f;
    f.system.n = 2;
    f.system.polynomials = {fixture::random_coefficients(fixture::box_points(2, 2), 3),
                            fixture::random_coefficients(fixture::box_points(2, 2), 4)};
    return write_system(f);
  }());
  const Run fam = run_tool("degenerate-family \"" + sq + "\" --facet 0 --e 0,3,6 --tol 1e-4");
  CHECK(fam.code == 0);
  CHECK(count_lines(fam.out) == 4);
  CHECK(run_tool("degenerate-family \"" + sq + "\" --facet 7 --e 0").code == 1);

  fs::remove_all(scratch());
}
