#include "coxroots/io.hpp"

#include "coxroots/verify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace coxroots {

namespace {

using json = nlohmann::json;
using Index = Eigen::Index;

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // nlohmann reports the byte just past the offending character.
    const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    const auto [line, column] = line_column(text, byte);
    throw ParseError("syntax error at line " + std::to_string(line) + ", column " + std::to_string(column), line, column);
  }
}

void check_schema(const json& doc) {
  if (!doc.is_object()) throw ParseError("top level must be an object");
  if (!doc.contains("schema_version")) throw ParseError("missing schema_version");
  if (!doc["schema_version"].is_number_integer() || doc["schema_version"].get<int>() != kSchemaVersion)
    throw ParseError("unsupported schema_version (expected " + std::to_string(kSchemaVersion) + ")");
}

LatticeVector parse_exponent(const json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": exponent must be an array of integers");
  LatticeVector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number_integer()) throw ParseError(where + ": exponent entries must be integers");
    v(static_cast<Index>(i)) = j[i].get<std::int64_t>();
  }
  return v;
}

double number_or(const json& obj, const char* key, double fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) throw ParseError(where + ": '" + key + "' must be a number");
  return obj[key].get<double>();
}

json complex_array(const ComplexVector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back({v(i).real(), v(i).imag()});
  return out;
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

const char* path_name(RecoveryPath p) { return p == RecoveryPath::snf ? "snf" : "newton"; }

}  // namespace

ParseError::ParseError(const std::string& what, std::size_t l, std::size_t c)
    : std::runtime_error(what), line(l), column(c) {}

SystemFile parse_system(const std::string& text) {
  const json doc = parse_json(text);
  check_schema(doc);
  SystemFile out;
  if (!doc.contains("dimension") || !doc["dimension"].is_number_integer()) throw ParseError("missing integer 'dimension'");
  out.system.n = doc["dimension"].get<Index>();
  if (out.system.n < 1) throw ParseError("'dimension' must be positive");
  if (!doc.contains("equations") || !doc["equations"].is_array()) throw ParseError("missing array 'equations'");
  const json& eqs = doc["equations"];
  if (eqs.empty()) throw ParseError("equation list is empty");
  if (static_cast<Index>(eqs.size()) != out.system.n) {
    throw ParseError("system is not square: " + std::to_string(eqs.size()) + " equations in dimension " +
                     std::to_string(out.system.n));
  }
  for (std::size_t e = 0; e < eqs.size(); ++e) {
    const std::string where = "equations[" + std::to_string(e) + "]";
    if (!eqs[e].is_array() || eqs[e].empty()) throw ParseError(where + ": must be a nonempty array of terms");
    Support s;
    for (std::size_t t = 0; t < eqs[e].size(); ++t) {
      const json& term = eqs[e][t];
      const std::string tw = where + "[" + std::to_string(t) + "]";
      if (!term.is_object() || !term.contains("exponent")) throw ParseError(tw + ": term needs an 'exponent'");
      LatticeVector m = parse_exponent(term["exponent"], tw);
      if (m.size() != out.system.n) throw ParseError(tw + ": exponent length does not match dimension");
      const double re = number_or(term, "re", 0.0, tw);
      const double im = number_or(term, "im", 0.0, tw);
      s.terms.push_back({std::move(m), Complex(re, im)});
    }
    out.system.polynomials.push_back(std::move(s));
  }
  try {
    out.system.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }

  if (doc.contains("options")) {
    const json& o = doc["options"];
    if (!o.is_object()) throw ParseError("'options' must be an object");
    SolveOptions& opt = out.options;
    opt.tol = number_or(o, "tol", opt.tol, "options");
    opt.rank_tol = number_or(o, "rank_tol", opt.rank_tol, "options");
    opt.newton_tol = number_or(o, "newton_tol", opt.newton_tol, "options");
    opt.zero_tol = number_or(o, "zero_tol", opt.zero_tol, "options");
    if (o.contains("seed")) {
      if (!o["seed"].is_number_unsigned()) throw ParseError("options: 'seed' must be a nonnegative integer");
      opt.seed = o["seed"].get<std::uint64_t>();
    }
    if (o.contains("newton_max_iter")) {
      if (!o["newton_max_iter"].is_number_integer()) throw ParseError("options: 'newton_max_iter' must be an integer");
      opt.newton_max_iter = o["newton_max_iter"].get<int>();
    }
    try {
      opt.validate();
    } catch (const std::invalid_argument& e) {
      throw ParseError(std::string("options: ") + e.what());
    }
  }
  return out;
}

std::string write_system(const SystemFile& file) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["dimension"] = file.system.n;
  json eqs = json::array();
  for (const auto& s : file.system.polynomials) {
    json terms = json::array();
    for (const auto& t : s.terms) {
      json exp = json::array();
      for (Index i = 0; i < t.exponent.size(); ++i) exp.push_back(t.exponent(i));
      terms.push_back({{"exponent", exp}, {"re", t.coefficient.real()}, {"im", t.coefficient.imag()}});
    }
    eqs.push_back(std::move(terms));
  }
  doc["equations"] = std::move(eqs);
  const SolveOptions& o = file.options;
  doc["options"] = {{"tol", o.tol},           {"rank_tol", o.rank_tol},
                    {"seed", o.seed},         {"newton_max_iter", o.newton_max_iter},
                    {"newton_tol", o.newton_tol}, {"zero_tol", o.zero_tol}};
  return doc.dump(2) + "\n";
}

LatticePolytope parse_polytope(const std::string& text) {
  const json doc = parse_json(text);
  check_schema(doc);
  if (!doc.contains("points") || !doc["points"].is_array() || doc["points"].empty())
    throw ParseError("polytope file needs a nonempty 'points' array");
  std::vector<LatticeVector> pts;
  for (std::size_t i = 0; i < doc["points"].size(); ++i) {
    pts.push_back(parse_exponent(doc["points"][i], "points[" + std::to_string(i) + "]"));
    if (pts.back().size() != pts.front().size()) throw ParseError("points have inconsistent dimension");
  }
  return convex_hull(pts);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

nlohmann::json results_json(const SolveResult& result) {
  const SolveDiagnostics& d = result.diagnostics;
  std::vector<double> residuals;
  for (const auto& s : result.solutions) residuals.push_back(s.residual);
  const DigitsSummary digits = summarize_residuals(residuals);

  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["summary"] = {
      {"delta", d.delta},
      {"k", d.k},
      {"n_alpha0", d.n_alpha0},
      {"n_alpha", d.n_alpha},
      {"rows", d.rows},
      {"cols", d.cols},
      {"observed_corank", d.observed_corank},
      {"gap_ratio", finite_or_null(d.gap_ratio)},
      {"condition_number", finite_or_null(d.condition_number)},
      {"enlarged_alpha", d.enlarged},
      {"h0_retries", d.h0_retries},
      {"eigen_redraws", d.eigen_redraws},
      {"clustered", d.clustered},
      {"d_mean", digits.d_mean},
      {"d_max", digits.d_max},
      {"mean_digits", digits.mean_digits},
      {"recovered", std::count_if(result.solutions.begin(), result.solutions.end(), [](const Solution& s) { return s.recovered; })},
      {"timings",
       {{"setup", d.timings.setup},
        {"resultant", d.timings.resultant},
        {"cokernel", d.timings.cokernel},
        {"basis", d.timings.basis},
        {"multiplication", d.timings.multiplication},
        {"eigen", d.timings.eigen},
        {"recovery", d.timings.recovery},
        {"total", d.timings.total}}},
  };
  json rays = json::array();
  for (Index j = 0; j < result.ring.k(); ++j) {
    json col = json::array();
    for (Index i = 0; i < result.ring.n(); ++i) col.push_back(result.ring.rays()(i, j));
    rays.push_back(std::move(col));
  }
  doc["rays"] = std::move(rays);
  json sols = json::array();
  for (const auto& s : result.solutions) {
    sols.push_back({{"cox", complex_array(s.cox)},
                    {"torus", s.torus ? complex_array(*s.torus) : json(nullptr)},
                    {"boundary_incidence", s.boundary_incidence},
                    {"residual", finite_or_null(s.residual)},
                    {"recovered", s.recovered},
                    {"path", path_name(s.path)}});
  }
  doc["solutions"] = std::move(sols);
  return doc;
}

std::string results_csv(const SolveResult& result) {
  const Index k = result.ring.k();
  const Index n = result.ring.n();
  std::ostringstream os;
  os << std::setprecision(17);
  os << "index,recovered,path,residual,boundary_incidence";
  for (Index i = 0; i < k; ++i) os << ",cox_re_" << i << ",cox_im_" << i;
  for (Index i = 0; i < n; ++i) os << ",torus_re_" << i << ",torus_im_" << i;
  os << "\n";
  for (std::size_t j = 0; j < result.solutions.size(); ++j) {
    const Solution& s = result.solutions[j];
    os << j << ',' << (s.recovered ? 1 : 0) << ',' << path_name(s.path) << ',' << s.residual << ',';
    for (std::size_t b = 0; b < s.boundary_incidence.size(); ++b) os << (b ? ";" : "") << s.boundary_incidence[b];
    for (Index i = 0; i < k; ++i) os << ',' << s.cox(i).real() << ',' << s.cox(i).imag();
    for (Index i = 0; i < n; ++i) {
      if (s.torus) {
        os << ',' << (*s.torus)(i).real() << ',' << (*s.torus)(i).imag();
      } else {
        os << ",,";
      }
    }
    os << "\n";
  }
  return os.str();
}

std::string summary_line(const SolveResult& result) {
  std::vector<double> residuals;
  std::size_t recovered = 0;
  for (const auto& s : result.solutions) {
    residuals.push_back(s.residual);
    if (s.recovered) ++recovered;
  }
  const DigitsSummary digits = summarize_residuals(residuals);
  const SolveDiagnostics& d = result.diagnostics;
  std::ostringstream os;
  os << "delta=" << d.delta << " k=" << d.k << " n_alpha0=" << d.n_alpha0 << " solutions=" << result.solutions.size()
     << " recovered=" << recovered << " d_mean=" << digits.d_mean << " d_max=" << digits.d_max
     << " time=" << std::setprecision(3) << d.timings.total;
  return os.str();
}

}  // namespace coxroots
