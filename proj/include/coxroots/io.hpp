// JSON system files, polytope files and result serialization.
#pragma once

#include "coxroots/solver.hpp"

#include "json.hpp"

#include <stdexcept>
#include <string>

namespace coxroots {

inline constexpr int kSchemaVersion = 1;

/// Malformed input. line and column are 1-based; 0 when the problem is
/// structural and has no single source position.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line = 0, std::size_t column = 0);

  std::size_t line;
  std::size_t column;
};

struct SystemFile {
  LaurentSystem system;
  SolveOptions options;
};

SystemFile parse_system(const std::string& text);
std::string write_system(const SystemFile& file);

/// {"schema_version": 1, "points": [[...], ...]} -> convex hull of the points.
LatticePolytope parse_polytope(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

nlohmann::json results_json(const SolveResult& result);
std::string results_csv(const SolveResult& result);

/// One line: "delta=3 k=4 n_alpha0=6 solutions=3 recovered=3 d_mean=16 d_max=16 time=0.0012".
std::string summary_line(const SolveResult& result);

}  // namespace coxroots
