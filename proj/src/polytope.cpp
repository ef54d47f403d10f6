#include "coxroots/polytope.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>

namespace coxroots {

namespace {

using Index = Eigen::Index;
using i128 = __int128;

std::string format_vector(const LatticeVector& v) {
  std::ostringstream os;
  os << '(';
  for (Index i = 0; i < v.size(); ++i) os << (i ? "," : "") << v(i);
  os << ')';
  return os.str();
}

// Bareiss determinant on a small row-major square matrix.
i128 small_det(std::vector<i128> m, int n) {
  if (n == 0) return 1;
  i128 prev = 1;
  int sign = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (m[k * n + k] == 0) {
      int p = -1;
      for (int i = k + 1; i < n; ++i)
        if (m[i * n + k] != 0) {
          p = i;
          break;
        }
      if (p < 0) return 0;
      for (int j = 0; j < n; ++j) std::swap(m[k * n + j], m[p * n + j]);
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j)
        m[i * n + j] = (m[i * n + j] * m[k * n + k] - m[i * n + k] * m[k * n + j]) / prev;
    prev = m[k * n + k];
  }
  return sign * m[(n - 1) * n + (n - 1)];
}

std::int64_t narrow(i128 v) {
  if (v > i128(INT64_MAX) || v < i128(INT64_MIN)) throw std::overflow_error("hull: coordinate overflow");
  return static_cast<std::int64_t>(v);
}

std::int64_t dot(const LatticeVector& a, const LatticeVector& b) {
  i128 s = 0;
  for (Index i = 0; i < a.size(); ++i) s += i128(a(i)) * b(i);
  return narrow(s);
}

// Normal to the hyperplane through d points in Z^d (not oriented, not primitive).
LatticeVector hyperplane_normal(const std::vector<const LatticeVector*>& pts, int d) {
  LatticeVector normal(d);
  std::vector<i128> minor(static_cast<std::size_t>((d - 1) * (d - 1)));
  for (int col = 0; col < d; ++col) {
    for (int r = 0; r < d - 1; ++r) {
      int cc = 0;
      for (int j = 0; j < d; ++j) {
        if (j == col) continue;
        minor[r * (d - 1) + cc++] = i128((*pts[r + 1])(j)) - (*pts[0])(j);
      }
    }
    i128 det = small_det(minor, d - 1);
    normal(col) = narrow((col % 2 == 0) ? det : -det);
  }
  return normal;
}

Index affine_rank(const std::vector<LatticeVector>& pts) {
  if (pts.size() <= 1) return 0;
  IntMatrix D(pts.front().size(), static_cast<Index>(pts.size() - 1));
  for (std::size_t j = 1; j < pts.size(); ++j)
    for (Index i = 0; i < D.rows(); ++i) D(i, static_cast<Index>(j - 1)) = BigInt(pts[j](i) - pts[0](i));
  return integer_rank(D);
}

// Orders facet normals: counterclockwise from the positive x-axis in the
// plane, descending lexicographic otherwise.
bool normal_before(const LatticeVector& a, const LatticeVector& b) {
  if (a.size() == 2) {
    auto half = [](const LatticeVector& v) { return (v(1) > 0 || (v(1) == 0 && v(0) > 0)) ? 0 : 1; };
    const int ha = half(a), hb = half(b);
    if (ha != hb) return ha < hb;
    return i128(a(0)) * b(1) - i128(a(1)) * b(0) > 0;
  }
  return LexLess{}(b, a);
}

struct SimplexFacet {
  std::vector<int> verts;
  LatticeVector normal;
  std::int64_t offset = 0;
  bool alive = true;
};

struct FullHull {
  LatticeMatrix normals;
  LatticeVector offsets;
  std::vector<LatticeVector> vertices;
};

// Incremental beneath-beyond hull of a full-dimensional point set in Z^d.
// Facets are kept as oriented simplices and merged by hyperplane at the end.
FullHull full_hull(const std::vector<LatticeVector>& pts, int d) {
  FullHull out;
  if (d == 1) {
    auto [lo, hi] = std::minmax_element(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a(0) < b(0); });
    out.normals = LatticeMatrix(1, 2);
    out.normals << 1, -1;
    out.offsets = LatticeVector(2);
    out.offsets << -(*lo)(0), (*hi)(0);
    out.vertices = {*lo, *hi};
    return out;
  }

  // Initial simplex.
  std::vector<int> simplex{0};
  {
    std::vector<LatticeVector> chosen{pts[0]};
    for (int i = 1; i < static_cast<int>(pts.size()) && static_cast<int>(simplex.size()) < d + 1; ++i) {
      chosen.push_back(pts[i]);
      if (affine_rank(chosen) == static_cast<Index>(chosen.size() - 1)) {
        simplex.push_back(i);
      } else {
        chosen.pop_back();
      }
    }
  }
  if (static_cast<int>(simplex.size()) != d + 1) throw std::logic_error("full_hull: point set is not full-dimensional");

  LatticeVector interior_sum = LatticeVector::Zero(d);
  for (int i : simplex) interior_sum += pts[i];

  std::vector<SimplexFacet> facets;
  auto make_facet = [&](std::vector<int> verts) {
    std::vector<const LatticeVector*> vp;
    for (int v : verts) vp.push_back(&pts[v]);
    SimplexFacet f;
    f.normal = primitive_vector(hyperplane_normal(vp, d));
    f.offset = -dot(f.normal, pts[verts[0]]);
    if (i128(dot(f.normal, interior_sum)) + i128(d + 1) * f.offset < 0) {
      f.normal = -f.normal;
      f.offset = -f.offset;
    }
    std::sort(verts.begin(), verts.end());
    f.verts = std::move(verts);
    facets.push_back(std::move(f));
  };

  for (int skip = 0; skip <= d; ++skip) {
    std::vector<int> verts;
    for (int j = 0; j <= d; ++j)
      if (j != skip) verts.push_back(simplex[j]);
    make_facet(verts);
  }

  std::vector<bool> in_simplex(pts.size(), false);
  for (int i : simplex) in_simplex[i] = true;

  for (int q = 0; q < static_cast<int>(pts.size()); ++q) {
    if (in_simplex[q]) continue;
    std::vector<std::size_t> visible;
    for (std::size_t f = 0; f < facets.size(); ++f)
      if (facets[f].alive && i128(dot(facets[f].normal, pts[q])) + facets[f].offset < 0) visible.push_back(f);
    if (visible.empty()) continue;

    std::map<std::vector<int>, int> ridge_count;
    for (std::size_t f : visible) {
      const auto& v = facets[f].verts;
      for (std::size_t drop = 0; drop < v.size(); ++drop) {
        std::vector<int> ridge;
        for (std::size_t j = 0; j < v.size(); ++j)
          if (j != drop) ridge.push_back(v[j]);
        ++ridge_count[ridge];
      }
      facets[f].alive = false;
    }
    for (auto& [ridge, count] : ridge_count) {
      if (count != 1) continue;
      std::vector<int> verts = ridge;
      verts.push_back(q);
      make_facet(std::move(verts));
    }
    std::erase_if(facets, [](const SimplexFacet& f) { return !f.alive; });
  }

  // Merge coplanar simplices into polytope facets.
  std::vector<std::pair<LatticeVector, std::int64_t>> merged;
  for (const auto& f : facets) {
    bool seen = std::any_of(merged.begin(), merged.end(), [&](const auto& m) { return m.first == f.normal && m.second == f.offset; });
    if (!seen) merged.emplace_back(f.normal, f.offset);
  }
  std::sort(merged.begin(), merged.end(), [](const auto& a, const auto& b) { return normal_before(a.first, b.first); });

  out.normals = LatticeMatrix(d, static_cast<Index>(merged.size()));
  out.offsets = LatticeVector(static_cast<Index>(merged.size()));
  for (std::size_t j = 0; j < merged.size(); ++j) {
    out.normals.col(static_cast<Index>(j)) = merged[j].first;
    out.offsets(static_cast<Index>(j)) = merged[j].second;
  }

  // A point is a vertex iff its active facet normals have full rank.
  for (const auto& p : pts) {
    std::vector<Index> active;
    for (Index j = 0; j < out.normals.cols(); ++j)
      if (dot(out.normals.col(j), p) + out.offsets(j) == 0) active.push_back(j);
    if (static_cast<int>(active.size()) < d) continue;
    IntMatrix A(d, static_cast<Index>(active.size()));
    for (std::size_t c = 0; c < active.size(); ++c)
      for (int i = 0; i < d; ++i) A(i, static_cast<Index>(c)) = BigInt(out.normals(i, active[c]));
    if (integer_rank(A) == d) out.vertices.push_back(p);
  }
  return out;
}

std::vector<LatticeVector> dedupe(std::span<const LatticeVector> points) {
  std::vector<LatticeVector> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), LexLess{});
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

// Coordinates on which the affine hull of pts projects injectively.
std::vector<Index> spanning_coordinates(const std::vector<LatticeVector>& pts, Index r) {
  std::vector<Index> coords;
  const Index n = pts.front().size();
  for (Index c = 0; c < n && static_cast<Index>(coords.size()) < r; ++c) {
    coords.push_back(c);
    IntMatrix D(static_cast<Index>(coords.size()), static_cast<Index>(pts.size() - 1));
    for (std::size_t j = 1; j < pts.size(); ++j)
      for (std::size_t i = 0; i < coords.size(); ++i)
        D(static_cast<Index>(i), static_cast<Index>(j - 1)) = BigInt(pts[j](coords[i]) - pts[0](coords[i]));
    if (integer_rank(D) != static_cast<Index>(coords.size())) coords.pop_back();
  }
  return coords;
}

LatticeVector project(const LatticeVector& v, const std::vector<Index>& coords) {
  LatticeVector out(static_cast<Index>(coords.size()));
  for (std::size_t i = 0; i < coords.size(); ++i) out(static_cast<Index>(i)) = v(coords[i]);
  return out;
}

// Calls visit(m) for every integer point of the box [lo, hi] in lexicographic order.
template <typename Visit>
void for_each_box_point(const LatticeVector& lo, const LatticeVector& hi, Visit&& visit) {
  const Index n = lo.size();
  for (Index i = 0; i < n; ++i)
    if (lo(i) > hi(i)) return;
  LatticeVector m = lo;
  for (;;) {
    visit(m);
    Index i = n - 1;
    while (i >= 0 && m(i) == hi(i)) {
      m(i) = lo(i);
      --i;
    }
    if (i < 0) return;
    ++m(i);
  }
}

i128 floor_div(i128 a, i128 b) {
  i128 q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

i128 ceil_div(i128 a, i128 b) { return -floor_div(-a, b); }

bool positively_spanning(const LatticeMatrix& F) {
  const Index n = F.rows();
  std::vector<LatticeVector> cols;
  cols.push_back(LatticeVector::Zero(n));
  for (Index j = 0; j < F.cols(); ++j) cols.push_back(F.col(j));
  const LatticePolytope hull = convex_hull(cols);
  if (!hull.full_dimensional()) return false;
  return (hull.offsets.array() > 0).all();
}

// Bounding box of the vertices of {F^T m + a >= 0}; false if infeasible.
bool inequality_bounding_box(const LatticeMatrix& F, const LatticeVector& a, LatticeVector& lo, LatticeVector& hi) {
  const int n = static_cast<int>(F.rows());
  const int k = static_cast<int>(F.cols());
  lo = LatticeVector::Constant(n, INT64_MAX);
  hi = LatticeVector::Constant(n, INT64_MIN);
  bool feasible = false;

  std::vector<int> pick(n);
  std::iota(pick.begin(), pick.end(), 0);
  std::vector<i128> A(static_cast<std::size_t>(n * n)), Aj(static_cast<std::size_t>(n * n));
  std::vector<i128> num(n);
  while (true) {
    // Rows of A are the chosen normals; solve A m = -a_pick.
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) A[r * n + c] = F(c, pick[r]);
    const i128 det = small_det(A, n);
    if (det != 0) {
      for (int j = 0; j < n; ++j) {
        Aj = A;
        for (int r = 0; r < n; ++r) Aj[r * n + j] = -i128(a(pick[r]));
        num[j] = small_det(Aj, n);
      }
      bool ok = true;
      for (int i = 0; i < k && ok; ++i) {
        i128 s = i128(a(i)) * det;
        for (int c = 0; c < n; ++c) s += i128(F(c, i)) * num[c];
        if ((det > 0 && s < 0) || (det < 0 && s > 0)) ok = false;
      }
      if (ok) {
        feasible = true;
        for (int c = 0; c < n; ++c) {
          lo(c) = std::min<std::int64_t>(lo(c), narrow(floor_div(num[c], det)));
          hi(c) = std::max<std::int64_t>(hi(c), narrow(ceil_div(num[c], det)));
        }
      }
    }
    int i = n - 1;
    while (i >= 0 && pick[i] == k - n + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int j = i + 1; j < n; ++j) pick[j] = pick[j - 1] + 1;
  }
  return feasible;
}

}  // namespace

bool LatticePolytope::contains(const LatticeVector& m) const {
  for (Index j = 0; j < normals.cols(); ++j)
    if (dot(normals.col(j), m) + offsets(j) < 0) return false;
  return true;
}

void Support::validate() const {
  if (terms.empty()) throw std::invalid_argument("support has no terms");
  const Index n = terms.front().exponent.size();
  std::set<LatticeVector, LexLess> seen;
  bool nonzero = false;
  for (const auto& t : terms) {
    if (t.exponent.size() != n) throw std::invalid_argument("support exponents have inconsistent length");
    if (!seen.insert(t.exponent).second) throw std::invalid_argument("support repeats exponent " + format_vector(t.exponent));
    if (t.coefficient != Complex(0.0, 0.0)) nonzero = true;
  }
  if (!nonzero) throw std::invalid_argument("support has only zero coefficients");
}

LatticePolytope convex_hull(std::span<const LatticeVector> points) {
  if (points.empty()) throw std::invalid_argument("convex_hull: empty point set");
  const std::vector<LatticeVector> pts = dedupe(points);
  LatticePolytope P;
  P.dim = pts.front().size();
  P.affine_dim = affine_rank(pts);
  P.normals = LatticeMatrix(P.dim, 0);
  P.offsets = LatticeVector(0);

  if (P.affine_dim == 0) {
    P.vertices = {pts.front()};
    return P;
  }
  if (P.affine_dim == P.dim) {
    FullHull h = full_hull(pts, static_cast<int>(P.dim));
    P.normals = std::move(h.normals);
    P.offsets = std::move(h.offsets);
    P.vertices = std::move(h.vertices);
    std::sort(P.vertices.begin(), P.vertices.end(), LexLess{});
    return P;
  }

  const std::vector<Index> coords = spanning_coordinates(pts, P.affine_dim);
  std::vector<LatticeVector> projected;
  for (const auto& p : pts) projected.push_back(project(p, coords));
  const FullHull h = full_hull(projected, static_cast<int>(P.affine_dim));
  for (const auto& p : pts) {
    const LatticeVector pp = project(p, coords);
    if (std::find(h.vertices.begin(), h.vertices.end(), pp) != h.vertices.end()) P.vertices.push_back(p);
  }
  std::sort(P.vertices.begin(), P.vertices.end(), LexLess{});
  return P;
}

LatticePolytope facet_representation(std::span<const LatticeVector> points) {
  LatticePolytope P = convex_hull(points);
  if (!P.full_dimensional()) {
    throw std::invalid_argument("facet_representation: hull has dimension " + std::to_string(P.affine_dim) +
                                " in ambient dimension " + std::to_string(P.dim) + " (polytope must be full-dimensional)");
  }
  return P;
}

LatticePolytope newton_polytope(const Support& s) {
  if (s.terms.empty()) throw std::invalid_argument("newton_polytope: empty support");
  std::vector<LatticeVector> pts;
  for (const auto& t : s.terms)
    if (t.coefficient != Complex(0.0, 0.0)) pts.push_back(t.exponent);
  if (pts.empty()) throw std::invalid_argument("newton_polytope: all coefficients are zero");
  return convex_hull(pts);
}

LatticePolytope minkowski_sum(const LatticePolytope& P, const LatticePolytope& Q) {
  if (P.dim != Q.dim) throw std::invalid_argument("minkowski_sum: dimension mismatch");
  std::vector<LatticeVector> sums;
  sums.reserve(P.vertices.size() * Q.vertices.size());
  for (const auto& p : P.vertices)
    for (const auto& q : Q.vertices) sums.push_back(p + q);
  return convex_hull(sums);
}

std::vector<LatticeVector> lattice_points(const LatticePolytope& P) {
  std::vector<LatticeVector> out;
  if (P.vertices.empty()) return out;
  if (P.affine_dim == 0) return {P.vertices.front()};

  LatticeVector lo = P.vertices.front(), hi = P.vertices.front();
  for (const auto& v : P.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  if (P.full_dimensional()) {
    for_each_box_point(lo, hi, [&](const LatticeVector& m) {
      if (P.contains(m)) out.push_back(m);
    });
    return out;
  }

  // Lower-dimensional: membership in the affine hull and in the hull of the
  // injective coordinate projection.
  const std::vector<Index> coords = spanning_coordinates(P.vertices, P.affine_dim);
  std::vector<LatticeVector> projected;
  for (const auto& v : P.vertices) projected.push_back(project(v, coords));
  const LatticePolytope shadow = convex_hull(projected);
  IntMatrix D(P.dim, static_cast<Index>(P.vertices.size()));
  for (std::size_t j = 1; j < P.vertices.size(); ++j)
    for (Index i = 0; i < P.dim; ++i) D(i, static_cast<Index>(j - 1)) = BigInt(P.vertices[j](i) - P.vertices[0](i));
  for_each_box_point(lo, hi, [&](const LatticeVector& m) {
    if (!shadow.contains(project(m, coords))) return;
    for (Index i = 0; i < P.dim; ++i) D(i, D.cols() - 1) = BigInt(m(i) - P.vertices[0](i));
    if (integer_rank(D) == P.affine_dim) out.push_back(m);
  });
  return out;
}

std::vector<LatticeVector> lattice_points(const LatticeMatrix& F, const LatticeVector& a) {
  if (F.cols() != a.size()) throw std::invalid_argument("lattice_points: offset length does not match normal count");
  if (!positively_spanning(F)) throw std::invalid_argument("lattice_points: inequality system is unbounded");
  LatticeVector lo, hi;
  std::vector<LatticeVector> out;
  if (!inequality_bounding_box(F, a, lo, hi)) return out;
  for_each_box_point(lo, hi, [&](const LatticeVector& m) {
    for (Index j = 0; j < F.cols(); ++j)
      if (dot(F.col(j), m) + a(j) < 0) return;
    out.push_back(m);
  });
  return out;
}

LatticeVector divisor_offsets(const LatticePolytope& P, const LatticeMatrix& F) {
  if (F.rows() != P.dim) throw std::invalid_argument("divisor_offsets: dimension mismatch");
  LatticeVector a(F.cols());
  for (Index i = 0; i < F.cols(); ++i) {
    std::int64_t best = INT64_MAX;
    for (const auto& v : P.vertices) best = std::min(best, dot(F.col(i), v));
    a(i) = -best;
  }
  return a;
}

std::int64_t mixed_volume(std::span<const LatticePolytope> polytopes, const std::optional<LatticePolytope>& p0) {
  const std::size_t n = polytopes.size();
  if (n == 0) throw std::invalid_argument("mixed_volume: no polytopes");
  if (n > 20) throw std::invalid_argument("mixed_volume: too many polytopes");
  for (const auto& P : polytopes)
    if (P.dim != static_cast<Index>(n)) throw std::invalid_argument("mixed_volume: dimension mismatch");

  LatticePolytope base;
  if (p0) {
    if (p0->dim != static_cast<Index>(n)) throw std::invalid_argument("mixed_volume: auxiliary polytope dimension mismatch");
    base = *p0;
  } else {
    base = polytopes[0];
    for (std::size_t j = 1; j < n; ++j) base = minkowski_sum(base, polytopes[j]);
  }
  if (!base.full_dimensional()) throw std::invalid_argument("mixed_volume: auxiliary polytope is not full-dimensional");

  const std::size_t subsets = std::size_t{1} << n;
  std::vector<LatticePolytope> sums(subsets);
  sums[0] = base;
  std::int64_t total = 0;
  for (std::size_t mask = 0; mask < subsets; ++mask) {
    if (mask != 0) {
      const std::size_t high = std::bit_width(mask) - 1;
      sums[mask] = minkowski_sum(sums[mask & ~(std::size_t{1} << high)], polytopes[high]);
    }
    const auto count = static_cast<std::int64_t>(lattice_points(sums[mask]).size());
    const int size = std::popcount(mask);
    total += ((n - size) % 2 == 0) ? count : -count;
  }
  return total;
}

LatticePolytope dilated_simplex(Eigen::Index n, std::int64_t d) {
  std::vector<LatticeVector> pts{LatticeVector::Zero(n)};
  for (Index i = 0; i < n; ++i) {
    LatticeVector v = LatticeVector::Zero(n);
    v(i) = d;
    pts.push_back(v);
  }
  return convex_hull(pts);
}

namespace {

bool differences_generate(const LatticePolytope& P) {
  const std::vector<LatticeVector> pts = lattice_points(P);
  if (pts.empty()) return false;
  std::vector<LatticeVector> diffs;
  for (const auto& p : pts) diffs.push_back(p - pts.front());
  return lattice_generates(diffs, P.dim);
}

}  // namespace

LatticePolytope generate_alpha0(const LatticePolytope& P) {
  if (!P.full_dimensional()) throw std::invalid_argument("generate_alpha0: polytope is not full-dimensional");
  for (std::int64_t d = 1;; ++d) {
    LatticePolytope S = dilated_simplex(P.dim, d);
    if (differences_generate(S)) return S;
  }
}

void validate_alpha0(const LatticePolytope& P0, Eigen::Index n) {
  if (P0.dim != n) throw std::invalid_argument("alpha0 polytope has dimension " + std::to_string(P0.dim) + ", expected " + std::to_string(n));
  if (!P0.full_dimensional()) throw std::invalid_argument("alpha0 polytope is not full-dimensional");
  if (!differences_generate(P0)) throw std::invalid_argument("alpha0 polytope lattice points do not generate the lattice");
}

}  // namespace coxroots
