#include "coxroots/lattice.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace coxroots {

namespace {

using Index = Eigen::Index;

void swap_rows(IntMatrix& m, Index a, Index b) {
  if (a == b) return;
  for (Index j = 0; j < m.cols(); ++j) std::swap(m(a, j), m(b, j));
}

void swap_cols(IntMatrix& m, Index a, Index b) {
  if (a == b) return;
  for (Index i = 0; i < m.rows(); ++i) std::swap(m(i, a), m(i, b));
}

// row[target] += factor * row[source]
void add_row(IntMatrix& m, Index target, Index source, const BigInt& factor) {
  for (Index j = 0; j < m.cols(); ++j) m(target, j) += factor * m(source, j);
}

void add_col(IntMatrix& m, Index target, Index source, const BigInt& factor) {
  for (Index i = 0; i < m.rows(); ++i) m(i, target) += factor * m(i, source);
}

void negate_row(IntMatrix& m, Index r) {
  for (Index j = 0; j < m.cols(); ++j) m(r, j) = -m(r, j);
}

bool find_min_pivot(const IntMatrix& S, Index t, Index& pr, Index& pc) {
  bool found = false;
  BigInt best;
  for (Index j = t; j < S.cols(); ++j) {
    for (Index i = t; i < S.rows(); ++i) {
      if (S(i, j) == 0) continue;
      BigInt a = abs(S(i, j));
      if (!found || a < best) {
        best = a;
        pr = i;
        pc = j;
        found = true;
      }
    }
  }
  return found;
}

}  // namespace

SnfDecomposition smith_normal_form(const IntMatrix& A) {
  if (A.rows() == 0 || A.cols() == 0) throw std::invalid_argument("smith_normal_form: empty matrix");

  const Index m = A.rows();
  const Index c = A.cols();
  SnfDecomposition out;
  out.S = A;
  out.U = IntMatrix::Identity(m, m);
  out.V = IntMatrix::Identity(c, c);
  IntMatrix& S = out.S;

  const Index diag = std::min(m, c);
  Index t = 0;
  for (; t < diag; ++t) {
    Index pr = 0, pc = 0;
    if (!find_min_pivot(S, t, pr, pc)) break;

    for (;;) {
      swap_rows(S, t, pr);
      swap_rows(out.U, t, pr);
      swap_cols(S, t, pc);
      swap_cols(out.V, t, pc);

      bool dirty = false;
      for (Index i = t + 1; i < m; ++i) {
        if (S(i, t) == 0) continue;
        BigInt q = S(i, t) / S(t, t);
        add_row(S, i, t, -q);
        add_row(out.U, i, t, -q);
        if (S(i, t) != 0) dirty = true;
      }
      for (Index j = t + 1; j < c; ++j) {
        if (S(t, j) == 0) continue;
        BigInt q = S(t, j) / S(t, t);
        add_col(S, j, t, -q);
        add_col(out.V, j, t, -q);
        if (S(t, j) != 0) dirty = true;
      }
      if (dirty) {
        find_min_pivot(S, t, pr, pc);
        continue;
      }

      // Row and column t are clear; enforce the divisibility chain.
      Index bad_row = -1;
      for (Index i = t + 1; i < m && bad_row < 0; ++i)
        for (Index j = t + 1; j < c; ++j)
          if (S(i, j) % S(t, t) != 0) {
            bad_row = i;
            break;
          }
      if (bad_row >= 0) {
        add_row(S, t, bad_row, BigInt(1));
        add_row(out.U, t, bad_row, BigInt(1));
        pr = t;
        pc = t;
        find_min_pivot(S, t, pr, pc);
        continue;
      }
      break;
    }

    if (S(t, t) < 0) {
      negate_row(S, t);
      negate_row(out.U, t);
    }
    out.invariant_factors.push_back(S(t, t));
  }
  out.rank = t;
  return out;
}

LatticeVector primitive_vector(const LatticeVector& v) {
  const std::int64_t g = gcd_of(v);
  if (g == 0) throw std::invalid_argument("primitive_vector: zero vector (degenerate normal)");
  return v / g;
}

std::int64_t gcd_of(const LatticeVector& v) {
  std::int64_t g = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) g = std::gcd(g, v(i));
  return g;
}

bool lattice_generates(std::span<const LatticeVector> vectors, Eigen::Index n) {
  if (n == 0) return true;
  if (vectors.empty()) return false;
  IntMatrix D(n, static_cast<Index>(vectors.size()));
  for (std::size_t j = 0; j < vectors.size(); ++j) {
    if (vectors[j].size() != n) throw std::invalid_argument("lattice_generates: dimension mismatch");
    for (Index i = 0; i < n; ++i) D(i, static_cast<Index>(j)) = BigInt(vectors[j](i));
  }
  const SnfDecomposition snf = smith_normal_form(D);
  if (snf.rank != n) return false;
  return std::all_of(snf.invariant_factors.begin(), snf.invariant_factors.end(),
                     [](const BigInt& f) { return f == 1; });
}

BigInt determinant(const IntMatrix& A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("determinant: matrix not square");
  const Index n = A.rows();
  if (n == 0) return BigInt(1);
  IntMatrix M = A;
  BigInt prev(1);
  int sign = 1;
  for (Index k = 0; k < n - 1; ++k) {
    if (M(k, k) == 0) {
      Index swap_with = -1;
      for (Index i = k + 1; i < n; ++i)
        if (M(i, k) != 0) {
          swap_with = i;
          break;
        }
      if (swap_with < 0) return BigInt(0);
      swap_rows(M, k, swap_with);
      sign = -sign;
    }
    for (Index i = k + 1; i < n; ++i)
      for (Index j = k + 1; j < n; ++j) M(i, j) = (M(i, j) * M(k, k) - M(i, k) * M(k, j)) / prev;
    prev = M(k, k);
  }
  return sign * M(n - 1, n - 1);
}

Eigen::Index integer_rank(const IntMatrix& A) {
  IntMatrix M = A;
  Index rank = 0;
  for (Index col = 0; col < M.cols() && rank < M.rows(); ++col) {
    Index piv = -1;
    for (Index i = rank; i < M.rows(); ++i)
      if (M(i, col) != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    swap_rows(M, rank, piv);
    for (Index i = rank + 1; i < M.rows(); ++i) {
      if (M(i, col) == 0) continue;
      BigInt a = M(rank, col), b = M(i, col);
      BigInt g = gcd(a, b);
      BigInt fa = b / g, fb = a / g;
      for (Index j = col; j < M.cols(); ++j) M(i, j) = M(i, j) * fb - M(rank, j) * fa;
    }
    ++rank;
  }
  return rank;
}

LatticeMatrix to_int64(const IntMatrix& m) {
  LatticeMatrix out(m.rows(), m.cols());
  const BigInt hi(std::numeric_limits<std::int64_t>::max());
  const BigInt lo(std::numeric_limits<std::int64_t>::min());
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) {
      if (m(i, j) > hi || m(i, j) < lo) throw std::overflow_error("to_int64: entry exceeds 64 bits");
      out(i, j) = static_cast<std::int64_t>(m(i, j));
    }
  return out;
}

}  // namespace coxroots
