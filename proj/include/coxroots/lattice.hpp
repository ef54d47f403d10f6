// Exact integer linear algebra: Smith normal form, primitive vectors and
// lattice generation tests.
#pragma once

#include <Eigen/Core>
#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <span>
#include <vector>

namespace coxroots {

/// Arbitrary precision integer. Expression templates are disabled so the type
/// behaves like a plain value inside Eigen expressions.
using BigInt = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>,
                                             boost::multiprecision::et_off>;

}  // namespace coxroots

namespace Eigen {

template <>
struct NumTraits<coxroots::BigInt> : GenericNumTraits<coxroots::BigInt> {
  using Real = coxroots::BigInt;
  using NonInteger = coxroots::BigInt;
  using Nested = coxroots::BigInt;
  using Literal = coxroots::BigInt;

  enum {
    IsInteger = 1,
    IsSigned = 1,
    IsComplex = 0,
    RequireInitialization = 1,
    ReadCost = 1,
    AddCost = 4,
    MulCost = 8
  };

  static inline Real epsilon() { return Real(0); }
  static inline Real dummy_precision() { return Real(0); }
  static inline int digits10() { return 0; }
};

}  // namespace Eigen

namespace coxroots {

using LatticeVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;
using LatticeMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using IntMatrix = Eigen::Matrix<BigInt, Eigen::Dynamic, Eigen::Dynamic>;

/// U * A * V == S with U, V unimodular and S diagonal with a divisibility chain.
struct SnfDecomposition {
  IntMatrix U;
  IntMatrix V;
  IntMatrix S;
  Eigen::Index rank = 0;
  std::vector<BigInt> invariant_factors;
};

/// Smith normal form. Pivots on the smallest nonzero absolute value; the
/// invariant factors are positive. Deterministic for a fixed input.
SnfDecomposition smith_normal_form(const IntMatrix& A);

/// Divides v by the gcd of its entries. Throws std::invalid_argument on a
/// zero vector.
LatticeVector primitive_vector(const LatticeVector& v);

/// True iff the integer span of the given vectors is all of Z^n.
bool lattice_generates(std::span<const LatticeVector> vectors, Eigen::Index n);

/// Exact determinant by Bareiss fraction-free elimination.
BigInt determinant(const IntMatrix& A);

/// Exact rank by fraction-free elimination.
Eigen::Index integer_rank(const IntMatrix& A);

template <typename Derived>
IntMatrix to_big(const Eigen::MatrixBase<Derived>& m) {
  IntMatrix out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = BigInt(m(i, j));
  return out;
}

/// Converts back to 64-bit entries; throws std::overflow_error if an entry
/// does not fit.
LatticeMatrix to_int64(const IntMatrix& m);

std::int64_t gcd_of(const LatticeVector& v);

}  // namespace coxroots
