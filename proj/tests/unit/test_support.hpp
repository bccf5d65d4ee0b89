#pragma once

#include <gtest/gtest.h>

#include <initializer_list>

#include "krein/block_operator.hpp"
#include "krein/random.hpp"

namespace krein::test {

inline constexpr cplx i1{0.0, 1.0};

inline CMatrix mat(std::initializer_list<std::initializer_list<cplx>> rows) {
  CMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    Eigen::Index c = 0;
    for (cplx v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

inline CVector vec(std::initializer_list<cplx> v) {
  CVector x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (cplx z : v) x(k++) = z;
  return x;
}

inline double dist(const CMatrix& a, const CMatrix& b) { return numerics::operator_norm(a - b); }

/// Dissipative random operator: A = J (R + i H), H >= margin.
inline BlockOperator random_dissipative_op(CounterRng& rng, Eigen::Index p, Eigen::Index m, double margin) {
  const Eigen::Index n = p + m;
  const CMatrix x = rng.ginibre(n, n) / std::sqrt(double(n));
  CMatrix h = x * x.adjoint();
  h.diagonal().array() += margin - numerics::hermitian_min_eigenvalue(h);
  const CMatrix r0 = rng.ginibre(n, n) / std::sqrt(double(n));
  const CMatrix r = 0.5 * (r0 + r0.adjoint());
  const KreinStructure s(p, m);
  return BlockOperator::decompose(s.apply_signature(r + i1 * h), s);
}

inline BlockOperator scalar_block_example() {
  return assemble(mat({{0.0}}), mat({{1.0}}), mat({{1.0}}), mat({{-i1}}));
}

inline BlockOperator iJ() { return assemble(mat({{i1}}), mat({{0.0}}), mat({{0.0}}), mat({{-i1}})); }

inline BlockOperator triangular_example() { return assemble(mat({{i1}}), mat({{1.0}}), mat({{0.0}}), mat({{-i1}})); }

#define EXPECT_KREIN_ERROR(stmt, k)                                  \
  do {                                                               \
    try {                                                            \
      stmt;                                                          \
      ADD_FAILURE() << "expected " << ::krein::to_string(k);         \
    } catch (const ::krein::Error& e_) {                             \
      EXPECT_EQ(e_.kind(), k) << e_.what();                          \
    }                                                                \
  } while (0)

}  // namespace krein::test
