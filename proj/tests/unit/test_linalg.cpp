#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "lnv/linalg.hpp"
#include "lnv/rng.hpp"
#include "oracles.hpp"

using namespace lnv;

namespace {

CMatrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
  Rng rng(seed);
  CMatrix m(r, c);
  for (auto& v : m.data()) v = rng.complex_normal();
  return m;
}

}  // namespace

TEST(Linalg, LuSolvesRandomSystems) {
  for (std::uint64_t s = 1; s <= 10; ++s) {
    const CMatrix a = random_matrix(6, 6, s);
    Rng rng(s, 99);
    CVector x(6);
    for (auto& v : x) v = rng.complex_normal();
    const CVector b = a * std::span<const Complex>(x);
    const CVector got = solve_linear(a, b);
    for (std::size_t i = 0; i < 6; ++i) EXPECT_LT(std::abs(got[i] - x[i]), 1e-10);
  }
}

TEST(Linalg, SingularMatrixThrows) {
  CMatrix a{{1.0, 2.0}, {2.0, 4.0}};
  EXPECT_THROW(LuFactorization{a}, SingularMatrix);
}

TEST(Linalg, InverseTimesMatrixIsIdentity) {
  const CMatrix a = random_matrix(5, 5, 3);
  const CMatrix p = LuFactorization(a).inverse() * a;
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) EXPECT_LT(std::abs(p(i, j) - (i == j ? 1.0 : 0.0)), 1e-10);
}

TEST(Linalg, SingularValuesOfDiagonal) {
  CMatrix a{{3.0, 0.0, 0.0}, {0.0, Complex(0.0, -5.0), 0.0}};
  const auto s = singular_values(a);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_NEAR(s[0], 5.0, 1e-12);
  EXPECT_NEAR(s[1], 3.0, 1e-12);
}

TEST(Linalg, SvdReconstructs) {
  const CMatrix a = random_matrix(4, 3, 8);
  const Svd d = svd(a);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      Complex acc{};
      for (std::size_t k = 0; k < d.sigma.size(); ++k) acc += d.u(i, k) * d.sigma[k] * std::conj(d.v(j, k));
      EXPECT_LT(std::abs(acc - a(i, j)), 1e-10);
    }
}

TEST(Linalg, NumericalRank) {
  CMatrix a{{1.0, 2.0}, {2.0, 4.0 + 1e-12}};
  EXPECT_EQ(numerical_rank(a, 1e-8), 1u);
  EXPECT_EQ(numerical_rank(CMatrix(3, 3), 1e-8), 0u);
  EXPECT_EQ(numerical_rank(random_matrix(4, 4, 2), 1e-8), 4u);
}

TEST(Linalg, EigenvaluesMatchEigen) {
  for (std::uint64_t s = 1; s <= 8; ++s) {
    const CMatrix a = random_matrix(7, 7, s);
    auto mine = eigenvalues(a);
    std::vector<oracle::cd> flat(a.data().begin(), a.data().end());
    auto ref = oracle::eigenvalues(flat, 7);
    ASSERT_EQ(mine.size(), ref.size());
    // greedy matching; eigenvalues of a random matrix are well separated
    for (const auto& z : ref) {
      auto it = std::min_element(mine.begin(), mine.end(),
                                 [&](Complex p, Complex q) { return std::abs(p - z) < std::abs(q - z); });
      EXPECT_LT(std::abs(*it - z), 1e-9 * (1 + std::abs(z)));
      mine.erase(it);
    }
  }
}

TEST(Linalg, EigenvaluesOfSymmetricRankOne) {
  // g g^T has eigenvalues g^T g and zeros, without conjugation
  const CVector g = {Complex(1, 1), 2.0, Complex(0, -1)};
  CMatrix a(3, 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) a(i, j) = g[i] * g[j];
  const auto ev = eigenvalues(a);
  const Complex expect = g[0] * g[0] + g[1] * g[1] + g[2] * g[2];
  int zeros = 0, hits = 0;
  for (const auto& z : ev) {
    if (std::abs(z) < 1e-10) ++zeros;
    if (std::abs(z - expect) < 1e-10) ++hits;
  }
  EXPECT_EQ(zeros, 2);
  EXPECT_EQ(hits, 1);
}

TEST(Linalg, PseudoSolveMinimumNorm) {
  CMatrix a{{1.0, 1.0}};
  const CVector x = pseudo_solve(a, CVector{2.0}, 1e-12);
  EXPECT_LT(std::abs(x[0] - 1.0), 1e-12);
  EXPECT_LT(std::abs(x[1] - 1.0), 1e-12);
}

TEST(Linalg, ShapeMismatchThrows) {
  EXPECT_THROW(CMatrix(2, 3) * CMatrix(2, 3), DimensionMismatch);
}
