#include <gtest/gtest.h>

#include <cmath>

#include "lnv/poly.hpp"
#include "lnv/rng.hpp"

using namespace lnv;

namespace {

Polynomial x(std::size_t n, std::size_t i) { return Polynomial::variable(n, i); }
Polynomial c(std::size_t n, Complex v) { return Polynomial::constant(n, v); }

}  // namespace

TEST(Poly, ArithmeticAndEvaluation) {
  // (x0 + 2 x1)^2 - 3
  const Polynomial p = (x(2, 0) + x(2, 1) * 2.0) * (x(2, 0) + x(2, 1) * 2.0) - c(2, 3.0);
  EXPECT_EQ(p.total_degree(), 2);
  EXPECT_EQ(p.term_count(), 4u);
  const CVector pt = {Complex(1, 1), Complex(0.5, -2)};
  const Complex s = pt[0] + 2.0 * pt[1];
  EXPECT_LT(std::abs(evaluate(p, pt) - (s * s - 3.0)), 1e-13);
}

TEST(Poly, CancellationDropsTerms) {
  const Polynomial p = x(3, 1) - x(3, 1);
  EXPECT_TRUE(p.is_zero());
}

TEST(Poly, Differentiate) {
  // d/dx0 of x0^3 x1 + x1^2 = 3 x0^2 x1
  const Polynomial p = x(2, 0) * x(2, 0) * x(2, 0) * x(2, 1) + x(2, 1) * x(2, 1);
  const Polynomial d = differentiate(p, 0);
  EXPECT_EQ(d, x(2, 0) * x(2, 0) * x(2, 1) * 3.0);
  EXPECT_TRUE(differentiate(c(2, 5.0), 1).is_zero());
}

TEST(Poly, DegreeInGroup) {
  const Polynomial p = x(3, 0) * x(3, 1) * x(3, 1) + x(3, 2);
  const std::vector<std::size_t> g = {1, 2};
  EXPECT_EQ(p.degree_in(g), 2);
}

TEST(Poly, GrlexOrder) {
  GrlexLess less;
  EXPECT_TRUE(less({0, 1}, {1, 0}));     // same degree, x0 larger
  EXPECT_TRUE(less({2, 0}, {1, 2}));     // lower total degree first
  EXPECT_FALSE(less({1, 1}, {1, 1}));
}

TEST(Poly, TextRoundTripIsExact) {
  Rng rng(4);
  Polynomial p(3);
  for (int k = 0; k < 12; ++k)
    p.add_term({static_cast<Exponent>(k % 3), static_cast<Exponent>(k % 2), static_cast<Exponent>(k / 5)},
               rng.complex_normal());
  const Polynomial q = polynomial_from_text(to_text(p), 3);
  EXPECT_EQ(p, q);
  EXPECT_EQ(to_text_terms(p), to_text_terms(q));
}

TEST(Poly, ParseComplexRejectsGarbage) {
  EXPECT_EQ(parse_complex("1.5,-2"), Complex(1.5, -2));
  EXPECT_THROW(parse_complex("1.5"), Error);
  EXPECT_THROW(parse_complex("a,b"), Error);
}

TEST(Poly, Homogenize) {
  // x0^2 + x1 - 1 to degree 3: x0^2 h + x1 h^2 - h^3
  const Polynomial p = x(2, 0) * x(2, 0) + x(2, 1) - c(2, 1.0);
  const Polynomial h = homogenize(p, 3);
  EXPECT_EQ(h.nvars(), 3u);
  for (const auto& [m, coef] : h.terms()) EXPECT_EQ(total_degree(m), 3);
  // dehomogenizes back at h = 1
  const CVector pt = {Complex(0.3, 1), Complex(-2, 0.5)};
  EXPECT_LT(std::abs(evaluate(h, CVector{pt[0], pt[1], 1.0}) - evaluate(p, pt)), 1e-13);
  EXPECT_THROW(homogenize(p, 1), Error);
}

TEST(Poly, JacobianMatchesFiniteDifferences) {
  const Polynomial f0 = x(2, 0) * x(2, 0) * x(2, 1) - c(2, 2.0);
  const Polynomial f1 = x(2, 0) + x(2, 1) * x(2, 1) * x(2, 1);
  const PolySystem sys({f0, f1});
  const CVector p = {Complex(0.7, -0.2), Complex(1.1, 0.4)};
  const CMatrix j = jacobian_at(sys, p);
  const double h = 1e-6;
  for (std::size_t v = 0; v < 2; ++v) {
    CVector a = p, b = p;
    a[v] += h;
    b[v] -= h;
    const CVector fa = sys.evaluate(a), fb = sys.evaluate(b);
    for (std::size_t e = 0; e < 2; ++e) EXPECT_LT(std::abs((fa[e] - fb[e]) / (2 * h) - j(e, v)), 1e-8);
  }
}

TEST(Poly, EvaluatorAgreesWithDirectEvaluation) {
  Rng rng(9);
  std::vector<Polynomial> ps;
  for (int e = 0; e < 3; ++e) {
    Polynomial p(4);
    for (int k = 0; k < 10; ++k)
      p.add_term({static_cast<Exponent>(rng.next() % 3), static_cast<Exponent>(rng.next() % 3),
                  static_cast<Exponent>(rng.next() % 2), static_cast<Exponent>(rng.next() % 2)},
                 rng.complex_normal());
    ps.push_back(p);
  }
  const PolySystem sys(ps);
  CVector pt(4);
  for (auto& v : pt) v = rng.complex_normal();
  const CVector vals = sys.evaluate(pt);
  for (std::size_t e = 0; e < 3; ++e) EXPECT_LT(std::abs(vals[e] - evaluate(ps[e], pt)), 1e-12);
}

TEST(Poly, ScaledResidualIsRelative) {
  // 1e8 (x - 1): an absolute residual of 1e-8 at x = 1 + 1e-16 is roundoff
  const PolySystem sys({(x(1, 0) - c(1, 1.0)) * 1e8});
  EXPECT_LT(scaled_residual(sys, CVector{1.0 + 1e-16}), 1e-14);
  EXPECT_GT(scaled_residual(sys, CVector{1.1}), 1e-3);
}

TEST(Poly, MixedVariableCountsThrow) {
  EXPECT_THROW(x(2, 0) + x(3, 0), Error);
}
