#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"
#include "lnv/landscape.hpp"

using namespace lnv;
using namespace testing_helpers;

namespace {

struct Solved {
  NetProblem problem;
  Decomposition decomposition;
  LandscapeAnalysis analysis;
};

Solved solve(const Architecture& a, const TrainingSet& data, int samples = 5) {
  Solved s;
  s.problem = make_problem(a, data);
  s.decomposition = decompose(s.problem.gradient, DecomposeOptions{});
  s.analysis = analyze(s.decomposition, s.problem, samples, 17, TrackSettings{});
  return s;
}

}  // namespace

TEST(Landscape, OneOneOneCurveAndOrigin) {
  const auto s = solve({{1, 1, 1}, false}, single_datum(1.0, 1.0));
  ASSERT_EQ(s.analysis.components.size(), 2u);
  const auto& curve = s.analysis.components[0];
  const auto& origin = s.analysis.components[1];
  EXPECT_EQ(curve.dim, 1);
  EXPECT_EQ(curve.degree, 2u);
  EXPECT_LT(std::abs(curve.pseudo_loss), 1e-8);
  EXPECT_EQ(curve.contains_origin, Membership::not_member);
  EXPECT_EQ(curve.classification, Classification::global_minimum);
  EXPECT_EQ(origin.dim, 0);
  EXPECT_LT(std::abs(origin.pseudo_loss - 0.5), 1e-8);
  EXPECT_EQ(origin.contains_origin, Membership::member);
  EXPECT_EQ(verify_h2(s.analysis).verdict, Verdict::verified);
  EXPECT_EQ(verify_h3(s.analysis).verdict, Verdict::verified);
}

TEST(Landscape, ZeroCountAndProductRank) {
  const Architecture a{{1, 1, 1}, false};
  const auto p = make_problem(a, single_datum(1.0, 1.0));
  // on the curve w1 w2 = 1 the Hessian is g g^T with one zero eigenvalue
  EXPECT_EQ(zero_eig_count(p.plain_loss, CVector{2.0, 0.5}), 1);
  EXPECT_EQ(zero_eig_count(p.plain_loss, CVector{0.0, 0.0}), 0);
  EXPECT_EQ(product_rank(a, CVector{2.0, 0.5}), 1);
  EXPECT_EQ(product_rank(a, CVector{0.0, 3.0}), 0);
}

TEST(Landscape, Width1EigenvalueLaw) {
  const Architecture a{{1, 1, 1, 1}, false};
  const auto p = make_problem(a, single_datum(1.0, 2.0));
  const CVector w = {Complex(0.5, 0.2), 2.0, 0.0};
  CVector pt = w;
  pt[2] = 2.0 / (w[0] * w[1]);
  const auto spec = hessian_spectrum(p.plain_loss, pt);
  const auto expect = oracle::width1_eigenvalue(to_oracle(pt), 2.0);
  int nonzero = 0;
  for (const auto& z : spec)
    if (std::abs(z) > 1e-8) {
      ++nonzero;
      EXPECT_LT(std::abs(z - expect), 1e-9 * std::abs(expect));
    }
  EXPECT_EQ(nonzero, 1);
}

TEST(Landscape, TwoOneTwoStructureAndHypotheses) {
  const Architecture a{{2, 1, 2}, false};
  const auto s = solve(a, generate_realizable_data(a, 2, 7).data);
  ASSERT_EQ(s.analysis.components.size(), 3u);
  int through_origin = 0, minima = 0;
  for (const auto& c : s.analysis.components) {
    EXPECT_TRUE(c.ok()) << c.error;
    EXPECT_EQ(c.dim, 1);
    if (c.contains_origin == Membership::member) {
      ++through_origin;
      EXPECT_EQ(c.degree, 1u);
      EXPECT_LT(std::abs(c.pseudo_loss - s.analysis.half_output_energy), 1e-6 * s.analysis.half_output_energy);
    }
    if (c.classification == Classification::global_minimum) {
      ++minima;
      EXPECT_EQ(c.degree, 2u);
    }
  }
  EXPECT_EQ(through_origin, 2);
  EXPECT_EQ(minima, 1);
  EXPECT_EQ(verify_h2(s.analysis).verdict, Verdict::verified);
  EXPECT_EQ(verify_h3(s.analysis).verdict, Verdict::verified);
  // at the origin one zero eigenvalue, the largest dimension through it
  EXPECT_GE(s.analysis.origin.zero_eig_count, 1);

  const auto strata = compute_strata(s.problem, DecomposeOptions{}, 5, 21);
  ASSERT_EQ(strata.size(), 1u);
  EXPECT_EQ(verify_h1(s.problem, s.decomposition, s.analysis, strata, TrackSettings{}, 21).verdict, Verdict::verified);
}

TEST(Landscape, CorruptSampleViolatesH2) {
  auto s = solve({{1, 1, 1}, false}, single_datum(1.0, 1.0));
  auto& curve = s.analysis.components[0];
  curve.samples[1] = analyze_sample(s.problem, CVector{1.0, 3.0});
  summarize(curve, s.analysis.half_output_energy);
  EXPECT_EQ(verify_h2(s.analysis).verdict, Verdict::violated);
}

TEST(Landscape, UnknownOriginMembershipIsIndeterminate) {
  auto s = solve({{1, 1, 1}, false}, single_datum(1.0, 1.0));
  s.analysis.components[1].contains_origin = Membership::indeterminate;
  const auto r = verify_h2(s.analysis);
  EXPECT_EQ(r.verdict, Verdict::indeterminate);
  EXPECT_FALSE(r.stage.empty());
}

TEST(Landscape, ResidualEquivalenceOnWidthOne) {
  const TrainingSet data = single_datum(1.0, 2.0);
  const auto plain = solve({{1, 1, 1}, false}, data);
  const auto resid = solve({{1, 1, 1}, true}, data);
  const auto r = verify_residual(plain.problem, plain.decomposition, resid.problem, resid.decomposition, 3,
                                 TrackSettings{}, 5);
  EXPECT_EQ(r.verdict, Verdict::verified);
  EXPECT_THROW(verify_residual(plain.problem, plain.decomposition, plain.problem, plain.decomposition, 3,
                               TrackSettings{}, 5),
               Error);
}
