#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"
#include "lnv/linalg.hpp"
#include "lnv/netsys.hpp"
#include "lnv/rng.hpp"

using namespace lnv;
using namespace testing_helpers;

TEST(Architecture, ShapesAndGroups) {
  const Architecture a{{2, 3, 1}, false};
  a.validate();
  EXPECT_EQ(a.nvars(), 9u);
  EXPECT_EQ(a.width(), 1);
  EXPECT_EQ(a.layer_offset(1), 6u);
  const auto g = a.layer_groups();
  ASSERT_EQ(g.size(), 2u);
  EXPECT_EQ(g[0].size(), 6u);
  EXPECT_EQ(g[1].front(), 6u);
}

TEST(Architecture, ValidationErrors) {
  EXPECT_THROW((Architecture{{2, 2}, false}.validate()), ShapeMismatch);
  EXPECT_THROW((Architecture{{2, 0, 2}, false}.validate()), ShapeMismatch);
  EXPECT_THROW((Architecture{{2, 4, 2}, false}.validate()), ShapeMismatch);
  EXPECT_NO_THROW((Architecture{{2, 4, 2}, false}.validate(true)));
  EXPECT_THROW((Architecture{{2, 1, 2}, true}.validate()), NonSquareLayer);
}

TEST(TrainingData, ConformanceErrors) {
  const Architecture a{{2, 2, 2}, false};
  TrainingSet t{RealMatrix(2, 2), RealMatrix(1, 2)};
  EXPECT_THROW(check_conforms(a, t), ShapeMismatch);
  t.y = RealMatrix(2, 3);
  EXPECT_THROW(check_conforms(a, t), ShapeMismatch);
  t.y = RealMatrix(2, 2);
  t.x(0, 0) = NAN;
  EXPECT_THROW(check_conforms(a, t), ShapeMismatch);
}

TEST(TrainingData, RealizableIsDeterministicAndFullRank) {
  const Architecture a{{2, 2, 2}, false};
  const auto d1 = generate_realizable_data(a, 2, 7);
  const auto d2 = generate_realizable_data(a, 2, 7);
  EXPECT_EQ(d1.data, d2.data);
  EXPECT_NE(d1.data, generate_realizable_data(a, 2, 8).data);
  CVector teacher;
  for (const auto& w : d1.teacher)
    for (double v : w.values) teacher.emplace_back(v);
  EXPECT_EQ(numerical_rank(product_matrix(a, teacher), 1e-8), 2u);
  // the teacher is a zero of the loss
  const auto problem = make_problem(a, d1.data);
  EXPECT_LT(std::abs(evaluate(problem.loss, teacher_point(a, d1.teacher))), 1e-12);
}

TEST(Loss, MatchesOracleAtRandomPoints) {
  for (const bool residual : {false, true}) {
    const Architecture a{{2, 2, 2}, residual};
    const auto data = generate_realizable_data(a, 2, 3).data;
    const Polynomial loss = build_loss(a, data);
    const oracle::Net net{a.dims, residual};
    Rng rng(5);
    for (int k = 0; k < 20; ++k) {
      CVector w(a.nvars());
      for (auto& v : w) v = rng.complex_normal();
      const auto expect = oracle::loss(net, to_oracle(w), columns(data.x), columns(data.y));
      EXPECT_LT(std::abs(evaluate(loss, w) - expect), 1e-10 * (1 + std::abs(expect)));
    }
  }
}

TEST(Loss, HalfOutputEnergyAtOrigin) {
  const Architecture a{{2, 1, 2}, false};
  const auto data = generate_realizable_data(a, 2, 1).data;
  const auto p = make_problem(a, data);
  EXPECT_NEAR(evaluate(p.loss, CVector(a.nvars())).real(), half_output_energy(data), 1e-12);
}

TEST(Gradient, DegreesAndCount) {
  const Architecture a{{2, 2, 2}, false};
  const auto p = make_problem(a, generate_realizable_data(a, 2, 7).data);
  ASSERT_EQ(p.gradient.size(), 8u);
  for (int d : p.gradient.degrees()) EXPECT_EQ(d, 3);
}

TEST(Minors, VanishExactlyBelowRank) {
  const Architecture a{{2, 2, 2}, false};
  const PolySystem m1 = build_product_minors(a, 1);
  const PolySystem m2 = build_product_minors(a, 2);
  EXPECT_EQ(m1.size(), 4u);
  EXPECT_EQ(m2.size(), 1u);
  // W1 of rank one makes the product rank one
  const CVector rank1 = {1.0, 2.0, 2.0, 4.0, 0.5, -1.0, 3.0, 1.0};
  EXPECT_LT(norm_inf(m2.evaluate(rank1)), 1e-12);
  EXPECT_GT(norm_inf(m1.evaluate(rank1)), 1e-3);
  EXPECT_THROW(build_product_minors(a, 3), RankOutOfRange);
}

TEST(Residual, ShiftRoundTrip) {
  const Architecture a{{2, 2, 2}, true};
  Rng rng(2);
  CVector w(a.nvars());
  for (auto& v : w) v = rng.complex_normal();
  const CVector back =
      residual_shift(residual_shift(w, a, ShiftDirection::to_plain), a, ShiftDirection::to_residual);
  for (std::size_t i = 0; i < w.size(); ++i) EXPECT_LT(std::abs(back[i] - w[i]), 1e-15);
  const auto p = make_problem(a, generate_realizable_data(a, 2, 7).data);
  // residual origin is -I per layer
  const CVector o = p.plain_origin();
  EXPECT_EQ(o[0], Complex(-1.0));
  EXPECT_EQ(o[1], Complex(0.0));
  EXPECT_LT(std::abs(evaluate(p.loss, o) - half_output_energy(p.data)), 1e-12);
}

TEST(Width1Oracle, MatchesCombinatorics) {
  const Architecture a{{1, 1, 1, 1, 1}, false};
  const auto exp = width1_oracle(a, single_datum(1.0, 2.0));
  const auto ref = oracle::width1_expectation(4);
  ASSERT_EQ(exp.size(), 2u);
  EXPECT_EQ(exp[0].dim, ref.minimum_dim);
  EXPECT_EQ(exp[0].degree, ref.minimum_degree);
  EXPECT_EQ(exp[1].dim, ref.plane_dim);
  EXPECT_EQ(exp[1].count, ref.plane_count);
  EXPECT_THROW(width1_oracle(Architecture{{2, 1, 2}, false}, TrainingSet{}), NotWidthOne);
}
