#include <gtest/gtest.h>

#include <set>

#include "lnv/nid.hpp"

using namespace lnv;

namespace {

Polynomial var(std::size_t n, std::size_t i) { return Polynomial::variable(n, i); }
Polynomial cst(std::size_t n, Complex v) { return Polynomial::constant(n, v); }

}  // namespace

TEST(Decompose, PlaneAndLine) {
  const PolySystem sys({var(3, 0) * var(3, 1), var(3, 0) * var(3, 2)});
  const auto d = decompose(sys, DecomposeOptions{});
  EXPECT_FALSE(d.provisional);
  ASSERT_EQ(d.components.size(), 2u);
  EXPECT_EQ(d.components[0].dim, 2);
  EXPECT_EQ(d.components[0].degree(), 1u);
  EXPECT_EQ(d.components[1].dim, 1);
  EXPECT_TRUE(d.components[0].certified);
  EXPECT_TRUE(d.components[1].certified);
}

TEST(Decompose, TwoConicsSplit) {
  // (x^2 + y^2 - 1)(x - y) = 0 in the plane: a conic and a line
  const Polynomial circle = var(2, 0) * var(2, 0) + var(2, 1) * var(2, 1) - cst(2, 1.0);
  const PolySystem sys({circle * (var(2, 0) - var(2, 1))});
  const auto d = decompose(sys, DecomposeOptions{});
  ASSERT_EQ(d.components.size(), 2u);
  EXPECT_EQ(d.components[0].degree(), 1u);
  EXPECT_EQ(d.components[1].degree(), 2u);
}

TEST(TraceTest, FullGroupOnlyIsLinear) {
  const PolySystem sys({var(2, 0) * var(2, 1) - cst(2, 1.0)});
  const auto d = decompose(sys, DecomposeOptions{});
  ASSERT_EQ(d.components.size(), 1u);
  const WitnessSet& ws = d.components[0].witness;
  const TrackSettings s;
  const std::vector<std::size_t> both = {0, 1}, one = {0};
  EXPECT_TRUE(trace_test(both, ws, s, 3));
  EXPECT_FALSE(trace_test(one, ws, s, 3));
}

TEST(Monodromy, HyperbolaIsOneOrbit) {
  const PolySystem sys({var(2, 0) * var(2, 1) - cst(2, 1.0)});
  const auto d = decompose(sys, DecomposeOptions{});
  ASSERT_EQ(d.dimensions.front().dim, 1);
  const auto br = monodromy_breakup(d.dimensions.front().witness, 10, 4, TrackSettings{});
  EXPECT_TRUE(br.complete);
  ASSERT_EQ(br.groups.size(), 1u);
  EXPECT_EQ(br.groups[0].size(), 2u);
}

TEST(Sampling, SamplesSatisfyTheSystemAndDiffer) {
  const PolySystem sys({var(2, 0) * var(2, 1) - cst(2, 1.0)});
  const auto d = decompose(sys, DecomposeOptions{});
  const auto& comp = d.components[0];
  const TrackSettings s;
  const CVector a = sample_point(comp, 1, s), b = sample_point(comp, 2, s);
  EXPECT_LT(std::abs(a[0] * a[1] - 1.0), 1e-9);
  EXPECT_LT(std::abs(b[0] * b[1] - 1.0), 1e-9);
  EXPECT_GT(norm_inf(CVector{a[0] - b[0], a[1] - b[1]}), 1e-3);
  EXPECT_EQ(membership_test(a, comp, s, 9), Membership::member);
  EXPECT_EQ(membership_test(CVector{0.0, 0.0}, comp, s, 9), Membership::not_member);
}

TEST(ComponentIds, StableAndOrdered) {
  const PolySystem sys({var(3, 0) * var(3, 1), var(3, 0) * var(3, 2)});
  const auto a = decompose(sys, DecomposeOptions{});
  const auto b = decompose(sys, DecomposeOptions{});
  ASSERT_EQ(a.components.size(), b.components.size());
  for (std::size_t i = 0; i < a.components.size(); ++i) EXPECT_EQ(a.components[i].id, b.components[i].id);
  EXPECT_EQ(a.components[0].id.rfind("d2-k1-", 0), 0u);
  EXPECT_NE(a.find(a.components[1].id), nullptr);
  EXPECT_EQ(a.find("nope"), nullptr);
}

TEST(Decompose, DegreeSumIsSeedIndependent) {
  const Polynomial circle = var(2, 0) * var(2, 0) + var(2, 1) * var(2, 1) - cst(2, 1.0);
  const PolySystem sys({circle * (var(2, 0) - var(2, 1))});
  std::set<std::size_t> sums;
  for (std::uint64_t seed : {1u, 5u, 9u}) {
    DecomposeOptions o;
    o.seed = seed;
    std::size_t s = 0;
    for (const auto& c : decompose(sys, o).components) s += c.degree();
    sums.insert(s);
  }
  EXPECT_EQ(sums, (std::set<std::size_t>{3}));
}
