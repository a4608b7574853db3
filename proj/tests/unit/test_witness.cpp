#include <gtest/gtest.h>

#include "lnv/witness.hpp"

using namespace lnv;

namespace {

Polynomial var(std::size_t n, std::size_t i) { return Polynomial::variable(n, i); }
Polynomial cst(std::size_t n, Complex v) { return Polynomial::constant(n, v); }

// x y = 0, x z = 0: the plane x = 0 and the line y = z = 0
PolySystem plane_and_line() { return PolySystem({var(3, 0) * var(3, 1), var(3, 0) * var(3, 2)}); }

}  // namespace

TEST(Randomize, ShapeAndDegrees) {
  const PolySystem sys({var(3, 0) * var(3, 1) * var(3, 2), var(3, 0) - cst(3, 1.0), var(3, 1) * var(3, 1)});
  const auto r = randomize(sys, 2, 4);
  EXPECT_EQ(r.system.size(), 2u);
  EXPECT_EQ(r.matrix.rows(), 2u);
  EXPECT_EQ(r.matrix.cols(), 3u);
  // highest-degree equations lead
  EXPECT_EQ(r.system.degrees(), (std::vector<int>{3, 2}));
  EXPECT_THROW(randomize(sys, 4, 1), Error);
}

TEST(Slices, ThroughPoint) {
  const CVector p = {1.0, Complex(0, 2), -3.0};
  const auto s = SliceSystem::random_through(p, 2, 7);
  EXPECT_LT(norm_inf(s.evaluate(p)), 1e-12);
  const CVector q = {0.5, 0.5, 0.5};
  EXPECT_LT(norm_inf(s.parallel_through(q).evaluate(q)), 1e-12);
}

TEST(WitnessSets, PlaneAndLine) {
  WitnessOptions o;
  const auto dims = compute_all_dims(plane_and_line(), 0, 2, o, 11);
  ASSERT_TRUE(dims.count(2));
  ASSERT_TRUE(dims.count(1));
  EXPECT_EQ(dims.at(2).witness.points.size(), 1u);
  EXPECT_EQ(dims.at(1).witness.points.size(), 1u);
  EXPECT_EQ(dims.at(0).witness.points.size(), 0u);
  // the dimension-1 superset also meets the plane; those points are junk
  EXPECT_GE(dims.at(1).junk, 1u);
  for (const auto& p : dims.at(1).witness.points) {
    EXPECT_LT(std::abs(p[1]), 1e-9);
    EXPECT_LT(std::abs(p[2]), 1e-9);
  }
}

TEST(Membership, PointsOnAndOffThePlane) {
  WitnessOptions o;
  const auto dims = compute_all_dims(plane_and_line(), 2, 2, o, 3);
  const WitnessSet& plane = dims.at(2).witness;
  const TrackSettings s;
  EXPECT_EQ(contains_point(plane, CVector{0.0, 1.5, Complex(0, -2)}, s, 1), Membership::member);
  EXPECT_EQ(contains_point(plane, CVector{1.0, 0.0, 0.0}, s, 1), Membership::not_member);
}

TEST(WitnessSets, IrreducibleCurveDegree) {
  // x y = 1 in the plane: one curve of degree two
  WitnessOptions o;
  const auto dims = compute_all_dims(PolySystem({var(2, 0) * var(2, 1) - cst(2, 1.0)}), 0, 1, o, 5);
  EXPECT_EQ(dims.at(1).witness.points.size(), 2u);
  EXPECT_EQ(dims.at(0).witness.points.size(), 0u);
}

TEST(WitnessSets, SeedDoesNotChangeCardinality) {
  WitnessOptions o;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto dims = compute_all_dims(plane_and_line(), 0, 2, o, seed);
    EXPECT_EQ(dims.at(2).witness.points.size(), 1u);
    EXPECT_EQ(dims.at(1).witness.points.size(), 1u);
  }
}
