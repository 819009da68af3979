#include <gtest/gtest.h>

#include <limits>
#include <random>

#include "linfcomp/unfold.hpp"
#include "test_support.hpp"

using namespace linfcomp;
namespace lt = linfcomp::testing;

TEST(CellPoint, Validates) {
  EXPECT_NO_THROW(CellPoint(0, {1.0, 0.3}));
  EXPECT_THROW(CellPoint(0, {0.9, 0.3}), InvalidArgument);
  EXPECT_THROW(CellPoint(2, {1.0, 0.3}), InvalidArgument);
  EXPECT_THROW(CellPoint(0, {1.0, 1.3}), OutOfRange);
  const auto p = CellPoint::from(Composition({2, 8, 4}));
  EXPECT_EQ(p.cell(), 1u);
  EXPECT_EQ(lt::to_vector(p.coords()), (std::vector<double>{0.25, 1.0, 0.5}));
}

TEST(RotateCell, Examples) {
  for (double y : {0.0, 0.3, 1.0}) {
    EXPECT_EQ(rotate_cell(CellPoint(0, {1.0, y}), 1), (std::vector<double>{2.0 - y, 1.0}));
  }
  EXPECT_EQ(rotate_cell(CellPoint(0, {1.0, 0.3}), 1), (std::vector<double>{1.7, 1.0}));
  EXPECT_EQ(rotate_cell(CellPoint(1, {1.0, 1.0}), 0), (std::vector<double>{1.0, 1.0}));
  EXPECT_EQ(rotate_cell(CellPoint(1, {0.4, 1.0, 0.7}), 0), (std::vector<double>{1.0, 1.6, 0.7}));
  EXPECT_THROW(rotate_cell(CellPoint(1, {0.4, 1.0}), 1), SameCell);
}

TEST(RotateCell, InverseFormulaRecoversInput) {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t size = 2 + trial % 6;
    const auto p = CellPoint::from(lt::random_composition(rng, size));
    ComponentIndex i = lt::uniform_index(rng, size);
    if (i == p.cell()) i = (i + 1) % size;
    auto r = rotate_cell(p, i);
    const ComponentIndex j = p.cell();
    r[i] = 2.0 - r[j];
    r[j] = 1.0;
    // 2 - (2 - x) is exact up to one rounding at magnitude 2.
    EXPECT_LE(lt::max_abs_diff(r, lt::to_vector(p.coords())), std::numeric_limits<double>::epsilon() * 2);
  }
}

TEST(UnfoldChart, Examples) {
  EXPECT_EQ(unfold_chart({1, 0.3, 0.8}, 0), (std::vector<double>{0.3, 0.8}));
  EXPECT_EQ(unfold_chart({1, 0.3}, 1), (std::vector<double>{1.7}));
  const auto w = unfold_chart({0.4, 1, 0.7}, 0);
  ASSERT_EQ(w.size(), 2u);
  EXPECT_DOUBLE_EQ(w[0], 1.6);
  EXPECT_DOUBLE_EQ(w[1], 1.12);
  for (double y : {0.0, 0.3, 1.0}) {
    EXPECT_EQ(unfold_chart(Composition({1.0, y}), 1), (std::vector<double>{2.0 - y}));
  }
}

TEST(UnfoldInverse, Examples) {
  EXPECT_EQ(unfold_inverse(std::vector<double>{0.3, 0.8}, 0), Composition({1, 0.3, 0.8}));
  const auto x = unfold_inverse(std::vector<double>{1.6, 1.12}, 0);
  EXPECT_LT(lt::max_abs_diff(lt::to_vector(x.values()), {0.4, 1.0, 0.7}), 1e-15);
  EXPECT_EQ(unfold_inverse(std::vector<double>{1, 1, 1}, 2), Composition({1, 1, 1, 1}));
  EXPECT_THROW(unfold_inverse(std::vector<double>{2.5, 0.1}, 0), OutOfRange);
  EXPECT_THROW(unfold_inverse(std::vector<double>{-0.1, 0.1}, 0), OutOfRange);
}

TEST(Unfold, RoundTripRangeAndTiling) {
  std::mt19937_64 rng(62);
  for (int trial = 0; trial < 5000; ++trial) {
    const std::size_t size = 2 + trial % 9;
    auto v = lt::random_values(rng, size);
    if (trial % 5 == 0) v = lt::with_planted_tie(rng, v);
    const Composition x(v);
    const ComponentIndex i = lt::uniform_index(rng, size);
    const auto w = unfold_chart(x, i);
    for (double c : w) {
      EXPECT_GE(c, 0.0);
      EXPECT_LE(c, 2.0);
    }
    EXPECT_TRUE(projectively_equal(unfold_inverse(w, i), x, 1e-10));
    const auto label = assign_cell(x);
    if (!label.tied) EXPECT_EQ(unfolded_region(w, i), label.cell);
  }
}

TEST(Unfold, TwoDimensionalStretchMatchesFigureParametrization) {
  // Rotated height u = 2 - x_0 = 1.75; the remaining coordinate is scaled by u.
  const auto w = unfold_chart({0.25, 1.0, 0.5}, 0);
  EXPECT_DOUBLE_EQ(w[0], 1.75);
  EXPECT_DOUBLE_EQ(w[1], 1.75 * 0.5);
}
