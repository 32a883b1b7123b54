#include <gtest/gtest.h>

#include "fitzrange/operators.hpp"
#include "fitzrange/random.hpp"

using namespace fitzrange;

namespace {

const MonotoneGraph kS = normal_cone(0, kInf);  // Example 1: subdifferential of the half-line indicator
const MonotoneGraph kT = normal_cone(0, 0);     // Example 1: subdifferential of the origin indicator

SetOnLine closed(double a, double b) { return SetOnLine(Interval::closed(a, b)); }

// Independent range formula: on the line the sum of two maximal monotone
// polyhedral graphs with overlapping domains is maximal monotone, so its
// range is the closed interval between the values at the two ends of the
// common domain. Unbounded ends are probed far beyond every vertex.
bool endpoint_contains(const MonotoneGraph& S, const MonotoneGraph& T, double p, double ps) {
  const auto Sp = S.shifted(p);
  const SetOnLine d = Sp.domain().intersect(T.domain());
  if (d.is_empty()) return false;
  const double a = std::max(d.inf(), -1e4), b = std::min(d.sup(), 1e4);
  const SetOnLine la = Sp.eval(a), ta = T.eval(a), lb = Sp.eval(b), tb = T.eval(b);
  const double lo = la.inf() + ta.inf(), hi = lb.sup() + tb.sup();
  return lo <= ps && ps <= hi;
}

}  // namespace

TEST(Operators, SubdifferentialExample1) {
  EXPECT_EQ(kS.eval(1), closed(0, 0));
  EXPECT_EQ(kS.eval(0), closed(-kInf, 0));
  EXPECT_TRUE(kS.eval(-1).is_empty());
  EXPECT_TRUE(kT.eval(0).is_whole_line());
  EXPECT_TRUE(kT.eval(0.5).is_empty());
  EXPECT_TRUE(maximality_check(kS));
  EXPECT_TRUE(maximality_check(kT));
}

TEST(Operators, SubdifferentialOfHalfSquareIsIdentity) {
  const auto J = from_subdifferential(PlqFunction::quadratic(0.5, 0, 0));
  for (double x : {-3.0, 0.0, 2.5}) EXPECT_EQ(J.eval(x), closed(x, x));
  EXPECT_EQ(J, duality_map());
}

TEST(Operators, SubdifferentialRejectsNonconvex) {
  EXPECT_THROW(from_subdifferential(PlqFunction::quadratic(-1, 0, 0)), std::invalid_argument);
}

TEST(Operators, DomainAndRange) {
  EXPECT_EQ(kS.domain(), closed(0, kInf));
  EXPECT_EQ(kS.range(), closed(-kInf, 0));
  EXPECT_EQ(kT.domain(), closed(0, 0));
  EXPECT_TRUE(kT.range().is_whole_line());
  EXPECT_TRUE(duality_map().domain().is_whole_line());
  EXPECT_TRUE(duality_map().range().is_whole_line());
}

TEST(Operators, NormalCones) {
  const auto whole = normal_cone(-kInf, kInf);
  EXPECT_EQ(whole.eval(3), closed(0, 0));
  const auto box = normal_cone(-1, 1);
  EXPECT_EQ(box.eval(0.5), closed(0, 0));
  EXPECT_EQ(box.eval(1), closed(0, kInf));
  EXPECT_EQ(box.eval(-1), closed(-kInf, 0));
  EXPECT_TRUE(box.eval(2).is_empty());
}

TEST(Operators, DualityMap) {
  const auto J = duality_map();
  EXPECT_EQ(J.eval(0), closed(0, 0));
  EXPECT_EQ(J.eval(2), closed(2, 2));
  EXPECT_TRUE(maximality_check(J));
}

TEST(Operators, Shift) {
  EXPECT_EQ(shift(kS, 0), kS);
  const auto s1 = shift(kS, 1);
  EXPECT_EQ(s1.eval(-1), closed(-kInf, 0));
  EXPECT_EQ(s1.domain(), closed(-1, kInf));
  EXPECT_TRUE(maximality_check(s1));
}

TEST(Operators, MaximalityDetectsGaps) {
  // s = x restricted to x in [0, 1].
  const MonotoneGraph piece({Segment{0, 2, 0, 0, 0.5}});
  EXPECT_FALSE(maximality_check(piece));
  EXPECT_THROW(MonotoneGraph({Segment{0, 2, 0, 0, 1.5}}), std::invalid_argument);
  EXPECT_THROW(MonotoneGraph({Segment{0, 2, 0, 0, 0.5}, Segment{3, 4, 3, -1, 0.5}}), std::invalid_argument);
}

TEST(Operators, SumRangeOracleExamples) {
  EXPECT_TRUE(sum_range_oracle(kS, kT, 0).is_whole_line());
  EXPECT_TRUE(sum_range_oracle(kS, duality_map(), 0).is_whole_line());
  const auto zero = normal_cone(-kInf, kInf);
  EXPECT_EQ(sum_range_oracle(zero, zero, 0), closed(0, 0));
  // Example 1 with p = -1: domains [1, inf) and {0} never meet.
  EXPECT_TRUE(sum_range_oracle(kS, kT, -1).is_empty());
  // Shifted domains touch only at x = 0, where the two opposite cones add up to R.
  EXPECT_EQ(sum_range_oracle(normal_cone(0, 1), normal_cone(0, 1), 1), closed(-kInf, kInf));
}

TEST(Operators, PotentialOfBuiltins) {
  EXPECT_TRUE(approx_equal(potential(kS), PlqFunction::indicator(0, kInf)));
  EXPECT_TRUE(approx_equal(potential(kT), PlqFunction::indicator(0, 0)));
  EXPECT_TRUE(approx_equal(potential(duality_map()), PlqFunction::quadratic(0.5, 0, 0)));
  const auto g = potential(from_subdifferential(PlqFunction::abs()));
  EXPECT_TRUE(approx_equal(g, PlqFunction::abs()));
}

TEST(OperatorsProperty, GraphOfSubdifferentialIsFenchelYoungEquality) {
  Rng rng(21);
  for (int i = 0; i < 80; ++i) {
    const auto f = random_convex_plq(rng);
    const auto fs = conjugate(f);
    const auto T = from_subdifferential(f);
    ASSERT_TRUE(maximality_check(T));
    for (double x = -5; x <= 5; x += 0.25) {
      const SetOnLine v = T.eval(x);
      for (double s = -6; s <= 6; s += 0.25) {
        const ExtReal gap = fenchel_young_gap(f, fs, x, s);
        EXPECT_EQ(v.contains(s), gap.is_finite() && std::abs(gap.value()) <= 1e-9)
            << f.to_string() << " x=" << x << " s=" << s;
      }
    }
  }
}

TEST(OperatorsProperty, PotentialRecoversGraph) {
  Rng rng(22);
  for (int i = 0; i < 200; ++i) {
    const auto T = random_maximal_graph(rng);
    const auto g = potential(T);
    ASSERT_TRUE(convexity_check(g)) << T.to_string();
    const auto back = from_subdifferential(g);
    for (double x = -12; x <= 12; x += 0.125)
      EXPECT_TRUE(approx_equal(back.eval(x), T.eval(x))) << T.to_string() << " x=" << x;
  }
}

TEST(OperatorsProperty, EvalIsMonotoneAndClosed) {
  Rng rng(23);
  for (int i = 0; i < 100; ++i) {
    const auto T = random_maximal_graph(rng);
    double prev = -kInf;
    for (double x = -12; x <= 12; x += 0.125) {
      const auto v = T.eval(x);
      if (v.is_empty()) continue;
      EXPECT_TRUE(v.is_single_closed_interval());
      EXPECT_LE(prev, v.inf());
      prev = v.sup();
    }
  }
}

TEST(OperatorsProperty, ShiftMovesDomainKeepsRange) {
  Rng rng(24);
  for (int i = 0; i < 100; ++i) {
    const auto T = random_maximal_graph(rng);
    const double p = rng.quantized(-2, 2, 0.25);
    const auto Tp = shift(T, p);
    EXPECT_EQ(Tp.domain(), T.domain().translated(-p));
    EXPECT_EQ(Tp.range(), T.range());
  }
}

TEST(OperatorsProperty, OracleMatchesEndpointFormulaAndRangeSum) {
  Rng rng(25);
  for (int i = 0; i < 150; ++i) {
    const auto S = random_maximal_graph(rng);
    const auto T = random_maximal_graph(rng);
    const double p = rng.quantized(-3, 3, 0.25);
    const auto R = sum_range_oracle(S, T, p);
    SetOnLine rsum;
    const SetOnLine rs = S.range(), rt = T.range();
    for (const auto& a : rs.components())
      for (const auto& b : rt.components()) rsum.add(minkowski_sum(a, b));
    for (double ps = -10; ps <= 10; ps += 0.125) {
      EXPECT_EQ(R.contains(ps), endpoint_contains(S, T, p, ps)) << S.to_string() << " | " << T.to_string() << " p=" << p
                                                             << " ps=" << ps;
      if (R.contains(ps)) EXPECT_TRUE(rsum.contains(ps));
    }
  }
}
