#include <gtest/gtest.h>

#include "fitzrange/random.hpp"
#include "fitzrange/verify.hpp"

using namespace fitzrange;

namespace {

MonotoneGraph sub(const PlqFunction& f) { return from_subdifferential(f); }
MonotoneGraph example1_S() { return sub(PlqFunction::indicator(0, kInf)); }
MonotoneGraph example1_T() { return sub(PlqFunction::indicator(0, 0)); }
PlqFunction half_square() { return PlqFunction::quadratic(0.5, 0, 0); }

std::vector<double> grid(double lo, double hi, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(lo + (hi - lo) * i / (n - 1));
  return v;
}

VerifyConfig fitzpatrick_cfg() {
  VerifyConfig c;
  c.rep_S = c.rep_T = RepresentativeKind::kFitzpatrick;
  return c;
}

MonotoneGraph random_staircase(Rng& rng) {
  const int k = rng.integer(1, 4);
  std::vector<std::pair<double, double>> v;
  double x = rng.quantized(-3, 3, 0.5), s = rng.quantized(-3, 3, 0.5);
  v.emplace_back(x, s);
  for (int i = 1; i < k; ++i) {
    if (rng.coin()) x += rng.quantized(0.5, 2, 0.5);
    else s += rng.quantized(0.5, 2, 0.5);
    v.emplace_back(x, s);
  }
  const Direction left = rng.coin() ? Direction{0, 1} : Direction{1, 0};
  const Direction right = rng.coin() ? Direction{0, 1} : Direction{1, 0};
  return MonotoneGraph::polyline(v, left, right);
}

}  // namespace

TEST(RangeMembership, Example1Queries) {
  const auto S = example1_S(), T = example1_T();
  const auto yes = range_membership(S, T, 0, 1);
  EXPECT_EQ(yes.verdict, Verdict::kYes) << yes.reason;
  EXPECT_EQ(yes.value.value(), 0.0);
  EXPECT_TRUE(yes.oracle);
  EXPECT_EQ(yes.route, Route::kSeparable);

  const auto no = range_membership(S, T, -1, 0);
  EXPECT_EQ(no.verdict, Verdict::kNo);
  EXPECT_FALSE(no.oracle);
  EXPECT_FALSE(no.domain_clause);

  const auto poly = range_membership(S, T, 0, 1, fitzpatrick_cfg());
  EXPECT_EQ(poly.route, Route::kPolyhedral);
  EXPECT_EQ(poly.verdict, Verdict::kYes) << poly.reason;
}

TEST(RangeMembership, SymmetricQuadratics) {
  const auto S = sub(half_square());
  const auto r = range_membership(S, S, 0, 0);
  ASSERT_EQ(r.verdict, Verdict::kYes);
  ASSERT_TRUE(r.witness);
  EXPECT_NEAR((*r.witness)[0], 0.0, 1e-12);
  EXPECT_NEAR((*r.witness)[1], 0.0, 1e-12);
  EXPECT_NEAR(r.residuals->first, 0.0, 1e-12);
  EXPECT_NEAR(r.residuals->second, 0.0, 1e-12);
}

TEST(RangeMembership, Example1InfConvolutionIsIndicatorOfHalfLine) {
  const auto phiS = fitzpatrick_fn(example1_S());
  const auto phiT = fitzpatrick_fn(example1_T());
  const auto a = conjugate_bivariate(phiS);
  const auto b = conjugate_bivariate(hat_transform(phiT));
  const VerifyConfig cfg;
  for (double ps : {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0}) {
    for (double xs : {-3.0, 0.0, 1.5}) {
      for (double x : {-2.0, -0.25, 0.0, 0.25, 3.0}) {
        // (u*, u) -> a((x*, x) - (u*, u)) + b(u*, u) + p* u
        const auto m = minimize_pair(a, {xs, x}, -1.0, b, {0.0, ps}, cfg);
        EXPECT_EQ(m.route, Route::kPolyhedral);
        if (x >= 0) {
          ASSERT_TRUE(m.value.is_finite());
          EXPECT_EQ(m.value.value(), 0.0);
          EXPECT_TRUE(m.argmin);
        } else {
          EXPECT_TRUE(m.value.is_pos_inf());
        }
      }
    }
  }
}

TEST(Sweep, Example1AndRockafellar) {
  const auto g = grid(-2, 2, 5);
  const auto e1 = surjectivity_sweep(example1_S(), example1_T(), 0, g);
  EXPECT_TRUE(e1.all_yes);
  EXPECT_TRUE(e1.oracle_whole_line());
  EXPECT_FALSE(e1.disagreement);

  const auto rock = surjectivity_sweep(normal_cone(0, kInf), duality_map(), 0, grid(-5, 5, 21));
  EXPECT_TRUE(rock.all_yes);
  for (const auto& r : rock.reports) {
    EXPECT_LE(std::abs(r.gap.value()), 1e-6);
    EXPECT_LE(std::abs(r.residuals->first), 1e-6);
    EXPECT_LE(std::abs(r.residuals->second), 1e-6);
  }

  const auto nr = normal_cone(-kInf, kInf);
  const auto only0 = surjectivity_sweep(nr, nr, 0, g);
  for (const auto& r : only0.reports) EXPECT_EQ(r.verdict == Verdict::kYes, r.ps == 0.0) << r.ps;
  EXPECT_FALSE(only0.disagreement);
}

TEST(Sweep, FitzpatrickRepresentativesOnExample1) {
  const auto s = surjectivity_sweep(example1_S(), example1_T(), 0, grid(-2, 2, 9), fitzpatrick_cfg());
  EXPECT_TRUE(s.all_yes);
}

TEST(ZeroInRange, Examples) {
  const auto e1 = zero_in_range(example1_S(), example1_T());
  EXPECT_EQ(e1.range.verdict, Verdict::kYes);
  ASSERT_TRUE(e1.total_duality);
  EXPECT_TRUE(e1.total_duality->ok());

  const auto line = zero_in_range(sub(PlqFunction::quadratic(0.5, -1, 0)), normal_cone(0, 0));
  EXPECT_EQ(line.range.verdict, Verdict::kYes);

  const auto disjoint = zero_in_range(normal_cone(1, 1), normal_cone(0, 0));
  EXPECT_EQ(disjoint.range.verdict, Verdict::kNo);
  EXPECT_FALSE(disjoint.total_duality);
}

TEST(TotalDuality, Example1AndQuadratics) {
  const auto e1 = total_duality_check(example1_S(), example1_T());
  EXPECT_TRUE(e1.ok());
  EXPECT_EQ(e1.primal_value.value(), 0.0);
  EXPECT_EQ(e1.dual_value.value(), 0.0);
  ASSERT_TRUE(e1.primal_point);
  EXPECT_EQ((*e1.primal_point)[0], 0.0);
  EXPECT_LE((*e1.primal_point)[1], 0.0);

  const auto q = total_duality_check(sub(half_square()), sub(half_square()));
  EXPECT_TRUE(q.ok());
  EXPECT_NEAR((*q.primal_point)[0], 0.0, 1e-12);
  EXPECT_NEAR((*q.primal_point)[1], 0.0, 1e-12);

  EXPECT_THROW(total_duality_check(normal_cone(1, 1), normal_cone(0, 0)), std::domain_error);
}

TEST(Conditions, Example1TableFailsClassicalButRangeConditionsHold) {
  const auto r = classical_conditions(example1_S(), example1_T(), {-2, -1, -0.5, 0, 0.5, 1, 2});
  EXPECT_EQ(r.dom_fT_whole, Condition::kFails);
  EXPECT_EQ(r.difference_whole, Condition::kFails);
  EXPECT_EQ(r.sqri, Condition::kFails);
  EXPECT_EQ(r.core, Condition::kFails);
  const auto half = PolyhedralSet2D::box(0, kInf, -kInf, kInf);
  EXPECT_EQ(*r.difference, half);
  EXPECT_EQ(*r.core_set, half);
  EXPECT_EQ(relative_interior_string(*r.difference), "-1*z1 + 0*z2 < 0");
  EXPECT_TRUE(r.rc_bar.all_yes);
  EXPECT_EQ(r.rc_tilde.verdict, Verdict::kYes);
  EXPECT_TRUE(r.chain_consistent());
}

TEST(Conditions, DualityMapDomainIsWholePlane) {
  for (const auto kind : {RepresentativeKind::kFenchel, RepresentativeKind::kFitzpatrick}) {
    VerifyConfig cfg;
    cfg.rep_T = kind;
    const auto r = classical_conditions(normal_cone(0, kInf), duality_map(), {-1, 0, 1}, cfg);
    EXPECT_EQ(r.dom_fT_whole, Condition::kHolds);
    EXPECT_EQ(r.difference_whole, Condition::kHolds);
    EXPECT_EQ(r.sqri, Condition::kHolds);
    EXPECT_TRUE(r.chain_consistent());
  }
}

TEST(SingleSurjectivity, Examples) {
  const auto g = grid(-2, 2, 9);
  const auto J = single_surjectivity(duality_map(), g);
  EXPECT_TRUE(J.all_yes);
  for (const auto& e : J.entries) {
    ASSERT_TRUE(e.witness);
    EXPECT_NEAR(*e.witness, e.ps, 1e-12);
  }
  const auto S = single_surjectivity(example1_S(), g);
  for (const auto& e : S.entries) EXPECT_EQ(e.verdict == Verdict::kYes, e.ps <= 0) << e.ps;
  EXPECT_FALSE(S.disagreement);

  const auto nr = single_surjectivity(normal_cone(-kInf, kInf), g);
  for (const auto& e : nr.entries) EXPECT_EQ(e.verdict == Verdict::kYes, e.ps == 0.0);

  VerifyConfig fc;
  fc.rep_S = RepresentativeKind::kFitzpatrick;
  const auto Sf = single_surjectivity(example1_S(), g, fc);
  for (const auto& e : Sf.entries) EXPECT_EQ(e.verdict == Verdict::kYes, e.ps <= 0) << e.ps;
}

TEST(NormalConeDriver, WholeLineReducesToSingleOperator) {
  Rng rng(41);
  const auto g = grid(-3, 3, 13);
  for (int trial = 0; trial < 20; ++trial) {
    const auto S = random_maximal_graph(rng);
    const auto nc = normal_cone_driver(S, -kInf, kInf, 0, g);
    const auto single = single_surjectivity(S, g);
    for (std::size_t k = 0; k < g.size(); ++k)
      EXPECT_EQ(nc.reports[k].verdict, single.entries[k].verdict) << S.to_string() << " at " << g[k];
  }
  const auto half = normal_cone_driver(example1_S(), 0, kInf, 0, grid(-2, 2, 5));
  EXPECT_FALSE(half.disagreement);
}

TEST(SubdiffDriver, Examples) {
  const auto g = grid(-2, 2, 9);
  const auto e1 = subdiff_driver(PlqFunction::indicator(0, kInf), PlqFunction::indicator(0, 0), 0, g);
  EXPECT_TRUE(e1.hypothesis);
  EXPECT_TRUE(e1.all_yes);
  EXPECT_FALSE(e1.disagreement);

  const auto q = subdiff_driver(half_square(), half_square(), 0, {3});
  ASSERT_EQ(q.entries.size(), 1u);
  EXPECT_EQ(q.entries[0].verdict, Verdict::kYes);
  EXPECT_TRUE(q.entries[0].primal.holds);
  EXPECT_TRUE(q.entries[0].dual.holds);

  const auto off = subdiff_driver(PlqFunction::indicator(0, kInf), PlqFunction::indicator(0, 0), -1, {0});
  EXPECT_FALSE(off.hypothesis);
  EXPECT_EQ(off.entries[0].verdict, Verdict::kNo);
}

TEST(Properties, OracleAgreementOnRandomPairs) {
  Rng rng(101);
  int conclusive = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto S = random_maximal_graph(rng);
    const auto T = random_maximal_graph(rng);
    const double p = rng.quantized(-3, 3, 0.25), ps = rng.quantized(-4, 4, 0.25);
    const auto r = range_membership(S, T, p, ps);
    EXPECT_TRUE(r.agrees()) << S.to_string() << " | " << T.to_string() << " p=" << p << " p*=" << ps << " "
                            << to_string(r.verdict) << " " << r.reason;
    if (is_conclusive(r.verdict)) ++conclusive;
    if (r.verdict == Verdict::kYes) EXPECT_LE(std::abs(r.gap.value()), r.tol);
  }
  EXPECT_EQ(conclusive, 200);
}

TEST(Properties, ShiftedTiltGivesSameVerdictAndShiftedValue) {
  Rng rng(202);
  for (int trial = 0; trial < 60; ++trial) {
    const auto S = random_maximal_graph(rng);
    const auto T = random_maximal_graph(rng);
    const double p = rng.quantized(-3, 3, 0.25), ps = rng.quantized(-4, 4, 0.25);
    const auto a = range_membership(S, T, p, ps);
    const auto b = range_membership_shifted(S, T, p, ps);
    EXPECT_EQ(a.verdict, b.verdict);
    ASSERT_EQ(a.value.is_finite(), b.value.is_finite());
    if (a.value.is_finite()) EXPECT_NEAR(b.value.value() + 2 * p * ps, a.value.value(), 1e-9 * (1 + std::abs(p * ps)));
  }
}

TEST(Properties, RepresentativeIndependenceOnStaircases) {
  Rng rng(303);
  for (int trial = 0; trial < 60; ++trial) {
    const auto S = random_staircase(rng);
    const auto T = random_staircase(rng);
    const double p = rng.quantized(-2, 2, 0.5), ps = rng.quantized(-3, 3, 0.5);
    const auto a = range_membership(S, T, p, ps);
    const auto b = range_membership(S, T, p, ps, fitzpatrick_cfg());
    EXPECT_EQ(b.route, Route::kPolyhedral);
    EXPECT_EQ(a.verdict, b.verdict) << S.to_string() << " | " << T.to_string() << " p=" << p << " p*=" << ps;
    EXPECT_TRUE(b.agrees());
  }
}

TEST(Properties, ConditionHierarchy) {
  Rng rng(404);
  const auto g = grid(-3, 3, 7);
  for (int trial = 0; trial < 40; ++trial) {
    const auto S = random_maximal_graph(rng);
    const auto T = random_maximal_graph(rng);
    const auto r = classical_conditions(S, T, g);
    EXPECT_TRUE(r.chain_consistent()) << S.to_string() << " | " << T.to_string();
    EXPECT_FALSE(r.rc_bar.disagreement);
  }
}

TEST(Properties, SubdiffDriverMatchesOracleAndBivariate) {
  Rng rng(505);
  const auto g = grid(-3, 3, 13);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const auto f = random_convex_plq(rng);
    const auto h = random_convex_plq(rng);
    const double p = rng.quantized(-2, 2, 0.5);
    const auto r = subdiff_driver(f, h, p, g);
    if (!r.hypothesis) continue;
    ++checked;
    for (const auto& e : r.entries) {
      EXPECT_TRUE(e.agrees()) << f.to_string() << " | " << h.to_string() << " p=" << p << " p*=" << e.ps << " "
                              << to_string(e.verdict) << " oracle " << e.oracle << " " << e.reason;
    }
  }
  EXPECT_GT(checked, 20);
}

TEST(Properties, TotalDualityWheneverZeroIsInRange) {
  Rng rng(606);
  int checked = 0;
  for (int trial = 0; trial < 120; ++trial) {
    const auto S = random_maximal_graph(rng);
    const auto T = random_maximal_graph(rng);
    if (!sum_range_oracle(S, T, 0).contains(0.0)) continue;
    ++checked;
    const auto td = total_duality_check(S, T);
    EXPECT_TRUE(td.ok()) << S.to_string() << " | " << T.to_string() << " primal " << td.primal_value.value()
                         << " eqS " << td.eq_S << " eqT " << td.eq_T << " eqSd " << td.eq_S_dual << " eqTd "
                         << td.eq_T_dual;
  }
  EXPECT_GT(checked, 20);
}
