// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <functional>
#include <iostream>
#include <sstream>

#include "fitzrange/random.hpp"
#include "fitzrange/verify.hpp"

using namespace fitzrange;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream note;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) note << "failed: " << what << "; ";
    pass = pass && ok;
  }
};

MonotoneGraph sub(const PlqFunction& f) { return from_subdifferential(f); }

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(lo + (hi - lo) * i / (n - 1));
  return v;
}

PolyhedralFn2D box_indicator(double lo1, double hi1, double lo2, double hi2) {
  return PolyhedralFn2D::indicator(PolyhedralSet2D::box(lo1, hi1, lo2, hi2));
}

bool same_polyhedral(const BivariateFn& h, const PolyhedralFn2D& want) {
  return h.tag() == "polyhedral-max" && h.polyhedral() && approx_equal(*h.polyhedral(), want);
}

const std::vector<double> kExample1Grid{-2, -1, -0.5, 0, 0.5, 1, 2};

void ac1(Outcome& o) {
  const auto S = sub(PlqFunction::indicator(0, kInf)), T = sub(PlqFunction::indicator(0, 0));
  const auto phiS = fitzpatrick_fn(S), phiT = fitzpatrick_fn(T);
  const auto cS = conjugate_bivariate(phiS), cT = conjugate_bivariate(phiT);
  o.require(same_polyhedral(phiS, box_indicator(0, kInf, -kInf, 0)), "phi_S");
  o.require(same_polyhedral(phiT, box_indicator(0, 0, -kInf, kInf)), "phi_T");
  o.require(same_polyhedral(cS, box_indicator(-kInf, 0, 0, kInf)), "phi_S*");
  o.require(same_polyhedral(cT, box_indicator(-kInf, kInf, 0, 0)), "phi_T*");
  const auto b = conjugate_bivariate(hat_transform(phiT));
  const VerifyConfig cfg;
  int checked = 0;
  for (double ps : kExample1Grid) {
    for (double xs : {-3.0, -1.0, 0.0, 2.0}) {
      for (double x : {-2.0, -0.5, -1e-3, 0.0, 1e-3, 0.5, 4.0}) {
        const auto m = minimize_pair(cS, {xs, x}, -1.0, b, {0.0, ps}, cfg);
        const bool ok = m.route == Route::kPolyhedral &&
                        (x >= 0 ? m.value.is_finite() && m.value.value() == 0.0 && m.argmin : m.value.is_pos_inf());
        o.require(ok, "inf-convolution at p*=" + std::to_string(ps));
        ++checked;
      }
    }
  }
  o.note << "four polyhedral indicators exact; inf-convolution checked at " << checked << " points";
}

void ac2(Outcome& o) {
  const auto S = sub(PlqFunction::indicator(0, kInf)), T = sub(PlqFunction::indicator(0, 0));
  const auto r = classical_conditions(S, T, kExample1Grid);
  for (auto c : {r.dom_fT_whole, r.difference_whole, r.sqri, r.core}) o.require(c == Condition::kFails, "a condition holds");
  const auto half = PolyhedralSet2D::box(0, kInf, -kInf, kInf);
  o.require(r.difference && *r.difference == half, "difference set");
  o.require(r.core_set && *r.core_set == half, "core set");
  for (const auto* d : {&r.difference, &r.core_set}) {
    if (!*d) continue;
    const auto& D = **d;
    o.require(relative_interior_string(D) == "-1*z1 + 0*z2 < 0", "relative interior");
    o.require(D.in_relative_interior({1e-3, -5}) && !D.in_relative_interior({0, 3}), "ri membership");
    o.require(!D.in_relative_interior({0, 0}), "(0,0) in ri");
  }
  o.require(r.rc_bar.all_yes, "(RC-bar) not YES on grid");
  o.require(r.rc_tilde.verdict == Verdict::kYes, "(RC-tilde)");
  o.require(sum_range_oracle(S, T, 0).is_whole_line(), "oracle range");
  o.note << "classical conditions FAIL, sqri/core set (0, +inf) x R, (RC-bar) YES on " << kExample1Grid.size()
         << " points, (RC-tilde) YES, oracle " << r.rc_bar.oracle_range.to_string();
}

void ac3(Outcome& o) {
  const auto grid = linspace(-5, 5, 21);
  double worst = 0.0;
  const std::vector<std::pair<std::string, MonotoneGraph>> ops{{"N_[0,inf)", normal_cone(0, kInf)},
                                                               {"d|x|", sub(PlqFunction::abs())},
                                                               {"d(x^2/2)", sub(PlqFunction::quadratic(0.5, 0, 0))},
                                                               {"N_[-1,1]", normal_cone(-1, 1)}};
  for (const auto& [name, S] : ops) {
    const auto s = surjectivity_sweep(S, duality_map(), 0, grid);
    o.require(s.all_yes, name + " not all YES");
    o.require(s.oracle_whole_line(), name + " oracle");
    for (const auto& r : s.reports) {
      const double e = std::max({std::abs(r.gap.is_finite() ? r.gap.value() : kInf),
                                 r.residuals ? std::abs(r.residuals->first) : kInf,
                                 r.residuals ? std::abs(r.residuals->second) : kInf});
      worst = std::max(worst, e);
    }
  }
  o.require(worst <= 1e-6, "gap or residual above 1e-6");
  o.note << "4 operators x 21 points YES; max |gap|, residual = " << worst;
}

double llt_error(const PlqFunction& f, int n, double lo, double hi) {
  const Axis ax{-8, 8, n};
  const auto G = llt_1d(GridFn::sample(ax, [&](double x) { return f(x); }), Axis{lo, hi, 101});
  const auto exact = conjugate(f);
  double err = 0.0;
  const Axis& du = G.axes()[0];
  for (int i = 0; i < du.n; ++i) err = std::max(err, std::abs(G.at(i) - exact(du.node(i)).value()));
  return err;
}

void ac4(Outcome& o) {
  struct Case {
    std::string name;
    PlqFunction f;
    double lo, hi;  // interior of dom f*
  };
  const Case cases[] = {{"x^2/2", PlqFunction::quadratic(0.5, 0, 0), -4, 4},
                        {"|x|", PlqFunction::abs(), -0.9, 0.9},
                        {"ind[0,1]", PlqFunction::indicator(0, 1), -4, 4}};
  for (const auto& c : cases) {
    double err[3];
    int k = 0;
    for (int n : {129, 257, 513}) {
      err[k] = llt_error(c.f, n, c.lo, c.hi);
      const double h = 16.0 / (n - 1);
      o.require(err[k] <= 2.0 * h, c.name + " error above 2h at n=" + std::to_string(n));
      ++k;
    }
    o.require(err[2] <= 0.55 * err[1], c.name + " ratio");
    o.note << c.name << " errors " << err[0] << ", " << err[1] << ", " << err[2] << "; ";
  }
}

void ac5(Outcome& o) {
  Rng rng(2024);
  for (int i = 0; i < 50; ++i) {
    const auto f = random_convex_plq(rng);
    o.require(approx_equal(conjugate(conjugate(f)), f.canonical(), 1e-9), "biconjugation " + f.to_string());
  }
  int pairs = 0;
  while (pairs < 20) {
    const auto f = random_convex_plq(rng), g = random_convex_plq(rng);
    PlqFunction h;
    try {
      h = inf_convolution(f, g).value();
    } catch (const std::domain_error&) {
      continue;
    }
    ++pairs;
    const auto lhs = conjugate(h), rhs = add(conjugate(f), conjugate(g));
    for (int k = 0; k <= 100; ++k) {
      const double s = -5 + 0.1 * k;
      const ExtReal a = lhs(s), b = rhs(s);
      const double scale = std::max(1.0, b.is_finite() ? std::abs(b.value()) : 0.0);
      o.require(approx_equal(a, b, 1e-9 * scale), "inf-convolution duality");
    }
  }
  o.note << "50 biconjugates exact; " << pairs << " inf-convolution pairs on a 101-point grid";
}

void ac6(Outcome& o) {
  const Axis ax{-8, 8, 257};
  const std::vector<std::pair<std::string, MonotoneGraph>> fixtures{
      {"Example 1 S", sub(PlqFunction::indicator(0, kInf))},
      {"Example 1 T", sub(PlqFunction::indicator(0, 0))},
      {"N_[0,inf)", normal_cone(0, kInf)},
      {"N_[-1,1]", normal_cone(-1, 1)},
      {"d|x|", sub(PlqFunction::abs())},
      {"d(x^2/2)", sub(PlqFunction::quadratic(0.5, 0, 0))},
      {"J", duality_map()}};
  for (const auto& [name, T] : fixtures) {
    const auto phi = fitzpatrick_fn(T);
    o.require(representative_validity_check(phi, T, ax).ok(), name + " validity");
    std::vector<Point2> sample;
    for (const auto& g : T.segments()) {
      for (double dm : {0.0, 0.5, 1.0, 2.5}) {
        const double m = std::isfinite(g.m_lo) ? g.m_lo + dm : g.m_hi - dm;
        if (m >= g.m_lo && m <= g.m_hi && std::isfinite(m)) sample.push_back({g.x_at(m), g.s_at(m)});
      }
    }
    const auto psi = psi_T(T, sample);
    for (int i = 0; i < ax.n; ++i) {
      for (int j = 0; j < ax.n; ++j) {
        const double x = ax.node(i), xs = ax.node(j);
        const ExtReal u = phi(x, xs), w = psi(x, xs);
        if (w.is_finite()) o.require(u.is_finite() && u.value() <= w.value() + 1e-9, name + " phi <= psi");
      }
    }
  }
  const auto phiJ = fitzpatrick_fn(duality_map());
  double worst = 0.0;
  for (int i = 0; i < ax.n; ++i)
    for (int j = 0; j < ax.n; ++j) {
      const double x = ax.node(i), xs = ax.node(j);
      worst = std::max(worst, std::abs(phiJ(x, xs).value() - (x + xs) * (x + xs) / 4));
    }
  o.require(worst <= 1e-9, "phi_J closed form");
  o.note << fixtures.size() << " fixtures valid on 257^2 nodes; max |phi_J - (x+x*)^2/4| = " << worst;
}

struct FuzzInstance {
  MonotoneGraph S, T;
  double p, ps;
};

std::vector<FuzzInstance> fuzz_instances() {
  Rng rng(7);
  std::vector<FuzzInstance> out;
  for (int i = 0; i < 200; ++i) {
    auto S = random_maximal_graph(rng);
    auto T = random_maximal_graph(rng);
    const double p = rng.quantized(-3, 3, 0.25), ps = rng.quantized(-4, 4, 0.25);
    out.push_back({std::move(S), std::move(T), p, ps});
  }
  return out;
}

void ac7(Outcome& o) {
  int boundary = 0, disagree = 0, inconclusive = 0;
  const auto inst = fuzz_instances();
  for (const auto& in : inst) {
    const auto r = range_membership(in.S, in.T, in.p, in.ps);
    if (!r.agrees()) ++disagree;
    if (r.verdict == Verdict::kInconclusiveBoundary) ++boundary;
    if (!is_conclusive(r.verdict)) ++inconclusive;
  }
  const double rate = static_cast<double>(boundary) / inst.size();
  o.require(disagree == 0, "oracle disagreement");
  o.require(rate <= 0.10, "boundary rate");
  o.note << inst.size() << " instances, " << disagree << " disagreements, boundary rate " << rate << ", "
         << inconclusive << " inconclusive";
}

void ac8(Outcome& o) {
  int checked = 0;
  for (const auto& in : fuzz_instances()) {
    if (!sum_range_oracle(in.S, in.T, 0).contains(0.0)) continue;
    ++checked;
    try {
      const auto t = total_duality_check(in.S, in.T);
      const bool ok = t.primal_attained() && t.dual_attained() && t.primal_value.is_finite() &&
                      std::abs(t.primal_value.value()) <= 1e-6 && t.dual_value.is_finite() &&
                      std::abs(t.dual_value.value()) <= 1e-6 && std::abs(t.eq_S) <= 1e-6 && std::abs(t.eq_T) <= 1e-6;
      o.require(ok, "instance " + in.S.to_string() + " | " + in.T.to_string());
    } catch (const std::domain_error& e) {
      o.require(false, std::string("precondition: ") + e.what());
    }
  }
  o.require(checked > 0, "no instance with 0 in the range");
  o.note << checked << " instances with 0 in R(S+T); values 0, both attained, equalities within 1e-6";
}

void ac9(Outcome& o) {
  const std::vector<std::pair<PlqFunction, PlqFunction>> pairs{
      {PlqFunction::indicator(0, kInf), PlqFunction::indicator(0, 0)},
      {PlqFunction::quadratic(0.5, 0, 0), PlqFunction::quadratic(0.5, 0, 0)}};
  const auto grid = linspace(-3, 3, 13);
  for (const auto& [f, g] : pairs) {
    const auto d = subdiff_driver(f, g, 0, grid);
    const auto s = surjectivity_sweep(sub(f), sub(g), 0, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const auto& e = d.entries[k];
      o.require(e.verdict == s.reports[k].verdict, "bivariate mismatch at " + std::to_string(grid[k]));
      o.require((e.verdict == Verdict::kYes) == e.oracle, "oracle mismatch at " + std::to_string(grid[k]));
    }
  }
  o.note << "2 pairs x " << grid.size() << " points: univariate, bivariate and oracle agree";
}

}  // namespace

int main() {
  struct Criterion {
    const char* id;
    void (*fn)(Outcome&);
    double budget_s;
  };
  const Criterion all[] = {{"AC1", ac1, 1}, {"AC2", ac2, 1}, {"AC3", ac3, 5},  {"AC4", ac4, 60}, {"AC5", ac5, 60},
                           {"AC6", ac6, 60}, {"AC7", ac7, 60}, {"AC8", ac8, 60}, {"AC9", ac9, 60}};
  bool all_pass = true;
  for (const auto& c : all) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.fn(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(secs < c.budget_s, "runtime budget");
    all_pass = all_pass && o.pass;
    std::cout << c.id << " " << (o.pass ? "PASS" : "FAIL") << "  " << o.note.str() << " (" << static_cast<int>(secs * 1000)
              << " ms)" << std::endl;
  }
  return all_pass ? 0 : 1;
}
