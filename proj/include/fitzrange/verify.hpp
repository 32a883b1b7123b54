#pragma once

// Range-membership certificates for sums of maximal monotone operators on
// R through infimal convolutions of conjugated representative functions.
//
// For p, p* the test value is
//   V = min over z = (u*, u) of a(p* - u*, p - u) + b(u*, u) + p u* + p* u
// with a = f_S* and b = (f_T hat)*, both functions of (x*, x). V >= p p*
// always; p* lies in the range of S(p + .) + T exactly when V = p p* and the
// minimum is attained.

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fitzrange/ext_real.hpp"
#include "fitzrange/fitzpatrick.hpp"
#include "fitzrange/grid.hpp"
#include "fitzrange/operators.hpp"
#include "fitzrange/plq.hpp"
#include "fitzrange/polyhedral.hpp"

namespace fitzrange {

struct VerifyConfig {
  GridSpec grid;
  double tol_exact = 1e-9;
  double tol_grid = 1e-6;
  int refinements = 4;
  RepresentativeKind rep_S = RepresentativeKind::kFenchel;
  RepresentativeKind rep_T = RepresentativeKind::kFenchel;
};

enum class Verdict { kYes, kNo, kInconclusiveBoundary, kInconclusiveResolution };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kYes: return "YES";
    case Verdict::kNo: return "NO";
    case Verdict::kInconclusiveBoundary: return "INCONCLUSIVE-boundary";
    case Verdict::kInconclusiveResolution: return "INCONCLUSIVE-resolution";
  }
  return "?";
}
inline bool is_conclusive(Verdict v) { return v == Verdict::kYes || v == Verdict::kNo; }

enum class Route { kSeparable, kPolyhedral, kGrid };

inline const char* to_string(Route r) {
  switch (r) {
    case Route::kSeparable: return "separable";
    case Route::kPolyhedral: return "polyhedral";
    case Route::kGrid: return "grid";
  }
  return "?";
}

struct PairMin {
  ExtReal value = ExtReal::inf();
  std::optional<Point2> argmin;
  Route route = Route::kGrid;
  bool boundary = false;
};

namespace detail {

inline std::optional<PolyhedralFn2D> poly_compose(const PolyhedralFn2D& a, const Point2& c, double s) {
  // z -> a(c + s z)
  if (s < 0) return a.reflected_about(c);
  return a.reflected_about({0.0, 0.0}).reflected_about({-c[0], -c[1]});
}

inline UnivariateMin minimize_1d(const PlqFunction& a, double c, double s, const PlqFunction& b, double l,
                                 double tol) {
  const PlqFunction A = s < 0 ? transform_shift_tilt(reflect(a), c, 0.0) : transform_shift_tilt(a, -c, 0.0);
  PlqFunction sum;
  try {
    sum = add(A, b);
  } catch (const std::invalid_argument&) {
    return {ExtReal::inf(), std::nullopt};
  }
  return minimize(transform_shift_tilt(sum, 0.0, -l), tol);
}

}  // namespace detail

/// min over z of a(c + s z) + b(z) + <l, z>, for s = +1 or -1. Exact when
/// both functions are separable or both polyhedral; otherwise a grid probe
/// on [-box, box]^2.
inline Route route_for(const BivariateFn& a, const BivariateFn& b) {
  if (std::holds_alternative<SeparableForm>(a.rep()) && std::holds_alternative<SeparableForm>(b.rep()))
    return Route::kSeparable;
  return a.polyhedral() && b.polyhedral() ? Route::kPolyhedral : Route::kGrid;
}

inline PairMin minimize_pair(const BivariateFn& a, const Point2& c, double s, const BivariateFn& b, const Point2& l,
                             const VerifyConfig& cfg) {
  const auto* sa = std::get_if<SeparableForm>(&a.rep());
  const auto* sb = std::get_if<SeparableForm>(&b.rep());
  if (sa && sb) {
    PairMin out;
    out.route = Route::kSeparable;
    const auto m1 = detail::minimize_1d(sa->first, c[0], s, sb->first, l[0], cfg.tol_exact);
    const auto m2 = detail::minimize_1d(sa->second, c[1], s, sb->second, l[1], cfg.tol_exact);
    if (m1.value.is_pos_inf() || m2.value.is_pos_inf()) return out;
    if (m1.value.is_neg_inf() || m2.value.is_neg_inf()) {
      out.value = ExtReal::neg_inf();
      return out;
    }
    out.value = m1.value + m2.value;
    if (m1.argmin && m2.argmin) out.argmin = Point2{*m1.argmin, *m2.argmin};
    return out;
  }
  const auto pa = a.polyhedral();
  const auto pb = pa ? b.polyhedral() : std::nullopt;
  if (pa && pb) {
    PairMin out;
    out.route = Route::kPolyhedral;
    const auto sum = detail::poly_compose(*pa, c, s)->plus(*pb);
    if (!sum) return out;
    const auto m = sum->tilted(l).minimize();
    out.value = m.value;
    out.argmin = m.argmin;
    return out;
  }
  ProbeConfig pc;
  pc.box = cfg.grid.box;
  pc.n = cfg.grid.n;
  pc.refinements = cfg.refinements;
  pc.tol = cfg.tol_grid;
  const auto r = attainment_probe(
      2,
      [&](std::array<double, 2> z) {
        const ExtReal u = a(c[0] + s * z[0], c[1] + s * z[1]);
        if (u.is_pos_inf()) return u;
        const ExtReal v = b(z[0], z[1]);
        if (v.is_pos_inf()) return v;
        return u + v + ExtReal(l[0] * z[0] + l[1] * z[1]);
      },
      pc);
  PairMin out;
  out.route = Route::kGrid;
  out.value = r.value;
  if (r.status == ProbeStatus::kFound) out.argmin = r.point;
  if (r.status == ProbeStatus::kBoundary) {
    out.boundary = true;
    out.argmin = r.point;
  }
  return out;
}

struct RangeCheckReport {
  double p = 0.0;
  double ps = 0.0;
  std::string rep_S;
  std::string rep_T;
  std::optional<BivariateFn> f_S;
  std::optional<BivariateFn> f_T;
  bool domain_clause = true;
  Route route = Route::kGrid;
  ExtReal value = ExtReal::inf();
  double target = 0.0;
  ExtReal gap = ExtReal::inf();
  std::optional<Point2> witness;  // (u*, u)
  std::optional<std::pair<double, double>> residuals;
  double tol = 0.0;
  bool oracle = false;
  Verdict verdict = Verdict::kNo;
  std::string reason;
  bool shifted_form = false;

  bool agrees() const { return !is_conclusive(verdict) || (verdict == Verdict::kYes) == oracle; }
};

namespace detail {

struct Prepared {
  BivariateFn f_S;
  BivariateFn f_T;
  BivariateFn hat_T;
  BivariateFn a;  // f_S*
  BivariateFn b;  // (hat f_T)*
};

inline Prepared prepare(const MonotoneGraph& S, const MonotoneGraph& T, const VerifyConfig& cfg) {
  if (!S.is_maximal() || !T.is_maximal()) throw std::invalid_argument("range_membership: operator is not maximal");
  auto fS = representative(S, cfg.rep_S);
  auto fT = representative(T, cfg.rep_T);
  auto hT = hat_transform(fT);
  auto a = conjugate_bivariate(fS, cfg.grid);
  auto b = conjugate_bivariate(hT, cfg.grid);
  return {std::move(fS), std::move(fT), std::move(hT), std::move(a), std::move(b)};
}

inline bool domain_clause(const BivariateFn& fS, const BivariateFn& hT, double p, double ps) {
  const auto d1 = fS.domain();
  const auto d2 = hT.domain();
  if (!d1 || !d2) return true;
  return !d1->intersect(d2->translated({p, ps})).is_empty();
}

inline RangeCheckReport range_check(const Prepared& pr, const MonotoneGraph& S, const MonotoneGraph& T, double p,
                                    double ps, const VerifyConfig& cfg, bool shifted) {
  RangeCheckReport r;
  r.p = p;
  r.ps = ps;
  r.rep_S = to_string(cfg.rep_S);
  r.rep_T = to_string(cfg.rep_T);
  r.f_S = pr.f_S;
  r.f_T = pr.f_T;
  r.shifted_form = shifted;
  r.oracle = sum_range_oracle(S, T, p).contains(ps);
  r.target = shifted ? -p * ps : p * ps;
  r.domain_clause = domain_clause(pr.f_S, pr.hat_T, p, ps);
  if (!r.domain_clause) {
    r.route = route_for(pr.a, pr.b);
    r.verdict = Verdict::kNo;
    r.reason = "representative domains do not meet after the shift by (p, p*)";
    return r;
  }

  const Point2 c{ps, p};
  PairMin m;
  if (shifted) {
    // (f_S* - <(p*, p), .>) inf-convolved with (hat f_T)*; on (w*, w) the
    // pairing is p* w + p w*.
    m = minimize_pair(pr.a.tilted({-p, -ps}), c, -1.0, pr.b, {0.0, 0.0}, cfg);
  } else {
    m = minimize_pair(pr.a, c, -1.0, pr.b, {p, ps}, cfg);
  }
  r.route = m.route;
  r.value = m.value;
  r.witness = m.argmin;
  const bool exact = m.route != Route::kGrid;
  r.tol = (exact ? cfg.tol_exact : cfg.tol_grid) * std::max(1.0, std::abs(r.target));
  if (m.value.is_finite()) r.gap = ExtReal(m.value.value() - r.target);
  else r.gap = m.value;

  if (m.argmin) {
    const auto [us, u] = *m.argmin;
    const ExtReal ea = pr.a(ps - us, p - u);
    const ExtReal eb = pr.b(us, u);
    if (ea.is_finite() && eb.is_finite())
      r.residuals = std::make_pair(ea.value() - (ps - us) * (p - u), eb.value() + us * u);
  }

  const bool value_ok = r.gap.is_finite() && std::abs(r.gap.value()) <= r.tol;
  const bool residuals_ok =
      r.residuals && std::abs(r.residuals->first) <= r.tol && std::abs(r.residuals->second) <= r.tol;
  if (value_ok && m.argmin && !m.boundary && residuals_ok) {
    r.verdict = Verdict::kYes;
    r.reason = "value equals the duality product and is attained";
    return r;
  }
  if (m.boundary) {
    r.verdict = Verdict::kInconclusiveBoundary;
    r.reason = "minimizer on the edge of the truncation box";
    return r;
  }
  if (!exact) {
    r.verdict = Verdict::kInconclusiveResolution;
    r.reason = "grid minimum does not certify equality at this resolution";
    return r;
  }
  r.verdict = Verdict::kNo;
  if (m.value.is_pos_inf()) r.reason = "infimal convolution is +inf";
  else if (!m.argmin) r.reason = "infimum not attained";
  else if (r.gap.is_finite() && r.gap.value() < -r.tol) r.reason = "value below the duality product (inconsistent)";
  else if (!value_ok) r.reason = "value exceeds the duality product";
  else r.reason = "optimality residuals do not vanish";
  return r;
}

}  // namespace detail

inline RangeCheckReport range_membership(const MonotoneGraph& S, const MonotoneGraph& T, double p, double ps,
                                         const VerifyConfig& cfg = {}) {
  return detail::range_check(detail::prepare(S, T, cfg), S, T, p, ps, cfg, false);
}

/// The same test with the tilt moved onto f_S*; its value is V - 2 p p*,
/// compared with -p p*.
inline RangeCheckReport range_membership_shifted(const MonotoneGraph& S, const MonotoneGraph& T, double p, double ps,
                                                 const VerifyConfig& cfg = {}) {
  return detail::range_check(detail::prepare(S, T, cfg), S, T, p, ps, cfg, true);
}

struct SweepReport {
  double p = 0.0;
  std::vector<RangeCheckReport> reports;
  SetOnLine oracle_range;
  bool all_yes = true;
  bool disagreement = false;
  int inconclusive = 0;

  bool oracle_whole_line() const { return oracle_range.is_whole_line(); }
  std::string summary() const {
    std::ostringstream os;
    os << (all_yes ? "surjective on tested grid" : "not surjective on tested grid") << " (" << reports.size()
       << " points, " << inconclusive << " inconclusive); oracle range " << oracle_range.to_string();
    return os.str();
  }
};

inline SweepReport surjectivity_sweep(const MonotoneGraph& S, const MonotoneGraph& T, double p,
                                      const std::vector<double>& ps_grid, const VerifyConfig& cfg = {}) {
  if (ps_grid.empty()) throw std::invalid_argument("surjectivity_sweep: empty p* grid");
  const auto pr = detail::prepare(S, T, cfg);
  SweepReport out;
  out.p = p;
  out.oracle_range = sum_range_oracle(S, T, p);
  for (double ps : ps_grid) {
    auto r = detail::range_check(pr, S, T, p, ps, cfg, false);
    out.all_yes = out.all_yes && r.verdict == Verdict::kYes;
    out.disagreement = out.disagreement || !r.agrees();
    if (!is_conclusive(r.verdict)) ++out.inconclusive;
    out.reports.push_back(std::move(r));
  }
  return out;
}

struct TotalDualityReport {
  bool precondition = false;
  Route route = Route::kGrid;
  ExtReal primal_value = ExtReal::inf();
  std::optional<Point2> primal_point;  // (x, x*)
  ExtReal dual_value = ExtReal::neg_inf();
  std::optional<Point2> dual_point;  // (u*, u)
  double eq_S = kInf;                // f_S - c at the primal point
  double eq_T = kInf;                // hat f_T + c at the primal point
  double eq_S_dual = kInf;           // the same at (-u, -u*)
  double eq_T_dual = kInf;
  double tol = 0.0;

  bool primal_attained() const { return primal_point.has_value(); }
  bool dual_attained() const { return dual_point.has_value(); }
  bool ok() const {
    auto small = [&](double v) { return std::abs(v) <= tol; };
    return precondition && primal_value.is_finite() && dual_value.is_finite() && small(primal_value.value()) &&
           small(dual_value.value()) && primal_attained() && dual_attained() && small(eq_S) && small(eq_T) &&
           small(eq_S_dual) && small(eq_T_dual);
  }
};

/// Strong duality with attainment for min f_S + hat f_T, once 0 is certified
/// in the range of S + T.
inline TotalDualityReport total_duality_check(const MonotoneGraph& S, const MonotoneGraph& T,
                                              const VerifyConfig& cfg = {}) {
  const auto pr = detail::prepare(S, T, cfg);
  const auto zero = detail::range_check(pr, S, T, 0.0, 0.0, cfg, false);
  if (zero.verdict != Verdict::kYes)
    throw std::domain_error("total_duality_check: 0 is not certified in the range of S + T");
  TotalDualityReport r;
  r.precondition = true;
  r.dual_value = -zero.value;
  r.dual_point = zero.witness;

  const auto m = minimize_pair(pr.f_S, {0.0, 0.0}, 1.0, pr.hat_T, {0.0, 0.0}, cfg);
  r.route = m.route;
  r.tol = m.route == Route::kGrid || zero.route == Route::kGrid ? cfg.tol_grid : cfg.tol_exact;
  r.primal_value = m.value;
  if (!m.boundary) r.primal_point = m.argmin;

  auto eqs = [&](const Point2& z, double& es, double& et) {
    const double c = z[0] * z[1];
    const ExtReal a = pr.f_S(z), b = pr.hat_T(z);
    es = a.is_finite() ? a.value() - c : kInf;
    et = b.is_finite() ? b.value() + c : kInf;
  };
  if (r.primal_point) eqs(*r.primal_point, r.eq_S, r.eq_T);
  if (r.dual_point) eqs({-(*r.dual_point)[1], -(*r.dual_point)[0]}, r.eq_S_dual, r.eq_T_dual);
  return r;
}

struct ZeroInRangeReport {
  RangeCheckReport range;
  std::optional<TotalDualityReport> total_duality;
};

inline ZeroInRangeReport zero_in_range(const MonotoneGraph& S, const MonotoneGraph& T, const VerifyConfig& cfg = {}) {
  ZeroInRangeReport out{range_membership(S, T, 0.0, 0.0, cfg), std::nullopt};
  if (out.range.verdict == Verdict::kYes) out.total_duality = total_duality_check(S, T, cfg);
  return out;
}

enum class Condition { kHolds, kFails, kUnknown };

inline const char* to_string(Condition c) {
  switch (c) {
    case Condition::kHolds: return "HOLDS";
    case Condition::kFails: return "FAILS";
    case Condition::kUnknown: return "UNKNOWN";
  }
  return "?";
}

inline Condition condition(bool b) { return b ? Condition::kHolds : Condition::kFails; }

/// Relative interior of a polyhedral set in words: its affine hull plus the
/// facet inequalities made strict.
inline std::string relative_interior_string(const PolyhedralSet2D& s) {
  if (s.is_empty()) return "empty";
  if (s.is_whole_plane()) return "R^2";
  std::ostringstream os;
  bool first = true;
  for (const auto& e : s.equalities()) {
    os << (first ? "" : ", ") << e.a << "*z1 + " << e.b << "*z2 = " << e.c;
    first = false;
  }
  for (const auto& h : s.inequalities()) {
    os << (first ? "" : ", ") << h.a << "*z1 + " << h.b << "*z2 < " << h.c;
    first = false;
  }
  return os.str();
}

/// Closed convex hull of a maximal monotone graph in the (x, x*) plane.
inline PolyhedralSet2D graph_hull(const MonotoneGraph& T) {
  std::vector<Point2> pts, rays;
  for (const auto& g : T.segments()) {
    for (double m : {g.m_lo, g.m_ref, g.m_hi}) {
      if (std::isfinite(m)) pts.push_back({g.x_at(m), g.s_at(m)});
    }
    const Point2 d{g.dx, 1.0 - g.dx};
    if (!std::isfinite(g.m_lo)) rays.push_back({-d[0], -d[1]});
    if (!std::isfinite(g.m_hi)) rays.push_back(d);
  }
  return PolyhedralSet2D::from_generators(pts, rays);
}

struct RegularityReport {
  Condition dom_fT_whole = Condition::kUnknown;
  Condition difference_whole = Condition::kUnknown;
  Condition sqri = Condition::kUnknown;
  Condition core = Condition::kUnknown;
  std::optional<PolyhedralSet2D> difference;  // dom f_S - dom hat f_T
  std::optional<PolyhedralSet2D> core_set;    // co G(S) - co G(-T)
  SweepReport rc;                             // at the given p
  SweepReport rc_bar;                         // at p = 0
  RangeCheckReport rc_tilde;                  // at (0, 0)

  bool chain_consistent() const {
    auto holds = [](Condition c) { return c == Condition::kHolds; };
    bool ok = true;
    if (holds(dom_fT_whole)) ok = ok && holds(difference_whole);
    if (holds(difference_whole)) ok = ok && holds(sqri);
    // Inconclusive grid verdicts do not contradict a sufficient condition.
    auto no_refutation = [](const SweepReport& s) {
      return std::none_of(s.reports.begin(), s.reports.end(),
                          [](const RangeCheckReport& r) { return r.verdict == Verdict::kNo; });
    };
    if (holds(sqri)) ok = ok && no_refutation(rc_bar);
    if (holds(core)) ok = ok && rc_tilde.verdict != Verdict::kNo;
    return ok;
  }
};

inline RegularityReport classical_conditions(const MonotoneGraph& S, const MonotoneGraph& T,
                                             const std::vector<double>& ps_grid, const VerifyConfig& cfg = {},
                                             double p = 0.0) {
  const auto pr = detail::prepare(S, T, cfg);
  RegularityReport r;
  const auto dT = pr.f_T.domain();
  const auto dS = pr.f_S.domain();
  const auto dhT = pr.hat_T.domain();
  if (dT) r.dom_fT_whole = condition(dT->is_whole_plane());
  if (dS && dhT) {
    r.difference = dS->minkowski_sum(dhT->negated());
    r.difference_whole = condition(r.difference->is_whole_plane());
    r.sqri = condition(r.difference->line_in_relative_interior({0.0, 0.0}, {0.0, 1.0}));
  }
  r.core_set = graph_hull(S).minkowski_sum(graph_hull(T).flipped_second().negated());
  r.core = condition(r.core_set->in_interior({0.0, 0.0}));
  r.rc = surjectivity_sweep(S, T, p, ps_grid, cfg);
  r.rc_bar = p == 0.0 ? r.rc : surjectivity_sweep(S, T, 0.0, ps_grid, cfg);
  r.rc_tilde = detail::range_check(pr, S, T, 0.0, 0.0, cfg, false);
  return r;
}

struct SingleEntry {
  double ps = 0.0;
  ExtReal reduced = ExtReal::inf();  // -(f_S*(p*, .))*(p*) = min over x of f_S*(p*, x) - p* x
  std::optional<double> witness;     // x with p* in the subdifferential of f_S*(p*, .) at x
  ExtReal fy_gap = ExtReal::inf();
  bool lsc = false;
  Verdict verdict = Verdict::kNo;
  bool oracle = false;
  std::string reason;

  bool agrees() const { return !is_conclusive(verdict) || (verdict == Verdict::kYes) == oracle; }
};

struct SingleReport {
  std::string rep;
  std::vector<SingleEntry> entries;
  SetOnLine oracle_range;
  bool all_yes = true;
  bool disagreement = false;
};

namespace detail {

/// x -> f_S*(y*, x), or nullopt when identically +inf or not exact.
inline std::optional<PlqFunction> partial_conjugate(const BivariateFn& a, double ys, bool& exact) {
  exact = true;
  if (const auto* s = std::get_if<SeparableForm>(&a.rep())) {
    const ExtReal v = s->first(ys);
    if (!v.is_finite()) return std::nullopt;
    return add(s->second, PlqFunction::quadratic(0.0, 0.0, v.value()));
  }
  if (const auto p = a.polyhedral()) return p->restrict_first(ys);
  exact = false;
  return std::nullopt;
}

}  // namespace detail

/// Surjectivity of a single operator through the partial conjugates of its
/// representative.
inline SingleReport single_surjectivity(const MonotoneGraph& S, const std::vector<double>& ps_grid,
                                        const VerifyConfig& cfg = {}) {
  if (!S.is_maximal()) throw std::invalid_argument("single_surjectivity: operator is not maximal");
  const auto fS = representative(S, cfg.rep_S);
  const auto a = conjugate_bivariate(fS, cfg.grid);
  SingleReport out;
  out.rep = to_string(cfg.rep_S);
  out.oracle_range = S.range();
  for (double ps : ps_grid) {
    SingleEntry e;
    e.ps = ps;
    e.oracle = out.oracle_range.contains(ps);
    bool exact = true;
    const auto part = detail::partial_conjugate(a, ps, exact);
    if (!exact) {
      e.verdict = Verdict::kInconclusiveResolution;
      e.reason = "partial conjugate is only available on a grid";
    } else if (!part) {
      e.verdict = Verdict::kNo;
      e.reason = "f_S*(p*, .) is identically +inf";
    } else {
      // Reduced value with the tilt fixed at p*. Lower semicontinuity is
      // probed by extrapolating the one-sided limits from two offsets.
      const auto m = minimize(transform_shift_tilt(*part, 0.0, ps), cfg.tol_exact);
      e.reduced = m.value;
      auto reduced_at = [&](double y) -> ExtReal {
        bool ex = true;
        const auto q = detail::partial_conjugate(a, y, ex);
        if (!q) return ExtReal::inf();
        return minimize(transform_shift_tilt(*q, 0.0, ps), cfg.tol_exact).value;
      };
      const double d = 1e-4 * std::max(1.0, std::abs(ps));
      bool lsc = true;
      for (double sgn : {-1.0, 1.0}) {
        const ExtReal far = reduced_at(ps + sgn * d), near = reduced_at(ps + sgn * d / 2);
        if (near.is_neg_inf()) lsc = false;
        if (!far.is_finite() || !near.is_finite() || !e.reduced.is_finite()) continue;
        const double limit = 2 * near.value() - far.value();
        if (e.reduced.value() > limit + 1e-6 * std::max(1.0, std::abs(e.reduced.value()))) lsc = false;
      }
      e.lsc = lsc;
      if (m.argmin) {
        e.witness = *m.argmin;
        e.fy_gap = fenchel_young_gap(*part, *m.argmin, ps);
      }
      const double tol = cfg.tol_exact * std::max(1.0, std::abs(ps));
      if (e.witness && e.fy_gap.is_finite() && std::abs(e.fy_gap.value()) <= tol && e.lsc) {
        e.verdict = Verdict::kYes;
        e.reason = "p* is a subgradient of the partial conjugate";
      } else {
        e.verdict = Verdict::kNo;
        e.reason = m.value.is_neg_inf() ? "partial conjugate unbounded below after tilting" : "no attaining x";
      }
    }
    out.all_yes = out.all_yes && e.verdict == Verdict::kYes;
    out.disagreement = out.disagreement || !e.agrees();
    out.entries.push_back(std::move(e));
  }
  return out;
}

/// Range of S(p + .) + N_U through the unique representative of N_U.
inline SweepReport normal_cone_driver(const MonotoneGraph& S, double lo, double hi, double p,
                                      const std::vector<double>& ps_grid, VerifyConfig cfg = {}) {
  if (!(lo <= hi)) throw std::invalid_argument("normal_cone_driver: empty interval");
  cfg.rep_T = RepresentativeKind::kFenchel;
  return surjectivity_sweep(S, normal_cone(lo, hi), p, ps_grid, cfg);
}

struct InfConvCheck {
  ExtReal value = ExtReal::inf();    // inf-convolution at the point
  ExtReal closure = ExtReal::inf();  // its lsc hull there
  std::optional<double> witness;
  bool holds = false;
};

struct SubdiffEntry {
  double ps = 0.0;
  bool dual_domains_meet = false;
  InfConvCheck primal;  // f inf-convolved with (g(-.) + p* .) at p
  InfConvCheck dual;    // f* inf-convolved with (g* + p .) at p*
  Verdict verdict = Verdict::kNo;
  bool oracle = false;
  std::optional<Verdict> bivariate;
  std::string reason;

  bool agrees() const {
    if (!is_conclusive(verdict)) return true;
    const bool yes = verdict == Verdict::kYes;
    if (yes != oracle) return false;
    return !bivariate || !is_conclusive(*bivariate) || (*bivariate == Verdict::kYes) == yes;
  }
};

struct SubdiffReport {
  bool hypothesis = false;
  std::vector<SubdiffEntry> entries;
  SetOnLine oracle_range;
  bool all_yes = true;
  bool disagreement = false;
};

namespace detail {

/// Value, lsc hull and attainment of (f inf-convolved with k) at a, with the
/// hull computed as (f* + k*)*.
inline InfConvCheck infconv_check(const PlqFunction& f, const PlqFunction& k, double a, double tol) {
  InfConvCheck c;
  try {
    const InfConvolution ic(f, k);
    c.value = ic(a);
    c.witness = ic.witness(a, tol);
  } catch (const std::domain_error&) {
    c.value = ExtReal::neg_inf();
  }
  try {
    c.closure = conjugate(add(conjugate(f), conjugate(k)))(a);
  } catch (const std::invalid_argument&) {
    c.closure = ExtReal::neg_inf();
  }
  c.holds = c.value.is_finite() && c.closure.is_finite() &&
            std::abs(c.value.value() - c.closure.value()) <= tol * std::max(1.0, std::abs(c.value.value())) &&
            c.witness.has_value();
  return c;
}

}  // namespace detail

/// Surjectivity of df(p + .) + dg through two univariate conditions, with
/// the bivariate test and the oracle alongside.
inline SubdiffReport subdiff_driver(const PlqFunction& f, const PlqFunction& g, double p,
                                    const std::vector<double>& ps_grid, const VerifyConfig& cfg = {}) {
  if (!convexity_check(f) || !convexity_check(g)) throw std::invalid_argument("subdiff_driver: nonconvex input");
  SubdiffReport out;
  const auto S = from_subdifferential(f), T = from_subdifferential(g);
  out.oracle_range = sum_range_oracle(S, T, p);
  out.hypothesis = !f.domain().intersect(g.domain().translated(p)).is_empty();
  const auto fs = conjugate(f), gs = conjugate(g);
  VerifyConfig bcfg = cfg;
  bcfg.rep_S = bcfg.rep_T = RepresentativeKind::kFenchel;
  std::optional<detail::Prepared> pr;
  if (out.hypothesis) pr = detail::prepare(S, T, bcfg);
  for (double ps : ps_grid) {
    SubdiffEntry e;
    e.ps = ps;
    e.oracle = out.oracle_range.contains(ps);
    if (!out.hypothesis) {
      e.verdict = Verdict::kNo;
      e.reason = "dom f and p + dom g do not meet";
      out.all_yes = false;
      out.disagreement = out.disagreement || !e.agrees();
      out.entries.push_back(std::move(e));
      continue;
    }
    e.bivariate = detail::range_check(*pr, S, T, p, ps, bcfg, false).verdict;
    // dom f* meets p* - dom g*.
    e.dual_domains_meet = !fs.domain().intersect(reflect(gs).domain().translated(ps)).is_empty();
    const PlqFunction k1 = transform_shift_tilt(reflect(g), 0.0, -ps);
    const PlqFunction k2 = transform_shift_tilt(gs, 0.0, -p);
    e.primal = detail::infconv_check(f, k1, p, cfg.tol_exact);
    if (e.dual_domains_meet) e.dual = detail::infconv_check(fs, k2, ps, cfg.tol_exact);
    if (!e.dual_domains_meet) {
      e.verdict = Verdict::kNo;
      e.reason = "dom f* and p* - dom g* do not meet";
    } else if (e.primal.holds && e.dual.holds) {
      e.verdict = Verdict::kYes;
      e.reason = "both inf-convolutions are lsc and exact";
    } else {
      e.verdict = Verdict::kNo;
      e.reason = e.primal.holds ? "dual inf-convolution is not lsc and exact" : "primal inf-convolution is not lsc and exact";
    }
    out.all_yes = out.all_yes && e.verdict == Verdict::kYes;
    out.disagreement = out.disagreement || !e.agrees();
    out.entries.push_back(std::move(e));
  }
  return out;
}

}  // namespace fitzrange
