#pragma once

// Representative functions of maximal monotone graphs on R: the
// Fitzpatrick function, the Fenchel representative f(x) + f*(x*), the
// largest representative psi_T, and their conjugates.

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "fitzrange/ext_real.hpp"
#include "fitzrange/grid.hpp"
#include "fitzrange/operators.hpp"
#include "fitzrange/plq.hpp"
#include "fitzrange/polyhedral.hpp"

namespace fitzrange {

/// (x, x*) for a function on X x X*, (x*, x) for its conjugate.
enum class ArgOrder { kPrimalDual, kDualPrimal };

inline const char* to_string(ArgOrder o) { return o == ArgOrder::kPrimalDual ? "(x,x*)" : "(x*,x)"; }
inline ArgOrder swapped(ArgOrder o) { return o == ArgOrder::kPrimalDual ? ArgOrder::kDualPrimal : ArgOrder::kPrimalDual; }

/// first(z1) + second(z2).
struct SeparableForm {
  PlqFunction first;
  PlqFunction second;
};

/// The Fitzpatrick function of a graph, evaluated segment by segment; with
/// `hat` the second argument is negated first.
struct FitzpatrickForm {
  MonotoneGraph graph;
  bool hat = false;
};

struct GridSpec {
  double box = 8.0;
  int n = 257;

  Axis axis() const { return {-box, box, n}; }
};

namespace detail {

/// sup over the segment of y* x + x* y - y* y.
inline double fitzpatrick_on_segment(const Segment& g, double x, double xs) {
  if (g.is_point() && std::isfinite(g.m_lo)) {
    const double y = g.x_at(g.m_lo), s = g.s_at(g.m_lo);
    return s * x + xs * y - y * s;
  }
  auto support = [](double lo, double hi, double v) {
    if (v > 0) return hi * v;
    if (v < 0) return lo * v;
    return 0.0;
  };
  if (g.is_vertical()) {
    const double y0 = g.x_ref;
    return xs * y0 + support(g.s_lo(), g.s_hi(), x - y0);
  }
  if (g.dx == 1.0) {
    const double c = g.s_lo();
    return c * x + support(g.x_lo(), g.x_hi(), xs - c);
  }
  // s = k y + b with k > 0: maximize -k y^2 + y (k x + xs - b) + b x.
  const double k = g.slope(), b = g.intercept();
  const double lo = g.x_lo(), hi = g.x_hi();
  const double y = std::clamp((k * x + xs - b) / (2.0 * k), lo, hi);
  return -k * y * y + y * (k * x + xs - b) + b * x;
}

inline bool axis_parallel(const MonotoneGraph& T) {
  return std::all_of(T.segments().begin(), T.segments().end(),
                     [](const Segment& g) { return g.is_point() || g.dx == 0.0 || g.dx == 1.0; });
}

/// Exact polyhedral form of the Fitzpatrick function of an axis-parallel
/// graph: each segment contributes the support function of an interval.
inline PolyhedralFn2D fitzpatrick_polyhedral(const MonotoneGraph& T) {
  std::vector<AffinePiece> ps;
  std::vector<HalfPlane> dom;
  for (const auto& g : T.segments()) {
    if (g.is_point() && std::isfinite(g.m_lo)) {
      const double y = g.x_at(g.m_lo), s = g.s_at(g.m_lo);
      ps.push_back({s, y, -y * s});
    } else if (g.is_vertical()) {
      const double y0 = g.x_ref, lo = g.s_lo(), hi = g.s_hi();
      if (std::isfinite(lo)) ps.push_back({lo, y0, -lo * y0});
      else dom.push_back({-1, 0, -y0});
      if (std::isfinite(hi)) ps.push_back({hi, y0, -hi * y0});
      else dom.push_back({1, 0, y0});
      if (!std::isfinite(lo) && !std::isfinite(hi)) ps.push_back({0, y0, 0});
    } else {
      const double c = g.s_lo(), lo = g.x_lo(), hi = g.x_hi();
      if (std::isfinite(lo)) ps.push_back({c, lo, -lo * c});
      else dom.push_back({0, -1, -c});
      if (std::isfinite(hi)) ps.push_back({c, hi, -hi * c});
      else dom.push_back({0, 1, c});
      if (!std::isfinite(lo) && !std::isfinite(hi)) ps.push_back({c, 0, 0});
    }
  }
  return PolyhedralFn2D(ps, PolyhedralSet2D(dom)).canonical();
}

/// Domain of the Fitzpatrick function: only unbounded axis-parallel
/// segments constrain it.
inline PolyhedralSet2D fitzpatrick_domain(const MonotoneGraph& T) {
  std::vector<HalfPlane> dom;
  for (const auto& g : T.segments()) {
    if (g.is_point()) continue;
    if (g.is_vertical()) {
      if (!std::isfinite(g.s_lo())) dom.push_back({-1, 0, -g.x_ref});
      if (!std::isfinite(g.s_hi())) dom.push_back({1, 0, g.x_ref});
    } else if (g.dx == 1.0) {
      if (!std::isfinite(g.x_lo())) dom.push_back({0, -1, -g.s_lo()});
      if (!std::isfinite(g.x_hi())) dom.push_back({0, 1, g.s_lo()});
    }
  }
  return PolyhedralSet2D(dom);
}

inline PolyhedralSet2D interval_box(const PlqFunction& f1, const PlqFunction& f2) {
  const auto d1 = f1.domain(), d2 = f2.domain();
  return PolyhedralSet2D::box(d1.inf(), d1.sup(), d2.inf(), d2.sup());
}

}  // namespace detail

/// A convex function on R^2 in one of three representations: polyhedral
/// max-of-affine, closed form (separable or segment-wise Fitzpatrick), or a
/// sampled grid. A linear tilt can ride along on the non-exact forms.
class BivariateFn {
 public:
  using Rep = std::variant<PolyhedralFn2D, SeparableForm, FitzpatrickForm, GridFn>;

  BivariateFn(Rep rep, ArgOrder order, std::string represents = "")
      : rep_(std::move(rep)), order_(order), represents_(std::move(represents)) {
    if (const auto* g = std::get_if<GridFn>(&rep_); g && g->dimension() != 2)
      throw std::invalid_argument("BivariateFn: grid must be two-dimensional");
  }

  const Rep& rep() const { return rep_; }
  ArgOrder arg_order() const { return order_; }
  bool is_conjugate() const { return order_ == ArgOrder::kDualPrimal; }
  const std::string& represents() const { return represents_; }
  const Point2& tilt() const { return tilt_; }

  /// "polyhedral-max", "closed-form" or "grid".
  std::string tag() const {
    if (std::holds_alternative<PolyhedralFn2D>(rep_)) return "polyhedral-max";
    if (std::holds_alternative<GridFn>(rep_)) return "grid";
    return "closed-form";
  }
  bool is_exact() const { return !std::holds_alternative<GridFn>(rep_); }

  ExtReal operator()(double z1, double z2) const {
    ExtReal v = raw(z1, z2);
    if (!v.is_finite()) return v;
    return ExtReal(v.value() + tilt_[0] * z1 + tilt_[1] * z2);
  }
  ExtReal operator()(const Point2& z) const { return (*this)(z[0], z[1]); }

  /// Polyhedral form when one exists.
  std::optional<PolyhedralFn2D> polyhedral() const {
    std::optional<PolyhedralFn2D> out;
    if (const auto* p = std::get_if<PolyhedralFn2D>(&rep_)) out = *p;
    else if (const auto* s = std::get_if<SeparableForm>(&rep_)) out = separable_as_polyhedral(s->first, s->second);
    else if (const auto* f = std::get_if<FitzpatrickForm>(&rep_); f && detail::axis_parallel(f->graph)) {
      out = detail::fitzpatrick_polyhedral(f->graph);
      if (f->hat) out = out->hat();
    }
    if (out && (tilt_[0] != 0.0 || tilt_[1] != 0.0)) out = out->tilted(tilt_);
    return out;
  }

  /// Effective domain; nullopt for grid samples.
  std::optional<PolyhedralSet2D> domain() const {
    if (const auto* p = std::get_if<PolyhedralFn2D>(&rep_)) return p->domain();
    if (const auto* s = std::get_if<SeparableForm>(&rep_)) return detail::interval_box(s->first, s->second);
    if (const auto* f = std::get_if<FitzpatrickForm>(&rep_)) {
      const auto d = detail::fitzpatrick_domain(f->graph);
      return f->hat ? d.flipped_second() : d;
    }
    return std::nullopt;
  }

  /// z -> h(z) + <m, z>.
  BivariateFn tilted(const Point2& m) const {
    BivariateFn out = *this;
    if (auto* p = std::get_if<PolyhedralFn2D>(&out.rep_)) {
      *p = p->tilted(m);
    } else if (auto* s = std::get_if<SeparableForm>(&out.rep_)) {
      s->first = transform_shift_tilt(s->first, 0.0, -m[0]);
      s->second = transform_shift_tilt(s->second, 0.0, -m[1]);
    } else {
      out.tilt_ = {tilt_[0] + m[0], tilt_[1] + m[1]};
    }
    return out;
  }

  std::string to_string() const {
    std::ostringstream os;
    os << tag() << " " << fitzrange::to_string(order_);
    if (!represents_.empty()) os << " [" << represents_ << "]";
    os << ": ";
    if (const auto* p = std::get_if<PolyhedralFn2D>(&rep_)) os << p->to_string();
    else if (const auto* s = std::get_if<SeparableForm>(&rep_))
      os << "(" << s->first.to_string() << ") + (" << s->second.to_string() << ")";
    else if (const auto* f = std::get_if<FitzpatrickForm>(&rep_))
      os << "fitzpatrick" << (f->hat ? "-hat" : "") << " of " << f->graph.to_string();
    else {
      const auto& g = std::get<GridFn>(rep_);
      os << g.axes()[0].n << "x" << g.axes()[1].n << " on [" << g.axes()[0].lo << "," << g.axes()[0].hi << "]^2";
    }
    if (tilt_[0] != 0.0 || tilt_[1] != 0.0) os << " + <(" << tilt_[0] << "," << tilt_[1] << "), z>";
    return os.str();
  }

 private:
  ExtReal raw(double z1, double z2) const {
    if (const auto* p = std::get_if<PolyhedralFn2D>(&rep_)) return (*p)(z1, z2);
    if (const auto* s = std::get_if<SeparableForm>(&rep_)) {
      const ExtReal a = s->first(z1);
      if (a.is_pos_inf()) return a;
      const ExtReal b = s->second(z2);
      if (b.is_pos_inf()) return b;
      return a + b;
    }
    if (const auto* f = std::get_if<FitzpatrickForm>(&rep_)) {
      const double xs = f->hat ? -z2 : z2;
      double v = -kInf;
      for (const auto& g : f->graph.segments()) v = std::max(v, detail::fitzpatrick_on_segment(g, z1, xs));
      return std::isinf(v) ? ExtReal::inf() : ExtReal(v);
    }
    const auto& g = std::get<GridFn>(rep_);
    const auto i = g.axes()[0].nearest(z1);
    const auto j = g.axes()[1].nearest(z2);
    if (!i || !j) return ExtReal::inf();
    const double v = g.at(*i, *j);
    return std::isinf(v) ? ExtReal::inf() : ExtReal(v);
  }

  Rep rep_;
  ArgOrder order_;
  std::string represents_;
  Point2 tilt_{0.0, 0.0};
};

/// The Fitzpatrick function of a maximal monotone graph: polyhedral when all
/// segments are axis-parallel, segment-wise closed form otherwise.
inline BivariateFn fitzpatrick_fn(const MonotoneGraph& T) {
  if (!T.is_maximal()) throw std::invalid_argument("fitzpatrick_fn: graph is not maximal monotone");
  if (detail::axis_parallel(T)) return {detail::fitzpatrick_polyhedral(T), ArgOrder::kPrimalDual, "fitzpatrick"};
  return {FitzpatrickForm{T, false}, ArgOrder::kPrimalDual, "fitzpatrick"};
}

/// (x, x*) -> f(x) + f*(x*).
inline BivariateFn fenchel_representative(const PlqFunction& f) {
  if (!convexity_check(f)) throw std::invalid_argument("fenchel_representative: function is not convex");
  return {SeparableForm{f, conjugate(f)}, ArgOrder::kPrimalDual, "fenchel"};
}

/// Distance in the (x, x*) plane from a point to the graph.
inline double distance_to_graph(const MonotoneGraph& T, double x, double xs) {
  double best = kInf;
  for (const auto& g : T.segments()) {
    // Points on the segment are P(m) = (x_at(m), s_at(m)), affine in m with
    // velocity (dx, 1 - dx).
    const double vx = g.dx, vs = 1.0 - g.dx;
    const double px = g.x_ref, ps = g.m_ref - g.x_ref;
    double t = ((x - px) * vx + (xs - ps) * vs) / (vx * vx + vs * vs);
    t = std::clamp(t, g.m_lo - g.m_ref, g.m_hi - g.m_ref);
    best = std::min(best, std::hypot(x - (px + t * vx), xs - (ps + t * vs)));
  }
  return best;
}

/// cl co(c + delta_sample) as a polyhedral function.
inline BivariateFn psi_T(const MonotoneGraph& T, const std::vector<Point2>& sample) {
  if (sample.empty()) throw std::invalid_argument("psi_T: empty sample");
  std::vector<detail::Vec3> P;
  for (const auto& [y, s] : sample) {
    if (distance_to_graph(T, y, s) > 1e-9 * std::max({1.0, std::abs(y), std::abs(s)}))
      throw std::invalid_argument("psi_T: sample point is not on the graph");
    P.push_back({y, s, y * s});
  }
  return {PolyhedralFn2D::from_epigraph_generators(P, {{0, 0, 1}}), ArgOrder::kPrimalDual, "psi"};
}

/// psi_T over the whole graph; polyhedral only for axis-parallel graphs,
/// where c restricted to each segment is affine.
inline BivariateFn psi_T_full(const MonotoneGraph& T) {
  if (!detail::axis_parallel(T)) throw std::domain_error("psi_T_full: graph has a sloped segment");
  std::vector<detail::Vec3> P, R = {{0, 0, 1}};
  auto lift = [&](double m, const Segment& g) {
    const double y = g.x_at(m), s = g.s_at(m);
    P.push_back({y, s, y * s});
  };
  for (const auto& g : T.segments()) {
    lift(g.m_ref, g);
    if (std::isfinite(g.m_lo)) lift(g.m_lo, g);
    if (std::isfinite(g.m_hi)) lift(g.m_hi, g);
    // Along a vertical segment c changes at rate y0, along a horizontal one
    // at rate c.
    const detail::Vec3 d = g.is_vertical() ? detail::Vec3{0, 1, g.x_ref} : detail::Vec3{1, 0, g.s_lo()};
    if (!std::isfinite(g.m_lo)) R.push_back(-d);
    if (!std::isfinite(g.m_hi)) R.push_back(d);
  }
  return {PolyhedralFn2D::from_epigraph_generators(P, R), ArgOrder::kPrimalDual, "psi"};
}

/// (z1, z2) -> h(z1, -z2).
inline BivariateFn hat_transform(const BivariateFn& h) {
  const Point2 t = h.tilt();
  BivariateFn out = [&]() -> BivariateFn {
    const auto& rep = h.rep();
    if (const auto* p = std::get_if<PolyhedralFn2D>(&rep)) return {p->hat(), h.arg_order(), h.represents()};
    if (const auto* s = std::get_if<SeparableForm>(&rep))
      return {SeparableForm{s->first, reflect(s->second)}, h.arg_order(), h.represents()};
    if (const auto* f = std::get_if<FitzpatrickForm>(&rep))
      return {FitzpatrickForm{f->graph, !f->hat}, h.arg_order(), h.represents()};
    const auto& g = std::get<GridFn>(rep);
    const Axis ax = g.axes()[0], ay = g.axes()[1];
    if (ay.lo != -ay.hi) throw std::invalid_argument("hat_transform: grid axis is not symmetric");
    std::vector<double> v(g.values().size());
    for (int i = 0; i < ax.n; ++i)
      for (int j = 0; j < ay.n; ++j) v[static_cast<std::size_t>(i) * ay.n + j] = g.at(i, ay.n - 1 - j);
    return {GridFn({ax, ay}, std::move(v)), h.arg_order(), h.represents()};
  }();
  return out.tilted({t[0], -t[1]});
}

/// Fenchel conjugate; exact for polyhedral and separable forms, discrete
/// Legendre transform on `spec` otherwise. The argument order is swapped.
inline BivariateFn conjugate_bivariate(const BivariateFn& h, const GridSpec& spec = {}) {
  const ArgOrder order = swapped(h.arg_order());
  const std::string rep = h.represents().empty() ? "" : h.represents() + "*";
  // The tilt of a separable form is always absorbed.
  if (const auto* s = std::get_if<SeparableForm>(&h.rep()))
    return {SeparableForm{conjugate(s->first), conjugate(s->second)}, order, rep};
  if (const auto p = h.polyhedral()) return {p->conjugate(), order, rep};
  const Point2 t = h.tilt();
  GridFn samples = [&] {
    if (const auto* g = std::get_if<GridFn>(&h.rep())) {
      if (t[0] == 0.0 && t[1] == 0.0) return *g;
      return GridFn::sample(g->axes()[0], g->axes()[1], [&](double a, double b) { return h(a, b); });
    }
    const Axis ax = spec.axis();
    return GridFn::sample(ax, ax, [&](double a, double b) { return h(a, b); });
  }();
  const auto& axes = samples.axes();
  return {llt_2d(samples, axes[0], axes[1]), order, rep};
}

enum class RepresentativeKind { kFenchel, kFitzpatrick };

inline const char* to_string(RepresentativeKind k) {
  return k == RepresentativeKind::kFenchel ? "fenchel" : "fitzpatrick";
}

/// The chosen representative of T; every maximal monotone T on R is the
/// subdifferential of its potential, so the Fenchel form always exists.
inline BivariateFn representative(const MonotoneGraph& T, RepresentativeKind kind) {
  if (!T.is_maximal()) throw std::invalid_argument("representative: graph is not maximal monotone");
  if (kind == RepresentativeKind::kFitzpatrick) return fitzpatrick_fn(T);
  return fenchel_representative(potential(T));
}

struct ValidityReport {
  bool minorant = true;           // h >= c at all nodes
  bool conjugate_minorant = true;  // h*(x*, x) >= c at all nodes
  bool equality_on_graph = true;   // h = c at sampled graph points
  bool equality_near_graph = true; // h = c only at nodes within one step of G(T)
  bool strict_off_graph = true;    // h > c at nodes at least two steps away
  bool convex = true;              // discrete midpoint convexity
  double worst_minorant = 0.0;
  double worst_conjugate = 0.0;
  double worst_graph = 0.0;
  double worst_convexity = 0.0;
  int nodes = 0;
  int equality_nodes = 0;
  double tol = 0.0;

  bool ok() const {
    return minorant && conjugate_minorant && equality_on_graph && equality_near_graph && strict_off_graph && convex;
  }
};

/// Checks the defining properties of a representative function of T on the
/// nodes of `ax` x `ax`. The tolerance is 1e-9 for exact forms and 1e-6 for
/// grid-backed ones unless given.
inline ValidityReport representative_validity_check(const BivariateFn& h, const MonotoneGraph& T, const Axis& ax,
                                                    std::optional<double> tol_override = std::nullopt) {
  ValidityReport r;
  const BivariateFn hc = conjugate_bivariate(h, {ax.hi, ax.n});
  r.tol = tol_override ? *tol_override : (h.is_exact() && hc.is_exact() ? 1e-9 : 1e-6);
  const double tol = r.tol;
  const double step = ax.step();
  auto value = [&](const BivariateFn& f, double x, double xs) {
    return f.arg_order() == ArgOrder::kPrimalDual ? f(x, xs) : f(xs, x);
  };
  auto rel = [&](double c) { return tol * std::max(1.0, std::abs(c)); };

  std::vector<double> vals(static_cast<std::size_t>(ax.n) * ax.n);
  for (int i = 0; i < ax.n; ++i) {
    for (int j = 0; j < ax.n; ++j) {
      const double x = ax.node(i), xs = ax.node(j);
      const double c = x * xs;
      const ExtReal v = value(h, x, xs);
      vals[static_cast<std::size_t>(i) * ax.n + j] = v.is_finite() ? v.value() : kInf;
      ++r.nodes;
      if (v.is_finite()) {
        const double gap = v.value() - c;
        if (gap < -rel(c)) {
          r.minorant = false;
          r.worst_minorant = std::min(r.worst_minorant, gap);
        }
        const double d = distance_to_graph(T, x, xs);
        if (std::abs(gap) <= rel(c)) {
          ++r.equality_nodes;
          if (d > step * (1.0 + 1e-12)) r.equality_near_graph = false;
        } else if (d <= 1e-12) {
          r.equality_on_graph = false;
          r.worst_graph = std::max(r.worst_graph, std::abs(gap));
        }
        if (d >= 2.0 * step && gap <= rel(c)) r.strict_off_graph = false;
      } else if (distance_to_graph(T, x, xs) <= 1e-12) {
        r.equality_on_graph = false;
        r.worst_graph = kInf;
      }
      const ExtReal w = value(hc, x, xs);
      if (w.is_finite() && w.value() - c < -rel(c)) {
        // Grid conjugates near the truncation box are lower bounds only.
        const bool interior = std::abs(x) < ax.hi - 2 * step && std::abs(xs) < ax.hi - 2 * step;
        if (hc.is_exact() || interior) {
          r.conjugate_minorant = false;
          r.worst_conjugate = std::min(r.worst_conjugate, w.value() - c);
        }
      }
    }
  }

  // Exact graph samples: segment endpoints and interior points.
  for (const auto& g : T.segments()) {
    std::vector<double> ms = {g.m_ref};
    if (std::isfinite(g.m_lo)) ms.push_back(g.m_lo);
    if (std::isfinite(g.m_hi)) ms.push_back(g.m_hi);
    for (double t : {0.5, 1.0, 2.5}) {
      if (g.m_ref + t <= g.m_hi) ms.push_back(g.m_ref + t);
      if (g.m_ref - t >= g.m_lo) ms.push_back(g.m_ref - t);
    }
    for (double m : ms) {
      const double x = g.x_at(m), xs = g.s_at(m);
      const ExtReal v = value(h, x, xs);
      const double err = v.is_finite() ? std::abs(v.value() - x * xs) : kInf;
      if (err > rel(x * xs)) {
        r.equality_on_graph = false;
        r.worst_graph = std::max(r.worst_graph, err);
      }
    }
  }

  auto at = [&](int i, int j) { return vals[static_cast<std::size_t>(i) * ax.n + j]; };
  const int dirs[4][2] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};
  for (int i = 1; i + 1 < ax.n; ++i) {
    for (int j = 1; j + 1 < ax.n; ++j) {
      for (const auto& d : dirs) {
        const double a = at(i - d[0], j - d[1]), b = at(i + d[0], j + d[1]), m = at(i, j);
        if (std::isinf(a) || std::isinf(b)) continue;
        const double excess = m - 0.5 * (a + b);
        if (excess > rel(m)) {
          r.convex = false;
          r.worst_convexity = std::max(r.worst_convexity, excess);
        }
      }
    }
  }
  return r;
}

}  // namespace fitzrange
