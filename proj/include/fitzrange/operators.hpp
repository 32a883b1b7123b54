#pragma once

// Monotone operators on the real line as piecewise linear monotone curves.
//
// A graph is stored in its Minty parametrization m = x + s. Each segment
// covers a closed m-interval on which x(m) = x_ref + dx (m - m_ref) with
// dx in [0, 1] and s(m) = m - x(m): dx = 0 is a vertical piece, dx = 1 a
// horizontal one, otherwise s = k x + c with k = 1/dx - 1 > 0.

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fitzrange/plq.hpp"
#include "fitzrange/set_on_line.hpp"

namespace fitzrange {

struct Segment {
  double m_lo;
  double m_hi;
  double m_ref;
  double x_ref;
  double dx;

  bool is_vertical() const { return dx == 0.0; }
  bool is_point() const { return m_lo == m_hi; }
  double x_at(double m) const {
    if (dx == 0.0) return x_ref;
    if (std::isinf(m)) return m;
    return x_ref + dx * (m - m_ref);
  }
  double s_at(double m) const {
    if (dx == 1.0) return m_ref - x_ref;
    if (std::isinf(m)) return m;
    return m - x_at(m);
  }
  /// s = k x + c on a non-vertical segment.
  double slope() const { return 1.0 / dx - 1.0; }
  double intercept() const { return m_ref - x_ref / dx; }
  double x_lo() const { return x_at(m_lo); }
  double x_hi() const { return x_at(m_hi); }
  double s_lo() const { return s_at(m_lo); }
  double s_hi() const { return s_at(m_hi); }
  /// s at a given x on a non-vertical segment; exact at the ends.
  double s_of_x(double x) const {
    if (x == x_lo()) return s_lo();
    if (x == x_hi()) return s_hi();
    return m_ref + (x - x_ref) / dx - x;
  }

  friend bool operator==(const Segment&, const Segment&) = default;
};

struct Direction {
  double dx;
  double ds;
};

class MonotoneGraph {
 public:
  /// Validates ordering, dx in [0, 1] and monotonicity across gaps; touching
  /// segments must meet at the same point. Throws std::invalid_argument.
  explicit MonotoneGraph(std::vector<Segment> segs) : segs_(std::move(segs)) {
    if (segs_.empty()) throw std::invalid_argument("MonotoneGraph: no segments");
    for (std::size_t k = 0; k < segs_.size(); ++k) {
      const auto& g = segs_[k];
      if (!(g.dx >= 0.0 && g.dx <= 1.0)) throw std::invalid_argument("MonotoneGraph: dx must lie in [0, 1]");
      if (!(g.m_lo <= g.m_hi)) throw std::invalid_argument("MonotoneGraph: segment with m_lo > m_hi");
      if (!std::isfinite(g.m_ref) || !std::isfinite(g.x_ref))
        throw std::invalid_argument("MonotoneGraph: reference point must be finite");
      if (k == 0) continue;
      const auto& p = segs_[k - 1];
      if (!(p.m_hi <= g.m_lo)) throw std::invalid_argument("MonotoneGraph: segments overlap or are unordered");
      const double tol = 1e-9 * detail::scale_of(p.x_hi());
      if (p.m_hi == g.m_lo) {
        if (std::abs(p.x_hi() - g.x_lo()) > tol) throw std::invalid_argument("MonotoneGraph: segments do not meet");
      } else if (g.x_lo() < p.x_hi() - tol || g.s_lo() < p.s_hi() - tol) {
        throw std::invalid_argument("MonotoneGraph: not monotone across a gap");
      }
    }
  }

  /// The maximal monotone curve through `vertices` (in increasing order of
  /// x + s) with end rays. Both directions are given with nonnegative
  /// components; the left ray leaves the first vertex along -left.
  static MonotoneGraph polyline(const std::vector<std::pair<double, double>>& vertices, Direction left,
                                Direction right) {
    if (vertices.empty()) throw std::invalid_argument("polyline: need a vertex");
    auto rate = [](Direction d) {
      const double dm = d.dx + d.ds;
      if (!(d.dx >= 0 && d.ds >= 0 && dm > 0)) throw std::invalid_argument("polyline: direction is not monotone");
      return d.dx / dm;
    };
    std::vector<Segment> segs;
    const auto [x0, s0] = vertices.front();
    segs.push_back({-kInf, x0 + s0, x0 + s0, x0, rate(left)});
    // Rounding noise from upstream arithmetic is snapped onto the previous vertex.
    double xa = x0, sa = s0;
    for (std::size_t k = 1; k < vertices.size(); ++k) {
      auto [xb, sb] = vertices[k];
      const double tol = 1e-9 * std::max(detail::scale_of(xa), detail::scale_of(sa));
      if (xb < xa - tol || sb < sa - tol) throw std::invalid_argument("polyline: vertices are not monotone");
      if (xb - xa <= tol) xb = xa;
      if (sb - sa <= tol) sb = sa;
      const double ma = xa + sa, mb = xb + sb;
      if (!(ma < mb)) continue;
      segs.push_back({ma, mb, ma, xa, (xb - xa) / (mb - ma)});
      xa = xb;
      sa = sb;
    }
    const double xn = xa, sn = sa;
    segs.push_back({xn + sn, kInf, xn + sn, xn, rate(right)});
    return MonotoneGraph(std::move(segs));
  }

  const std::vector<Segment>& segments() const { return segs_; }

  /// Minty test: the segments cover every m in R without gaps.
  bool is_maximal() const {
    if (segs_.front().m_lo != -kInf || segs_.back().m_hi != kInf) return false;
    for (std::size_t k = 1; k < segs_.size(); ++k) {
      if (segs_[k - 1].m_hi != segs_[k].m_lo) return false;
    }
    return true;
  }

  SetOnLine eval(double x) const {
    SetOnLine out;
    for (const auto& g : segs_) {
      if (g.is_vertical()) {
        if (g.x_ref == x) out.add(Interval::closed(g.m_lo - x, g.m_hi - x));
        continue;
      }
      if (x < g.x_lo() || x > g.x_hi()) continue;
      out.add(Interval::point(g.s_of_x(x)));
    }
    return out;
  }

  SetOnLine domain() const {
    SetOnLine d;
    for (const auto& g : segs_) d.add(Interval::closed(g.x_lo(), g.x_hi()));
    return d;
  }
  SetOnLine range() const {
    SetOnLine r;
    for (const auto& g : segs_) r.add(Interval::closed(g.s_lo(), g.s_hi()));
    return r;
  }

  /// Graph of x -> T(x + p): translated by -p along x.
  MonotoneGraph shifted(double p) const {
    std::vector<Segment> segs = segs_;
    for (auto& g : segs) {
      g.m_lo -= p;
      g.m_hi -= p;
      g.m_ref -= p;
      g.x_ref -= p;
    }
    return MonotoneGraph(std::move(segs));
  }

  /// The non-vertical segment whose open x-interval contains x, if any.
  const Segment* sloped_at(double x) const {
    for (const auto& g : segs_) {
      if (!g.is_vertical() && !g.is_point() && g.x_lo() < x && x < g.x_hi()) return &g;
    }
    return nullptr;
  }

  /// Every finite x where the graph has a vertex or a vertical piece.
  std::vector<double> critical_xs() const {
    std::vector<double> xs;
    for (const auto& g : segs_) {
      xs.push_back(g.x_lo());
      xs.push_back(g.x_hi());
    }
    detail::sort_unique(xs);
    return xs;
  }

  std::string to_string() const {
    std::ostringstream os;
    for (const auto& g : segs_) {
      os << "[" << g.m_lo << ", " << g.m_hi << "]: (" << g.x_lo() << ", " << g.s_lo() << ") -> (" << g.x_hi() << ", "
         << g.s_hi() << ") ";
    }
    return os.str();
  }

  friend bool operator==(const MonotoneGraph&, const MonotoneGraph&) = default;

 private:
  std::vector<Segment> segs_;
};

inline bool maximality_check(const MonotoneGraph& T) { return T.is_maximal(); }
inline SetOnLine eval(const MonotoneGraph& T, double x) { return T.eval(x); }
inline MonotoneGraph shift(const MonotoneGraph& T, double p) { return T.shifted(p); }

/// Graph of the subdifferential of a convex lsc proper PLQ function.
inline MonotoneGraph from_subdifferential(const PlqFunction& f) {
  if (!convexity_check(f) || !f.is_lsc())
    throw std::invalid_argument("from_subdifferential: function is not convex and lsc");
  const auto& br = f.breakpoints();
  const auto& pc = f.pieces();
  std::vector<std::pair<double, double>> verts;
  double first_l = 0.0, last_r = 0.0;
  bool any = false;
  for (std::size_t k = 0; k < br.size(); ++k) {
    const SetOnLine d = subdifferential(f, br[k]);
    if (d.is_empty()) continue;
    const double l = d.inf(), r = d.sup();
    if (!any) first_l = l;
    last_r = r;
    any = true;
    if (std::isfinite(l)) verts.emplace_back(br[k], l);
    if (std::isfinite(r) && r != l) verts.emplace_back(br[k], r);
    if (!std::isfinite(l) && !std::isfinite(r)) verts.emplace_back(br[k], 0.0);
  }
  if (!any) {
    const auto& q = pc[0].q;
    return MonotoneGraph::polyline({{0.0, q.b}}, {1.0, 2.0 * q.a}, {1.0, 2.0 * q.a});
  }
  const Direction left = std::isfinite(first_l) ? Direction{1.0, 2.0 * pc.front().q.a} : Direction{0.0, 1.0};
  const Direction right = std::isfinite(last_r) ? Direction{1.0, 2.0 * pc.back().q.a} : Direction{0.0, 1.0};
  return MonotoneGraph::polyline(verts, left, right);
}

/// N_U for the closed interval U = [lo, hi] (ends may be infinite).
inline MonotoneGraph normal_cone(double lo, double hi) {
  return from_subdifferential(PlqFunction::indicator(lo, hi));
}

/// The duality map of R: the identity line s = x.
inline MonotoneGraph duality_map() { return MonotoneGraph::polyline({{0.0, 0.0}}, {1, 1}, {1, 1}); }

/// A convex lsc PLQ g with subdifferential T (unique up to a constant;
/// normalized to vanish at its leftmost finite breakpoint or at 0).
inline PlqFunction potential(const MonotoneGraph& T) {
  if (!T.is_maximal()) throw std::invalid_argument("potential: operator is not maximal");
  std::vector<double> br = T.critical_xs();
  std::vector<Piece> pc;
  for (std::size_t k = 0; k <= br.size(); ++k) {
    const double lo = k == 0 ? -kInf : br[k - 1];
    const double hi = k == br.size() ? kInf : br[k];
    const Segment* g = T.sloped_at(detail::interior_point(lo, hi));
    if (!g) {
      pc.push_back(Piece::infinite());
      continue;
    }
    pc.push_back(Piece::quad(0.5 * g->slope(), g->intercept(), 0.0));
  }
  // Fix constants left to right for continuity.
  double carry = 0.0;
  for (std::size_t k = 0; k < pc.size(); ++k) {
    if (!pc[k].finite) continue;
    auto& q = pc[k].q;
    if (k > 0) q.c += carry - q(br[k - 1]);
    else if (!br.empty()) q.c -= q(br[0]);
    if (k < br.size()) carry = q(br[k]);
  }
  std::vector<ExtReal> vs(br.size(), ExtReal::inf());
  for (std::size_t k = 0; k < br.size(); ++k) {
    if (pc[k].finite) vs[k] = pc[k].at(br[k]);
    else if (pc[k + 1].finite) vs[k] = pc[k + 1].at(br[k]);
    else if (!T.eval(br[k]).is_empty()) vs[k] = ExtReal(0.0);
  }
  return PlqFunction(br, pc, vs).canonical();
}

/// Exact R(S(p + .) + T(.)) as a finite union of intervals: Minkowski sums
/// of the set values at every critical point, and images of the affine sum
/// over each open interval between them.
inline SetOnLine sum_range_oracle(const MonotoneGraph& S, const MonotoneGraph& T, double p) {
  const MonotoneGraph Sp = S.shifted(p);
  std::vector<double> xs = Sp.critical_xs();
  const auto tx = T.critical_xs();
  xs.insert(xs.end(), tx.begin(), tx.end());
  detail::sort_unique(xs);
  SetOnLine out;
  for (double x : xs) {
    const SetOnLine a = Sp.eval(x), b = T.eval(x);
    for (const auto& i : a.components())
      for (const auto& j : b.components()) out.add(minkowski_sum(i, j));
  }
  for (std::size_t k = 0; k <= xs.size(); ++k) {
    const double lo = k == 0 ? -kInf : xs[k - 1];
    const double hi = k == xs.size() ? kInf : xs[k];
    const double mid = detail::interior_point(lo, hi);
    const Segment* g1 = Sp.sloped_at(mid);
    const Segment* g2 = T.sloped_at(mid);
    if (!g1 || !g2) continue;
    if (g1->dx == 1.0 && g2->dx == 1.0) {
      out.add(Interval::point(g1->s_lo() + g2->s_lo()));
      continue;
    }
    // Increasing affine sum: the image of (lo, hi) is open.
    const double a = std::isinf(lo) ? -kInf : g1->s_of_x(lo) + g2->s_of_x(lo);
    const double b = std::isinf(hi) ? kInf : g1->s_of_x(hi) + g2->s_of_x(hi);
    out.add(Interval::open(a, b));
  }
  return out;
}

}  // namespace fitzrange
