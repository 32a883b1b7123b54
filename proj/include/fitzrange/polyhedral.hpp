#pragma once

// Polyhedral sets and functions on R^2.
//
// Sets are kept in irredundant H-form (inequality facets plus affine-hull
// equalities). Functions are max-of-affine over a polyhedral domain. Exact
// conjugation goes through the V-form of the epigraph of the conjugate and a
// brute-force facet enumeration in R^3, which is cheap at the sizes that
// monotone curves with a handful of segments produce.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "fitzrange/ext_real.hpp"
#include "fitzrange/plq.hpp"

namespace fitzrange {

using Point2 = std::array<double, 2>;

namespace detail {

struct Vec3 {
  double x = 0, y = 0, z = 0;

  friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(double k, Vec3 a) { return {k * a.x, k * a.y, k * a.z}; }
  friend Vec3 operator-(Vec3 a) { return {-a.x, -a.y, -a.z}; }
  double max_abs() const { return std::max({std::abs(x), std::abs(y), std::abs(z)}); }
};

inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) { return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x}; }

/// Scaled so that the largest component has magnitude 1; zero stays zero.
inline Vec3 unitize(Vec3 v) {
  const double m = v.max_abs();
  return m == 0.0 ? v : (1.0 / m) * v;
}

/// Snaps values within 1e-12 of an integer multiple of 1/64 onto it, which
/// removes rounding residue from cross products of grid-valued data.
inline double tidy(double v) {
  const double r = std::round(v * 64.0) / 64.0;
  return std::abs(v - r) <= 1e-12 * std::max(1.0, std::abs(v)) ? r : v;
}

inline constexpr double kGeomTol = 1e-9;

/// Orthonormal basis (Gram-Schmidt) of the span of `vs`.
inline std::vector<Vec3> span_basis(const std::vector<Vec3>& vs) {
  std::vector<Vec3> basis;
  for (Vec3 v : vs) {
    const double m = v.max_abs();
    if (m == 0.0) continue;
    v = (1.0 / m) * v;
    for (const auto& b : basis) v = v - dot(v, b) * b;
    const double n = std::sqrt(dot(v, v));
    if (n <= kGeomTol) continue;
    basis.push_back((1.0 / n) * v);
    if (basis.size() == 3) break;
  }
  return basis;
}

struct Facet {
  Vec3 n;
  double b;
};

struct HRep3 {
  std::vector<Facet> equalities;    // n . z = b
  std::vector<Facet> inequalities;  // n . z <= b, irredundant
};

/// Irredundant H-form of conv(points) + cone(rays) in R^3.
inline HRep3 facets_from_generators(const std::vector<Vec3>& points, const std::vector<Vec3>& rays) {
  if (points.empty()) throw std::invalid_argument("facets_from_generators: need a point");
  double scale = 1.0;
  for (const auto& p : points) scale = std::max(scale, p.max_abs());
  const double tol = kGeomTol * scale;

  std::vector<Vec3> dirs;
  for (std::size_t i = 1; i < points.size(); ++i) dirs.push_back(points[i] - points[0]);
  for (const auto& r : rays) dirs.push_back(r);
  const auto basis = span_basis(dirs);
  const std::size_t dim = basis.size();

  HRep3 out;
  // Normals of the affine hull.
  std::vector<Vec3> normals;
  if (dim == 0) {
    normals = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  } else if (dim == 1) {
    const Vec3 v = basis[0];
    const Vec3 probe = std::abs(v.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    const Vec3 n1 = cross(v, probe);
    normals = {n1, cross(v, n1)};
  } else if (dim == 2) {
    normals = {cross(basis[0], basis[1])};
  }
  for (auto n : normals) {
    n = unitize(n);
    // Prefer a sign with positive leading component for a canonical form.
    if (n.x < 0 || (n.x == 0 && (n.y < 0 || (n.y == 0 && n.z < 0)))) n = -n;
    out.equalities.push_back({n, dot(n, points[0])});
  }
  if (dim == 0) return out;

  // A facet contains a generator point and is spanned by differences of
  // points on it together with rays along it.
  std::vector<Vec3> cands;
  if (dim == 3) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      std::vector<Vec3> local = rays;
      for (std::size_t j = i + 1; j < points.size(); ++j) local.push_back(points[j] - points[i]);
      for (std::size_t a = 0; a < local.size(); ++a)
        for (std::size_t b = a + 1; b < local.size(); ++b) cands.push_back(cross(local[a], local[b]));
    }
  } else if (dim == 2) {
    const Vec3 N = normals[0];
    for (const auto& r : rays) cands.push_back(cross(r, N));
    for (std::size_t i = 0; i < points.size(); ++i)
      for (std::size_t j = i + 1; j < points.size(); ++j) cands.push_back(cross(points[j] - points[i], N));
  } else {
    cands.push_back(basis[0]);
  }

  for (auto& c : cands) {
    c = unitize(c);
    if (c.x < 0 || (c.x == 0 && (c.y < 0 || (c.y == 0 && c.z < 0)))) c = -c;
  }
  std::sort(cands.begin(), cands.end(), [](Vec3 a, Vec3 b) {
    return std::tie(a.x, a.y, a.z) < std::tie(b.x, b.y, b.z);
  });
  cands.erase(std::unique(cands.begin(), cands.end(),
                          [](Vec3 a, Vec3 b) { return (a - b).max_abs() <= 1e-12; }),
              cands.end());

  auto rank_of = [](const std::vector<Vec3>& vs) { return span_basis(vs).size(); };
  for (auto c : cands) {
    if (c.max_abs() <= kGeomTol) continue;
    for (Vec3 n : {c, -c}) {
      bool ok = true;
      for (const auto& r : rays) {
        if (dot(n, r) > kGeomTol * std::max(1.0, r.max_abs())) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      double b = -kInf;
      for (const auto& p : points) b = std::max(b, dot(n, p));
      // Facet test: tight generators span a face of dimension dim - 1.
      std::vector<Vec3> tight_pts;
      std::vector<Vec3> tight_dirs;
      for (const auto& p : points) {
        if (dot(n, p) >= b - tol) tight_pts.push_back(p);
      }
      for (std::size_t i = 1; i < tight_pts.size(); ++i) tight_dirs.push_back(tight_pts[i] - tight_pts[0]);
      for (const auto& r : rays) {
        if (std::abs(dot(n, r)) <= kGeomTol * std::max(1.0, r.max_abs())) tight_dirs.push_back(r);
      }
      if (rank_of(tight_dirs) != dim - 1) continue;
      n = {tidy(n.x), tidy(n.y), tidy(n.z)};
      b = tidy(b);
      bool dup = false;
      for (const auto& f : out.inequalities) {
        if ((f.n - n).max_abs() <= kGeomTol && std::abs(f.b - b) <= tol) {
          dup = true;
          break;
        }
      }
      if (!dup) out.inequalities.push_back({n, b});
    }
  }
  std::sort(out.inequalities.begin(), out.inequalities.end(), [](const Facet& a, const Facet& b) {
    if (a.n.x != b.n.x) return a.n.x < b.n.x;
    if (a.n.y != b.n.y) return a.n.y < b.n.y;
    if (a.n.z != b.n.z) return a.n.z < b.n.z;
    return a.b < b.b;
  });
  return out;
}

}  // namespace detail

/// Closed half-plane a z1 + b z2 <= c.
struct HalfPlane {
  double a;
  double b;
  double c;

  bool contains(const Point2& z, double tol = detail::kGeomTol) const {
    return a * z[0] + b * z[1] <= c + tol * std::max(1.0, std::abs(c));
  }
  friend bool operator==(const HalfPlane&, const HalfPlane&) = default;
};

class PolyhedralSet2D {
 public:
  struct Generators {
    std::vector<Point2> points;
    std::vector<Point2> rays;
  };

  /// The whole plane.
  PolyhedralSet2D() = default;

  /// Intersection of the given half-planes, normalized to irredundant form.
  explicit PolyhedralSet2D(const std::vector<HalfPlane>& hs) {
    std::vector<HalfPlane> raw;
    for (const auto& h : hs) {
      const double m = std::max(std::abs(h.a), std::abs(h.b));
      if (m == 0.0) {
        if (h.c < 0.0) empty_ = true;
        continue;
      }
      raw.push_back({h.a / m, h.b / m, h.c / m});
    }
    if (empty_) return;
    const auto g = generators_of(raw);
    if (!g) {
      empty_ = true;
      return;
    }
    *this = from_generators(g->points, g->rays);
  }

  static PolyhedralSet2D whole() { return {}; }
  static PolyhedralSet2D empty() {
    PolyhedralSet2D s;
    s.empty_ = true;
    return s;
  }
  /// I1 x I2 for closed intervals given by their (possibly infinite) ends.
  static PolyhedralSet2D box(double lo1, double hi1, double lo2, double hi2) {
    std::vector<HalfPlane> hs;
    if (std::isfinite(lo1)) hs.push_back({-1, 0, -lo1});
    if (std::isfinite(hi1)) hs.push_back({1, 0, hi1});
    if (std::isfinite(lo2)) hs.push_back({0, -1, -lo2});
    if (std::isfinite(hi2)) hs.push_back({0, 1, hi2});
    return PolyhedralSet2D(hs);
  }

  static PolyhedralSet2D from_generators(const std::vector<Point2>& points, const std::vector<Point2>& rays) {
    if (points.empty()) return empty();
    // Lift to R^3 as P x R so that facets come out vertical.
    std::vector<detail::Vec3> P, R;
    for (const auto& p : points) P.push_back({p[0], p[1], 0});
    for (const auto& r : rays) R.push_back({r[0], r[1], 0});
    R.push_back({0, 0, 1});
    R.push_back({0, 0, -1});
    const auto h = detail::facets_from_generators(P, R);
    PolyhedralSet2D s;
    for (const auto& e : h.equalities) {
      if (std::abs(e.n.z) > detail::kGeomTol) continue;
      s.eqs_.push_back(normalized({e.n.x, e.n.y, e.b}));
    }
    for (const auto& f : h.inequalities) {
      if (std::abs(f.n.z) > detail::kGeomTol) continue;
      s.ineqs_.push_back(normalized({f.n.x, f.n.y, f.b}));
    }
    return s;
  }

  bool is_empty() const { return empty_; }
  bool is_whole_plane() const { return !empty_ && eqs_.empty() && ineqs_.empty(); }
  /// Facet inequalities (excluding the affine-hull equalities).
  const std::vector<HalfPlane>& inequalities() const { return ineqs_; }
  /// Affine-hull equalities a z1 + b z2 = c.
  const std::vector<HalfPlane>& equalities() const { return eqs_; }
  /// All constraints as half-planes (each equality as two).
  std::vector<HalfPlane> halfplanes() const {
    std::vector<HalfPlane> hs = ineqs_;
    for (const auto& e : eqs_) {
      hs.push_back(e);
      hs.push_back({-e.a, -e.b, -e.c});
    }
    return hs;
  }
  int dimension() const { return empty_ ? -1 : 2 - static_cast<int>(eqs_.size()); }

  bool contains(const Point2& z, double tol = detail::kGeomTol) const {
    if (empty_) return false;
    for (const auto& h : halfplanes())
      if (!h.contains(z, tol)) return false;
    return true;
  }
  /// Membership in the relative interior (strict facet inequalities).
  bool in_relative_interior(const Point2& z, double tol = detail::kGeomTol) const {
    if (empty_) return false;
    for (const auto& e : eqs_) {
      if (std::abs(e.a * z[0] + e.b * z[1] - e.c) > tol * std::max(1.0, std::abs(e.c))) return false;
    }
    for (const auto& h : ineqs_) {
      if (!(h.a * z[0] + h.b * z[1] < h.c - tol * std::max(1.0, std::abs(h.c)))) return false;
    }
    return true;
  }
  /// Membership in the interior; the algebraic interior coincides with it
  /// for convex sets in R^2.
  bool in_interior(const Point2& z, double tol = detail::kGeomTol) const {
    return dimension() == 2 && in_relative_interior(z, tol);
  }
  /// Whether the whole line {z0 + t d} lies in the relative interior.
  bool line_in_relative_interior(const Point2& z0, const Point2& d, double tol = detail::kGeomTol) const {
    if (empty_) return false;
    for (const auto& e : eqs_) {
      if (std::abs(e.a * d[0] + e.b * d[1]) > tol) return false;
    }
    for (const auto& h : ineqs_) {
      if (std::abs(h.a * d[0] + h.b * d[1]) > tol) return false;
    }
    return in_relative_interior(z0, tol);
  }

  Generators generators() const {
    if (empty_) return {};
    return *generators_of(halfplanes());
  }

  PolyhedralSet2D intersect(const PolyhedralSet2D& o) const {
    if (empty_ || o.empty_) return empty();
    auto hs = halfplanes();
    const auto os = o.halfplanes();
    hs.insert(hs.end(), os.begin(), os.end());
    return PolyhedralSet2D(hs);
  }
  PolyhedralSet2D minkowski_sum(const PolyhedralSet2D& o) const {
    if (empty_ || o.empty_) return empty();
    const auto g = generators();
    const auto h = o.generators();
    std::vector<Point2> pts;
    for (const auto& p : g.points)
      for (const auto& q : h.points) pts.push_back({p[0] + q[0], p[1] + q[1]});
    std::vector<Point2> rays = g.rays;
    rays.insert(rays.end(), h.rays.begin(), h.rays.end());
    return from_generators(pts, rays);
  }
  /// -P.
  PolyhedralSet2D negated() const { return linear_image(-1, -1); }
  /// {(z1, -z2)}.
  PolyhedralSet2D flipped_second() const { return linear_image(1, -1); }
  PolyhedralSet2D translated(const Point2& t) const {
    if (empty_) return empty();
    PolyhedralSet2D s = *this;
    for (auto& h : s.ineqs_) h.c += h.a * t[0] + h.b * t[1];
    for (auto& h : s.eqs_) h.c += h.a * t[0] + h.b * t[1];
    return s;
  }

  std::string to_string() const {
    if (empty_) return "empty";
    if (is_whole_plane()) return "R^2";
    std::ostringstream os;
    bool first = true;
    auto term = [&](const HalfPlane& h, const char* rel) {
      if (!first) os << ", ";
      first = false;
      os << h.a << "*z1 + " << h.b << "*z2 " << rel << " " << h.c;
    };
    for (const auto& e : eqs_) term(e, "=");
    for (const auto& h : ineqs_) term(h, "<=");
    return os.str();
  }

  friend bool operator==(const PolyhedralSet2D& a, const PolyhedralSet2D& b) {
    if (a.empty_ || b.empty_) return a.empty_ == b.empty_;
    return same(a.eqs_, b.eqs_) && same(a.ineqs_, b.ineqs_);
  }

 private:
  static HalfPlane normalized(HalfPlane h) {
    const double m = std::max(std::abs(h.a), std::abs(h.b));
    return {detail::tidy(h.a / m), detail::tidy(h.b / m), detail::tidy(h.c / m)};
  }

  static bool same(std::vector<HalfPlane> a, std::vector<HalfPlane> b) {
    if (a.size() != b.size()) return false;
    auto key = [](const HalfPlane& h) { return std::array<double, 3>{h.a, h.b, h.c}; };
    auto less = [&](const HalfPlane& x, const HalfPlane& y) { return key(x) < key(y); };
    std::sort(a.begin(), a.end(), less);
    std::sort(b.begin(), b.end(), less);
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (std::abs(a[k].a - b[k].a) > 1e-9 || std::abs(a[k].b - b[k].b) > 1e-9 ||
          std::abs(a[k].c - b[k].c) > 1e-9 * std::max(1.0, std::abs(a[k].c)))
        return false;
    }
    return true;
  }

  PolyhedralSet2D linear_image(double s1, double s2) const {
    if (empty_) return empty();
    PolyhedralSet2D s = *this;
    auto apply = [&](HalfPlane& h) {
      h.a *= s1;
      h.b *= s2;
      if (h.a == 0.0) h.a = 0.0;
      if (h.b == 0.0) h.b = 0.0;
    };
    for (auto& h : s.ineqs_) apply(h);
    for (auto& h : s.eqs_) {
      apply(h);
      if (h.a < 0 || (h.a == 0 && h.b < 0)) h = {-h.a + 0.0, -h.b + 0.0, -h.c + 0.0};
    }
    return s;
  }

  /// V-form of an intersection of half-planes; nullopt when empty. Points:
  /// feasible pairwise line intersections, feet of the origin on each line,
  /// and the origin. Rays: feasible directions along and against normals.
  static std::optional<Generators> generators_of(const std::vector<HalfPlane>& hs) {
    auto feasible = [&](const Point2& z) {
      for (const auto& h : hs)
        if (!h.contains(z)) return false;
      return true;
    };
    Generators g;
    auto add_point = [&](const Point2& z) {
      if (!feasible(z)) return;
      for (const auto& q : g.points)
        if (std::abs(q[0] - z[0]) <= 1e-12 && std::abs(q[1] - z[1]) <= 1e-12) return;
      g.points.push_back(z);
    };
    for (std::size_t i = 0; i < hs.size(); ++i) {
      for (std::size_t j = i + 1; j < hs.size(); ++j) {
        const double det = hs[i].a * hs[j].b - hs[i].b * hs[j].a;
        if (std::abs(det) <= 1e-12) continue;
        add_point({detail::tidy((hs[i].c * hs[j].b - hs[i].b * hs[j].c) / det),
                   detail::tidy((hs[i].a * hs[j].c - hs[i].c * hs[j].a) / det)});
      }
      const double nn = hs[i].a * hs[i].a + hs[i].b * hs[i].b;
      add_point({detail::tidy(hs[i].c * hs[i].a / nn), detail::tidy(hs[i].c * hs[i].b / nn)});
    }
    add_point({0.0, 0.0});
    if (g.points.empty()) return std::nullopt;
    std::vector<Point2> cand = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    for (const auto& h : hs) {
      cand.push_back({-h.b, h.a});
      cand.push_back({h.b, -h.a});
      cand.push_back({-h.a, -h.b});
    }
    for (const auto& d : cand) {
      bool ok = true;
      for (const auto& h : hs) {
        if (h.a * d[0] + h.b * d[1] > detail::kGeomTol) {
          ok = false;
          break;
        }
      }
      if (ok) g.rays.push_back(d);
    }
    return g;
  }

  bool empty_ = false;
  std::vector<HalfPlane> eqs_;
  std::vector<HalfPlane> ineqs_;
};

/// Affine function a z1 + b z2 + c.
struct AffinePiece {
  double a;
  double b;
  double c;

  double operator()(const Point2& z) const { return a * z[0] + b * z[1] + c; }
  friend bool operator==(const AffinePiece&, const AffinePiece&) = default;
};

struct PolyhedralMin {
  ExtReal value;
  std::optional<Point2> argmin;
};

/// max_i (a_i z1 + b_i z2 + c_i) on a polyhedral domain, +inf elsewhere.
class PolyhedralFn2D {
 public:
  PolyhedralFn2D(std::vector<AffinePiece> pieces, PolyhedralSet2D domain)
      : pieces_(std::move(pieces)), dom_(std::move(domain)) {
    if (pieces_.empty()) throw std::invalid_argument("PolyhedralFn2D: need at least one affine piece");
    if (dom_.is_empty()) throw std::invalid_argument("PolyhedralFn2D: empty domain (identically +inf)");
  }

  /// Indicator of a nonempty polyhedral set.
  static PolyhedralFn2D indicator(const PolyhedralSet2D& s) { return {{{0, 0, 0}}, s}; }

  const std::vector<AffinePiece>& pieces() const { return pieces_; }
  const PolyhedralSet2D& domain() const { return dom_; }

  ExtReal operator()(const Point2& z, double tol = detail::kGeomTol) const {
    if (!dom_.contains(z, tol)) return ExtReal::inf();
    double v = -kInf;
    for (const auto& p : pieces_) v = std::max(v, p(z));
    return ExtReal(v);
  }
  ExtReal operator()(double z1, double z2) const { return (*this)({z1, z2}); }

  /// Exact Fenchel conjugate. The epigraph of the conjugate is generated by
  /// the points (a_i, b_i, -c_i), the rays (n_j, c_j) of the domain
  /// constraints and the vertical ray.
  PolyhedralFn2D conjugate() const {
    std::vector<detail::Vec3> P, R;
    for (const auto& p : pieces_) P.push_back({p.a, p.b, -p.c});
    for (const auto& h : dom_.halfplanes()) R.push_back({h.a, h.b, h.c});
    R.push_back({0, 0, 1});
    return from_epigraph_generators(P, R);
  }

  /// Irredundant form (pieces that are active somewhere, facet constraints).
  PolyhedralFn2D canonical() const { return conjugate().conjugate(); }

  /// (z1, z2) -> h(z1, -z2).
  PolyhedralFn2D hat() const {
    auto ps = pieces_;
    for (auto& p : ps) p.b = -p.b + 0.0;
    return {ps, dom_.flipped_second()};
  }
  /// z -> h(c - z).
  PolyhedralFn2D reflected_about(const Point2& c) const {
    std::vector<AffinePiece> ps;
    for (const auto& p : pieces_) ps.push_back({-p.a + 0.0, -p.b + 0.0, p(c)});
    return {ps, dom_.negated().translated(c)};
  }
  /// z -> h(z) + <m, z> + k.
  PolyhedralFn2D tilted(const Point2& m, double k = 0.0) const {
    auto ps = pieces_;
    for (auto& p : ps) {
      p.a += m[0];
      p.b += m[1];
      p.c += k;
    }
    return {ps, dom_};
  }
  /// Pointwise sum; nullopt when the domains do not meet.
  std::optional<PolyhedralFn2D> plus(const PolyhedralFn2D& o) const {
    const auto d = dom_.intersect(o.dom_);
    if (d.is_empty()) return std::nullopt;
    std::vector<AffinePiece> ps;
    for (const auto& p : pieces_)
      for (const auto& q : o.pieces_) ps.push_back({p.a + q.a, p.b + q.b, p.c + q.c});
    return PolyhedralFn2D(prune(ps), d);
  }

  /// The univariate restriction z2 -> h(z1, z2) for fixed z1, or nullopt
  /// when it is identically +inf.
  std::optional<PlqFunction> restrict_first(double z1) const {
    double lo = -kInf, hi = kInf;
    for (const auto& h : dom_.halfplanes()) {
      const double r = h.c - h.a * z1;
      if (std::abs(h.b) <= detail::kGeomTol) {
        if (r < -detail::kGeomTol * std::max(1.0, std::abs(h.c))) return std::nullopt;
        continue;
      }
      if (h.b > 0) hi = std::min(hi, r / h.b);
      else lo = std::max(lo, r / h.b);
    }
    if (lo > hi) {
      if (lo - hi > detail::kGeomTol * std::max(1.0, std::abs(lo))) return std::nullopt;
      hi = lo;
    }
    std::vector<PlqFunction> lines;
    for (const auto& p : pieces_) lines.push_back(PlqFunction::quadratic(0.0, p.b, p.a * z1 + p.c));
    const PlqFunction mx = lines.size() == 1 ? lines[0] : detail::combine(lines, detail::Combine::kMax);
    return add(mx, PlqFunction::indicator(lo, hi));
  }

  /// Exact minimization. Unboundedness is detected through a recession
  /// direction of negative slope; otherwise the minimum is attained at a
  /// vertex of the epigraph or, when the epigraph contains a line, at the
  /// foot of the origin on a face line.
  PolyhedralMin minimize() const {
    const auto hs = dom_.halfplanes();
    std::vector<Point2> dirs = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    for (const auto& h : hs) {
      dirs.push_back({-h.b, h.a});
      dirs.push_back({h.b, -h.a});
      dirs.push_back({-h.a, -h.b});
    }
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      dirs.push_back({-pieces_[i].a, -pieces_[i].b});
      for (std::size_t k = i + 1; k < pieces_.size(); ++k) {
        const double da = pieces_[i].a - pieces_[k].a, db = pieces_[i].b - pieces_[k].b;
        dirs.push_back({-db, da});
        dirs.push_back({db, -da});
      }
    }
    for (auto d : dirs) {
      const double m = std::max(std::abs(d[0]), std::abs(d[1]));
      if (m == 0.0) continue;
      d = {d[0] / m, d[1] / m};
      bool rec = true;
      for (const auto& h : hs) {
        if (h.a * d[0] + h.b * d[1] > detail::kGeomTol) {
          rec = false;
          break;
        }
      }
      if (!rec) continue;
      double slope = -kInf;
      for (const auto& p : pieces_) slope = std::max(slope, p.a * d[0] + p.b * d[1]);
      if (slope < -detail::kGeomTol) return {ExtReal::neg_inf(), std::nullopt};
    }

    std::vector<HalfPlane> lines = hs;
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      for (std::size_t k = i + 1; k < pieces_.size(); ++k) {
        const double da = pieces_[i].a - pieces_[k].a, db = pieces_[i].b - pieces_[k].b;
        if (std::max(std::abs(da), std::abs(db)) <= detail::kGeomTol) continue;
        lines.push_back({da, db, pieces_[k].c - pieces_[i].c});
      }
    }
    std::vector<Point2> cands = {{0.0, 0.0}};
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const auto& u = lines[i];
      const double nn = u.a * u.a + u.b * u.b;
      cands.push_back({detail::tidy(u.c * u.a / nn), detail::tidy(u.c * u.b / nn)});
      for (std::size_t j = i + 1; j < lines.size(); ++j) {
        const auto& w = lines[j];
        const double det = u.a * w.b - u.b * w.a;
        if (std::abs(det) <= 1e-12 * std::max(1.0, std::abs(u.a * w.b))) continue;
        cands.push_back({detail::tidy((u.c * w.b - u.b * w.c) / det), detail::tidy((u.a * w.c - u.c * w.a) / det)});
      }
    }
    ExtReal best = ExtReal::inf();
    std::optional<Point2> arg;
    for (const auto& z : cands) {
      const ExtReal v = (*this)(z);
      if (!v.is_finite()) continue;
      const double tol = 1e-12 * std::max(1.0, std::abs(v.value()));
      const bool better = !best.is_finite() || v.value() < best.value() - tol;
      const bool tie = best.is_finite() && std::abs(v.value() - best.value()) <= tol;
      auto size = [](const Point2& p) { return std::abs(p[0]) + std::abs(p[1]); };
      if (better || (tie && (size(z) < size(*arg) || (size(z) == size(*arg) && z < *arg)))) {
        if (better) best = v;
        arg = z;
      }
    }
    return {best, arg};
  }

  std::string to_string() const {
    std::ostringstream os;
    os << "max{";
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      if (i) os << ", ";
      os << pieces_[i].a << "*z1 + " << pieces_[i].b << "*z2 + " << pieces_[i].c;
    }
    os << "} on " << dom_.to_string();
    return os.str();
  }

  static PolyhedralFn2D from_epigraph_generators(const std::vector<detail::Vec3>& P,
                                                 const std::vector<detail::Vec3>& R) {
    const auto h = detail::facets_from_generators(P, R);
    std::vector<HalfPlane> dom;
    std::vector<AffinePiece> ps;
    auto take = [&](const detail::Facet& f, bool equality) {
      if (std::abs(f.n.z) <= detail::kGeomTol) {
        dom.push_back({f.n.x, f.n.y, f.b});
        if (equality) dom.push_back({-f.n.x, -f.n.y, -f.b});
      } else if (f.n.z < 0 && !equality) {
        const double k = -f.n.z;
        ps.push_back({detail::tidy(f.n.x / k), detail::tidy(f.n.y / k), detail::tidy(-f.b / k)});
      }
    };
    for (const auto& e : h.equalities) take(e, true);
    for (const auto& f : h.inequalities) take(f, false);
    if (ps.empty()) throw std::domain_error("PolyhedralFn2D: epigraph has no lower facet");
    return {ps, PolyhedralSet2D(dom)};
  }

 private:
  static std::vector<AffinePiece> prune(std::vector<AffinePiece> ps) {
    std::vector<AffinePiece> out;
    for (const auto& p : ps) {
      bool dup = false;
      for (const auto& q : out) {
        if (std::abs(p.a - q.a) <= 1e-12 && std::abs(p.b - q.b) <= 1e-12 && std::abs(p.c - q.c) <= 1e-12) {
          dup = true;
          break;
        }
      }
      if (!dup) out.push_back(p);
    }
    return out;
  }

  std::vector<AffinePiece> pieces_;
  PolyhedralSet2D dom_;
};

/// Same canonical pieces and domain within `tol`.
inline bool approx_equal(const PolyhedralFn2D& f, const PolyhedralFn2D& g, double tol = 1e-9) {
  const auto cf = f.canonical();
  const auto cg = g.canonical();
  if (!(cf.domain() == cg.domain())) return false;
  auto a = cf.pieces(), b = cg.pieces();
  if (a.size() != b.size()) return false;
  auto key = [](const AffinePiece& p) { return std::array<double, 3>{p.a, p.b, p.c}; };
  auto less = [&](const AffinePiece& x, const AffinePiece& y) { return key(x) < key(y); };
  std::sort(a.begin(), a.end(), less);
  std::sort(b.begin(), b.end(), less);
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (std::abs(a[k].a - b[k].a) > tol || std::abs(a[k].b - b[k].b) > tol ||
        std::abs(a[k].c - b[k].c) > tol * std::max(1.0, std::abs(a[k].c)))
      return false;
  }
  return true;
}

/// Convex piecewise-linear PLQ as max of its affine pieces on its domain
/// interval, or nullopt when some piece is quadratic.
struct MaxAffine1D {
  std::vector<std::pair<double, double>> lines;  // slope, intercept
  double lo;
  double hi;
};

inline std::optional<MaxAffine1D> as_max_affine(const PlqFunction& f) {
  if (!f.has_only_linear_pieces()) return std::nullopt;
  const SetOnLine d = f.domain();
  if (d.is_empty() || !d.is_single_closed_interval()) return std::nullopt;
  MaxAffine1D m{{}, d.inf(), d.sup()};
  for (const auto& p : f.pieces()) {
    if (p.finite) m.lines.emplace_back(p.q.b, p.q.c);
  }
  if (m.lines.empty()) {
    // Single-point domain.
    m.lines.emplace_back(0.0, f(m.lo).value());
  }
  return m;
}

/// f1(z1) + f2(z2) as a polyhedral function, when both are piecewise linear.
inline std::optional<PolyhedralFn2D> separable_as_polyhedral(const PlqFunction& f1, const PlqFunction& f2) {
  const auto m1 = as_max_affine(f1);
  const auto m2 = as_max_affine(f2);
  if (!m1 || !m2) return std::nullopt;
  std::vector<AffinePiece> ps;
  for (const auto& [s1, c1] : m1->lines)
    for (const auto& [s2, c2] : m2->lines) ps.push_back({s1, s2, c1 + c2});
  return PolyhedralFn2D(ps, PolyhedralSet2D::box(m1->lo, m1->hi, m2->lo, m2->hi));
}

}  // namespace fitzrange
