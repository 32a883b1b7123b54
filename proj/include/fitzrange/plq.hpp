#pragma once

// Exact convex calculus for univariate piecewise linear-quadratic (PLQ)
// functions with explicit +inf.
//
// A PlqFunction on the real line is described by strictly increasing
// breakpoints x_0 < ... < x_{k-1}, k + 1 open-interval pieces (the two
// unbounded end intervals included) each either +inf or a quadratic
// a x^2 + b x + c, and an explicit extended-real value at every breakpoint.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fitzrange/ext_real.hpp"
#include "fitzrange/set_on_line.hpp"

namespace fitzrange {

struct Quadratic {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  double operator()(double x) const { return (a * x + b) * x + c; }
  double slope(double x) const { return 2.0 * a * x + b; }
};

struct Piece {
  bool finite = false;
  Quadratic q;

  static Piece infinite() { return {}; }
  static Piece quad(double a, double b, double c) { return {true, {a, b, c}}; }
  static Piece linear(double slope, double intercept) { return quad(0.0, slope, intercept); }

  ExtReal at(double x) const { return finite ? ExtReal(q(x)) : ExtReal::inf(); }
};

/// A closed interval [lo, hi] carrying one quadratic. Every finite piece
/// (taken with its closure) and every finite breakpoint value of a
/// PlqFunction is a cell; suprema and infima over a PLQ function are
/// computed cell by cell.
struct Cell {
  double lo;
  double hi;
  Quadratic q;
};

namespace detail {

inline double scale_of(double x) { return std::max(1.0, std::abs(x)); }

/// A point strictly inside (lo, hi); both ends may be infinite.
inline double interior_point(double lo, double hi) {
  if (std::isinf(lo) && std::isinf(hi)) return 0.0;
  if (std::isinf(lo)) return hi - scale_of(hi);
  if (std::isinf(hi)) return lo + scale_of(lo);
  return lo + 0.5 * (hi - lo);
}

/// Trailing zero bits of the mantissa; larger means a shorter binary expansion.
inline int simplicity(double x) {
  if (x == 0.0) return 64;
  int e = 0;
  auto m = static_cast<long long>(std::ldexp(std::frexp(x, &e), 53));
  int z = 0;
  while ((m & 1) == 0 && z < 53) {
    m >>= 1;
    ++z;
  }
  return z;
}

/// Sorts, drops non-finite entries and collapses near-duplicates (relative
/// 1e-12). Each cluster keeps its simplest member, so an exact value such as
/// -1 wins over -1.0000000000000004 produced by rounding.
inline void sort_unique(std::vector<double>& xs) {
  xs.erase(std::remove_if(xs.begin(), xs.end(), [](double x) { return !std::isfinite(x); }), xs.end());
  std::sort(xs.begin(), xs.end());
  std::vector<double> out;
  double anchor = 0.0;
  for (double x : xs) {
    if (!out.empty() && std::abs(x - anchor) <= 1e-12 * scale_of(x)) {
      if (simplicity(x) > simplicity(out.back())) out.back() = x;
      continue;
    }
    out.push_back(x);
    anchor = x;
  }
  xs = std::move(out);
}

/// Crossing points of two quadratics strictly inside (lo, hi), keeping a
/// margin from the ends. Two roots so close that the quadratics differ by a
/// rounding-level amount between them are a tangency and become one root.
inline std::vector<double> crossings(const Quadratic& p, const Quadratic& q, double lo, double hi) {
  const double A = p.a - q.a, B = p.b - q.b, C = p.c - q.c;
  std::vector<double> r;
  const double s = std::max({std::abs(A), std::abs(B), std::abs(C)});
  if (s == 0.0) return r;
  if (std::abs(A) <= 1e-14 * s) {
    if (std::abs(B) > 1e-14 * s) r.push_back(-C / B);
  } else {
    const double disc = B * B - 4.0 * A * C;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      const double t = -0.5 * (B + std::copysign(sq, B));
      double r1 = t / A, r2 = t != 0.0 ? C / t : r1;
      if (r1 > r2) std::swap(r1, r2);
      const double mid = 0.5 * (r1 + r2);
      const double vscale = std::max({1.0, std::abs(p(mid)), std::abs(q(mid))});
      if (std::abs((A * mid + B) * mid + C) <= 1e-12 * vscale) {
        r.push_back(mid);
      } else {
        r.push_back(r1);
        r.push_back(r2);
      }
    }
  }
  std::vector<double> in;
  for (double x : r) {
    const double m = 1e-9 * scale_of(x);
    if (x > lo + m && x < hi - m) in.push_back(x);
  }
  return in;
}

}  // namespace detail

class PlqFunction {
 public:
  PlqFunction() : PlqFunction({}, {Piece::quad(0, 0, 0)}, {}) {}

  /// Validates the layout and properness; throws std::invalid_argument.
  PlqFunction(std::vector<double> breakpoints, std::vector<Piece> pieces, std::vector<ExtReal> values)
      : breaks_(std::move(breakpoints)), pieces_(std::move(pieces)), values_(std::move(values)) {
    if (pieces_.size() != breaks_.size() + 1)
      throw std::invalid_argument("PlqFunction: need exactly one more piece than breakpoints");
    if (values_.size() != breaks_.size())
      throw std::invalid_argument("PlqFunction: need one value per breakpoint");
    for (std::size_t k = 0; k < breaks_.size(); ++k) {
      if (!std::isfinite(breaks_[k])) throw std::invalid_argument("PlqFunction: breakpoints must be finite");
      if (k > 0 && !(breaks_[k - 1] < breaks_[k]))
        throw std::invalid_argument("PlqFunction: breakpoints must be strictly increasing");
    }
    for (const auto& p : pieces_) {
      if (p.finite && !(std::isfinite(p.q.a) && std::isfinite(p.q.b) && std::isfinite(p.q.c)))
        throw std::invalid_argument("PlqFunction: piece coefficients must be finite");
    }
    bool any_finite = std::any_of(pieces_.begin(), pieces_.end(), [](const Piece& p) { return p.finite; });
    for (auto v : values_) {
      if (v.is_neg_inf()) throw std::invalid_argument("PlqFunction: improper (takes -inf)");
      any_finite = any_finite || v.is_finite();
    }
    if (!any_finite) throw std::invalid_argument("PlqFunction: improper (identically +inf)");
  }

  // Builtins.
  static PlqFunction quadratic(double a, double b, double c) { return {{}, {Piece::quad(a, b, c)}, {}}; }
  static PlqFunction zero() { return quadratic(0, 0, 0); }
  static PlqFunction abs() { return {{0.0}, {Piece::linear(-1, 0), Piece::linear(1, 0)}, {ExtReal(0.0)}}; }

  /// Indicator of the closed interval [lo, hi]; lo may be -inf, hi +inf.
  static PlqFunction indicator(double lo, double hi) {
    if (!(lo <= hi)) throw std::invalid_argument("indicator: empty interval");
    const bool flo = std::isfinite(lo), fhi = std::isfinite(hi);
    if (!flo && !fhi) return zero();
    if (flo && fhi && lo == hi) return {{lo}, {Piece::infinite(), Piece::infinite()}, {ExtReal(0.0)}};
    if (flo && fhi)
      return {{lo, hi}, {Piece::infinite(), Piece::linear(0, 0), Piece::infinite()}, {ExtReal(0.0), ExtReal(0.0)}};
    if (flo) return {{lo}, {Piece::infinite(), Piece::linear(0, 0)}, {ExtReal(0.0)}};
    return {{hi}, {Piece::linear(0, 0), Piece::infinite()}, {ExtReal(0.0)}};
  }

  /// Support function of [lo, hi]: x -> sup_{u in [lo,hi]} u x.
  static PlqFunction support(double lo, double hi) {
    if (!(lo <= hi)) throw std::invalid_argument("support: empty interval");
    Piece left = std::isfinite(lo) ? Piece::linear(lo, 0) : Piece::infinite();
    Piece right = std::isfinite(hi) ? Piece::linear(hi, 0) : Piece::infinite();
    return {{0.0}, {left, right}, {ExtReal(0.0)}};
  }

  const std::vector<double>& breakpoints() const { return breaks_; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  const std::vector<ExtReal>& values() const { return values_; }

  /// Index of the piece containing x, or nullopt when x is a breakpoint
  /// (then `*break_index` receives its index).
  std::optional<std::size_t> locate(double x, std::size_t* break_index = nullptr) const {
    auto it = std::lower_bound(breaks_.begin(), breaks_.end(), x);
    const auto k = static_cast<std::size_t>(it - breaks_.begin());
    if (it != breaks_.end() && *it == x) {
      if (break_index) *break_index = k;
      return std::nullopt;
    }
    return k;
  }

  ExtReal operator()(double x) const {
    std::size_t k = 0;
    if (auto j = locate(x, &k)) return pieces_[*j].at(x);
    return values_[k];
  }

  /// One-sided limits at breakpoint k (+inf across an infinite piece).
  ExtReal left_limit(std::size_t k) const { return pieces_[k].at(breaks_[k]); }
  ExtReal right_limit(std::size_t k) const { return pieces_[k + 1].at(breaks_[k]); }

  bool is_lsc() const {
    for (std::size_t k = 0; k < breaks_.size(); ++k) {
      if (values_[k] > min(left_limit(k), right_limit(k))) return false;
    }
    return true;
  }

  bool has_only_linear_pieces() const {
    return std::all_of(pieces_.begin(), pieces_.end(), [](const Piece& p) { return !p.finite || p.q.a == 0.0; });
  }

  std::vector<Cell> cells() const {
    std::vector<Cell> out;
    for (std::size_t j = 0; j < pieces_.size(); ++j) {
      if (!pieces_[j].finite) continue;
      const double lo = j == 0 ? -kInf : breaks_[j - 1];
      const double hi = j == breaks_.size() ? kInf : breaks_[j];
      out.push_back({lo, hi, pieces_[j].q});
    }
    for (std::size_t k = 0; k < breaks_.size(); ++k) {
      if (values_[k].is_finite()) out.push_back({breaks_[k], breaks_[k], {0, 0, values_[k].value()}});
    }
    return out;
  }

  /// {x : f(x) < +inf}.
  SetOnLine domain() const {
    SetOnLine d;
    for (std::size_t j = 0; j < pieces_.size(); ++j) {
      if (!pieces_[j].finite) continue;
      const double lo = j == 0 ? -kInf : breaks_[j - 1];
      const double hi = j == breaks_.size() ? kInf : breaks_[j];
      d.add(Interval::open(lo, hi));
    }
    for (std::size_t k = 0; k < breaks_.size(); ++k) {
      if (values_[k].is_finite()) d.add(Interval::point(breaks_[k]));
    }
    return d;
  }

  /// Merges adjacent pieces that agree (coefficients within `tol`) across a
  /// breakpoint whose value continues them.
  PlqFunction canonical(double tol = 1e-9) const {
    std::vector<double> nb;
    std::vector<Piece> np{pieces_[0]};
    std::vector<ExtReal> nv;
    for (std::size_t k = 0; k < breaks_.size(); ++k) {
      const Piece& left = np.back();
      const Piece& right = pieces_[k + 1];
      bool merge = false;
      if (!left.finite && !right.finite) {
        merge = values_[k].is_pos_inf();
      } else if (left.finite && right.finite && same_coefficients(left.q, right.q, tol)) {
        const double x = breaks_[k];
        merge = values_[k].is_finite() &&
                std::abs(values_[k].value() - left.q(x)) <= tol * detail::scale_of(left.q(x));
      }
      if (merge) continue;
      nb.push_back(breaks_[k]);
      nv.push_back(values_[k]);
      np.push_back(right);
    }
    for (auto& p : np) {
      if (!p.finite) continue;
      if (std::abs(p.q.a) < 1e-15) p.q.a = 0.0;
      if (std::abs(p.q.b) < 1e-15) p.q.b = 0.0;
      if (std::abs(p.q.c) < 1e-15) p.q.c = 0.0;
    }
    return {std::move(nb), std::move(np), std::move(nv)};
  }

  static bool same_coefficients(const Quadratic& p, const Quadratic& q, double tol) {
    return std::abs(p.a - q.a) <= tol * detail::scale_of(p.a) && std::abs(p.b - q.b) <= tol * detail::scale_of(p.b) &&
           std::abs(p.c - q.c) <= tol * detail::scale_of(p.c);
  }

  std::string to_string() const {
    std::ostringstream os;
    auto piece = [&](const Piece& p) {
      if (!p.finite) {
        os << "+inf";
        return;
      }
      os << p.q.a << "x^2 + " << p.q.b << "x + " << p.q.c;
    };
    for (std::size_t k = 0; k <= breaks_.size(); ++k) {
      piece(pieces_[k]);
      if (k < breaks_.size()) os << " | x=" << breaks_[k] << ": " << values_[k] << " | ";
    }
    return os.str();
  }

 private:
  std::vector<double> breaks_;
  std::vector<Piece> pieces_;
  std::vector<ExtReal> values_;
};

/// Structural equality after breakpoint alignment: same breakpoints
/// (relative `tol`), same piece finiteness and coefficients, same values.
inline bool approx_equal(const PlqFunction& f, const PlqFunction& g, double tol = 1e-9) {
  const auto& fb = f.breakpoints();
  const auto& gb = g.breakpoints();
  if (fb.size() != gb.size()) return false;
  for (std::size_t k = 0; k < fb.size(); ++k) {
    if (std::abs(fb[k] - gb[k]) > tol * detail::scale_of(fb[k])) return false;
    const auto fv = f.values()[k], gv = g.values()[k];
    if (fv.is_finite() != gv.is_finite()) return false;
    if (fv.is_finite() && std::abs(fv.value() - gv.value()) > tol * detail::scale_of(fv.value())) return false;
  }
  for (std::size_t j = 0; j < f.pieces().size(); ++j) {
    const auto& p = f.pieces()[j];
    const auto& q = g.pieces()[j];
    if (p.finite != q.finite) return false;
    if (p.finite && !PlqFunction::same_coefficients(p.q, q.q, tol)) return false;
  }
  return true;
}

inline ExtReal eval(const PlqFunction& f, double x) { return f(x); }

namespace detail {

enum class Combine { kMax, kMin };

/// Pointwise max or min of finitely many PLQ functions, with crossing
/// points of quadratics inserted as new breakpoints.
inline PlqFunction combine(const std::vector<PlqFunction>& fs, Combine mode) {
  if (fs.empty()) throw std::invalid_argument("combine: no functions");
  std::vector<double> cand;
  for (const auto& f : fs) cand.insert(cand.end(), f.breakpoints().begin(), f.breakpoints().end());
  sort_unique(cand);

  // Breakpoints merged by sort_unique are evaluated at each function's own
  // nearby breakpoint, so a value is never read off the wrong side.
  auto snapped = [](const PlqFunction& f, double x) {
    const auto& br = f.breakpoints();
    auto it = std::lower_bound(br.begin(), br.end(), x - 1e-12 * scale_of(x));
    if (it != br.end() && std::abs(*it - x) <= 1e-12 * scale_of(x)) return f.values()[it - br.begin()];
    return f(x);
  };
  auto value_at = [&](double x) {
    ExtReal v = snapped(fs[0], x);
    for (std::size_t i = 1; i < fs.size(); ++i)
      v = mode == Combine::kMax ? max(v, snapped(fs[i], x)) : min(v, snapped(fs[i], x));
    return v;
  };

  std::vector<double> breaks;
  std::vector<Piece> pieces;
  for (std::size_t k = 0; k <= cand.size(); ++k) {
    const double lo = k == 0 ? -kInf : cand[k - 1];
    const double hi = k == cand.size() ? kInf : cand[k];
    const double mid = interior_point(lo, hi);
    std::vector<Quadratic> qs;
    bool any_inf = false;
    for (const auto& f : fs) {
      const Piece& p = f.pieces()[*f.locate(mid)];
      if (p.finite) qs.push_back(p.q); else any_inf = true;
    }
    if (k > 0) breaks.push_back(lo);
    if ((mode == Combine::kMax && any_inf) || qs.empty()) {
      pieces.push_back(Piece::infinite());
      continue;
    }
    std::vector<double> sub;
    for (std::size_t i = 0; i < qs.size(); ++i) {
      for (std::size_t j = i + 1; j < qs.size(); ++j) {
        auto r = crossings(qs[i], qs[j], lo, hi);
        sub.insert(sub.end(), r.begin(), r.end());
      }
    }
    sort_unique(sub);
    for (std::size_t s = 0; s <= sub.size(); ++s) {
      const double slo = s == 0 ? lo : sub[s - 1];
      const double shi = s == sub.size() ? hi : sub[s];
      const double t = interior_point(slo, shi);
      std::size_t best = 0;
      for (std::size_t i = 1; i < qs.size(); ++i) {
        const bool better = mode == Combine::kMax ? qs[i](t) > qs[best](t) : qs[i](t) < qs[best](t);
        if (better) best = i;
      }
      if (s > 0) breaks.push_back(slo);
      pieces.push_back({true, qs[best]});
    }
  }
  std::vector<ExtReal> values;
  for (double x : breaks) values.push_back(value_at(x));
  for (auto v : values) {
    if (v.is_neg_inf()) throw std::domain_error("combine: -inf value");
  }
  return PlqFunction(std::move(breaks), std::move(pieces), std::move(values)).canonical();
}

/// sup_{x in cell} (s x - q(x)) as a function of s. Returns nullopt when
/// the supremum is +inf for every s (unbounded concave cell).
inline std::optional<PlqFunction> cell_conjugate(const Cell& cell) {
  const auto& q = cell.q;
  const double l = cell.lo, u = cell.hi;
  const bool fl = std::isfinite(l), fu = std::isfinite(u);
  auto end_line = [&](double x) { return Piece::linear(x, -q(x)); };
  if (fl && fu && l == u) return PlqFunction::quadratic(0, l, -q(l));
  if (q.a > 0.0) {
    std::vector<double> br;
    std::vector<Piece> pc;
    const Piece mid = Piece::quad(1.0 / (4.0 * q.a), -q.b / (2.0 * q.a), q.b * q.b / (4.0 * q.a) - q.c);
    if (fl) {
      br.push_back(q.slope(l));
      pc.push_back(end_line(l));
    }
    pc.push_back(mid);
    if (fu) {
      br.push_back(q.slope(u));
      pc.push_back(end_line(u));
    }
    if (br.size() == 2 && !(br[0] < br[1])) return PlqFunction::quadratic(0, l, -q(l));
    std::vector<ExtReal> vals;
    for (double s : br) vals.push_back(mid.q(s));
    return PlqFunction(br, pc, vals);
  }
  if (q.a == 0.0) {
    Piece left = fl ? end_line(l) : Piece::infinite();
    Piece right = fu ? end_line(u) : Piece::infinite();
    return PlqFunction({q.b}, {left, right}, {ExtReal(-q.c)});
  }
  if (!fl || !fu) return std::nullopt;
  const double s = (q(u) - q(l)) / (u - l);
  return PlqFunction({s}, {end_line(l), end_line(u)}, {ExtReal(s * l - q(l))});
}

}  // namespace detail

/// Fenchel conjugate f*(s) = sup_x [s x - f(x)], exact. For nonconvex or
/// non-lsc f this is the conjugate of the closed convex hull of f.
/// Throws std::domain_error when f* is improper (identically +inf).
inline PlqFunction conjugate(const PlqFunction& f) {
  std::vector<PlqFunction> parts;
  for (const auto& cell : f.cells()) {
    auto h = detail::cell_conjugate(cell);
    if (!h) throw std::domain_error("conjugate: convex hull of f is improper (conjugate identically +inf)");
    parts.push_back(*h);
  }
  try {
    return detail::combine(parts, detail::Combine::kMax);
  } catch (const std::invalid_argument&) {
    throw std::domain_error("conjugate: conjugate is identically +inf");
  }
}

/// Closure of the epigraph: every breakpoint value is lowered to the
/// smaller one-sided limit when that is below it.
inline PlqFunction lsc_hull(const PlqFunction& f) {
  std::vector<ExtReal> vals = f.values();
  for (std::size_t k = 0; k < vals.size(); ++k) vals[k] = min(vals[k], min(f.left_limit(k), f.right_limit(k)));
  return {f.breakpoints(), f.pieces(), vals};
}

/// Exact convexity test: the domain is an interval, every finite piece has
/// a >= 0, values at interior breakpoints continue both pieces, slopes are
/// nondecreasing across them, and boundary values are not below the limit.
inline bool convexity_check(const PlqFunction& f, double tol = 1e-9) {
  const auto& br = f.breakpoints();
  const auto& pc = f.pieces();
  const auto& vs = f.values();
  for (const auto& p : pc) {
    if (p.finite && p.q.a < 0.0) return false;
  }
  // Finite pieces and finite breakpoints must form one contiguous run.
  // Sequence: piece0, break0, piece1, break1, ..., piece_k.
  std::vector<bool> fin;
  for (std::size_t k = 0; k < br.size(); ++k) {
    fin.push_back(pc[k].finite);
    fin.push_back(vs[k].is_finite());
  }
  fin.push_back(pc.back().finite);
  int runs = 0;
  for (std::size_t i = 0; i < fin.size(); ++i) {
    if (fin[i] && (i == 0 || !fin[i - 1])) ++runs;
  }
  if (runs != 1) return false;
  for (std::size_t k = 0; k < br.size(); ++k) {
    const double x = br[k];
    const Piece& l = pc[k];
    const Piece& r = pc[k + 1];
    if (l.finite && r.finite) {
      const double lv = l.q(x), rv = r.q(x);
      const double sc = detail::scale_of(lv);
      if (!vs[k].is_finite()) return false;
      if (std::abs(lv - rv) > tol * sc || std::abs(vs[k].value() - lv) > tol * sc) return false;
      if (l.q.slope(x) > r.q.slope(x) + tol * detail::scale_of(l.q.slope(x))) return false;
    } else if (l.finite || r.finite) {
      const double lim = l.finite ? l.q(x) : r.q(x);
      if (vs[k].is_finite() && vs[k].value() < lim - tol * detail::scale_of(lim)) return false;
    }
  }
  return true;
}

/// x -> f(x - p) - ps * x.
inline PlqFunction transform_shift_tilt(const PlqFunction& f, double p, double ps) {
  std::vector<double> br;
  std::vector<Piece> pc;
  std::vector<ExtReal> vs;
  for (double x : f.breakpoints()) br.push_back(x + p);
  for (const auto& piece : f.pieces()) {
    if (!piece.finite) {
      pc.push_back(piece);
      continue;
    }
    const auto& q = piece.q;
    pc.push_back(Piece::quad(q.a, q.b - 2.0 * q.a * p - ps, q.a * p * p - q.b * p + q.c));
  }
  for (std::size_t k = 0; k < br.size(); ++k) vs.push_back(f.values()[k] + ExtReal(-ps * br[k]));
  return {br, pc, vs};
}

/// x -> f(-x).
inline PlqFunction reflect(const PlqFunction& f) {
  std::vector<double> br(f.breakpoints().rbegin(), f.breakpoints().rend());
  for (auto& x : br) x = -x;
  std::vector<Piece> pc(f.pieces().rbegin(), f.pieces().rend());
  for (auto& p : pc) p.q.b = -p.q.b;
  std::vector<ExtReal> vs(f.values().rbegin(), f.values().rend());
  return {br, pc, vs};
}

/// Pointwise sum. Throws std::invalid_argument if the result is
/// identically +inf.
inline PlqFunction add(const PlqFunction& f, const PlqFunction& g) {
  std::vector<double> br = f.breakpoints();
  br.insert(br.end(), g.breakpoints().begin(), g.breakpoints().end());
  detail::sort_unique(br);
  std::vector<Piece> pc;
  std::vector<ExtReal> vs;
  for (std::size_t k = 0; k <= br.size(); ++k) {
    const double lo = k == 0 ? -kInf : br[k - 1];
    const double hi = k == br.size() ? kInf : br[k];
    const double mid = detail::interior_point(lo, hi);
    const Piece& p = f.pieces()[*f.locate(mid)];
    const Piece& q = g.pieces()[*g.locate(mid)];
    if (p.finite && q.finite) pc.push_back(Piece::quad(p.q.a + q.q.a, p.q.b + q.q.b, p.q.c + q.q.c));
    else pc.push_back(Piece::infinite());
  }
  for (double x : br) vs.push_back(f(x) + g(x));
  return PlqFunction(br, pc, vs).canonical();
}

struct UnivariateMin {
  ExtReal value;
  std::optional<double> argmin;  // smallest attaining point, when attained
};

/// inf_x f(x) with the smallest minimizer. -inf is reported as a value.
inline UnivariateMin minimize(const PlqFunction& f, double tol = 1e-9) {
  struct Cand {
    ExtReal v;
    double x;
  };
  std::vector<Cand> cands;
  for (const auto& c : f.cells()) {
    const auto& q = c.q;
    auto at = [&](double x) { cands.push_back({ExtReal(q(x)), x}); };
    if (c.lo == c.hi) {
      at(c.lo);
    } else if (q.a > 0.0) {
      at(std::clamp(-q.b / (2.0 * q.a), c.lo, c.hi));
    } else if (q.a == 0.0) {
      if (q.b > 0.0) {
        if (std::isinf(c.lo)) return {ExtReal::neg_inf(), std::nullopt};
        at(c.lo);
      } else if (q.b < 0.0) {
        if (std::isinf(c.hi)) return {ExtReal::neg_inf(), std::nullopt};
        at(c.hi);
      } else {
        at(std::isfinite(c.lo) ? c.lo : (std::isfinite(c.hi) ? c.hi : 0.0));
      }
    } else {
      if (std::isinf(c.lo) || std::isinf(c.hi)) return {ExtReal::neg_inf(), std::nullopt};
      at(c.lo);
      at(c.hi);
    }
  }
  ExtReal best = ExtReal::inf();
  for (const auto& c : cands) best = min(best, c.v);
  std::optional<double> arg;
  for (const auto& c : cands) {
    if (!approx_equal(c.v, best, tol * detail::scale_of(best.value()))) continue;
    // Closure cells may report an unattained infimum; confirm with f.
    if (!approx_equal(f(c.x), best, tol * detail::scale_of(best.value()))) continue;
    if (!arg || c.x < *arg) arg = c.x;
  }
  return {best, arg};
}

/// Exact infimal convolution (f □ g)(a) = inf_x [f(x) + g(a - x)] with
/// per-point exactness witnesses.
class InfConvolution {
 public:
  InfConvolution(PlqFunction f, PlqFunction g) : f_(std::move(f)), g_(std::move(g)) {
    std::vector<PlqFunction> parts;
    for (const auto& cf : f_.cells()) {
      for (const auto& cg : g_.cells()) {
        if (auto h = pair_function(cf, cg)) parts.push_back(std::move(*h));
      }
    }
    if (parts.empty()) throw std::invalid_argument("inf_convolution: improper input");
    value_ = detail::combine(parts, detail::Combine::kMin);
  }

  const PlqFunction& value() const { return value_; }
  ExtReal operator()(double a) const { return value_(a); }

  /// Smallest x attaining the infimum at a, or nullopt when the infimum is
  /// +inf or not attained.
  std::optional<double> witness(double a, double tol = 1e-9) const {
    struct Cand {
      ExtReal v;
      double x;
    };
    std::vector<Cand> cands;
    for (const auto& cf : f_.cells()) {
      for (const auto& cg : g_.cells()) {
        auto r = pair_min(cf, cg, a);
        if (r.first.is_finite()) cands.push_back({r.first, r.second});
      }
    }
    ExtReal best = ExtReal::inf();
    for (const auto& c : cands) best = min(best, c.v);
    if (!best.is_finite()) return std::nullopt;
    std::optional<double> arg;
    const double t = tol * detail::scale_of(best.value());
    for (const auto& c : cands) {
      if (!approx_equal(c.v, best, t)) continue;
      const ExtReal actual = f_(c.x) + g_(a - c.x);
      if (!approx_equal(actual, best, t)) continue;
      if (!arg || c.x < *arg) arg = c.x;
    }
    return arg;
  }

 private:
  // Objective x -> q1(x) + q2(a - x) = A x^2 + (b0 + b1 a) x + (c0 + c1 a + c2 a^2).
  struct PairForm {
    double A, b0, b1, c0, c1, c2;
    explicit PairForm(const Cell& f, const Cell& g)
        : A(f.q.a + g.q.a), b0(f.q.b - g.q.b), b1(-2.0 * g.q.a), c0(f.q.c + g.q.c), c1(g.q.b), c2(g.q.a) {}
    double B(double a) const { return b0 + b1 * a; }
  };

  static std::pair<double, double> bounds(const Cell& f, const Cell& g, double a) {
    return {std::max(f.lo, a - g.hi), std::min(f.hi, a - g.lo)};
  }

  /// Minimum over the cell pair at a, and the smallest minimizer.
  static std::pair<ExtReal, double> pair_min(const Cell& f, const Cell& g, double a) {
    if (a < f.lo + g.lo || a > f.hi + g.hi) return {ExtReal::inf(), 0.0};
    auto [lo, hi] = bounds(f, g, a);
    if (lo > hi) {
      if (lo - hi > 1e-12 * detail::scale_of(lo)) return {ExtReal::inf(), 0.0};
      hi = lo;
    }
    const PairForm P(f, g);
    auto obj = [&](double x) { return ExtReal(f.q(x) + g.q(a - x)); };
    const double B = P.B(a);
    if (P.A > 0.0) {
      const double x = std::clamp(-B / (2.0 * P.A), lo, hi);
      return {obj(x), x};
    }
    if (P.A == 0.0) {
      const double bs = std::max({std::abs(P.b0), std::abs(P.b1 * a), 1.0});
      if (B > 1e-12 * bs) {
        if (std::isinf(lo)) throw std::domain_error("inf_convolution: value -inf");
        return {obj(lo), lo};
      }
      if (B < -1e-12 * bs) {
        if (std::isinf(hi)) throw std::domain_error("inf_convolution: value -inf");
        return {obj(hi), hi};
      }
      const double x = std::isfinite(lo) ? lo : (std::isfinite(hi) ? hi : 0.0);
      return {obj(x), x};
    }
    if (std::isinf(lo) || std::isinf(hi)) throw std::domain_error("inf_convolution: value -inf");
    const ExtReal vl = obj(lo), vh = obj(hi);
    return vh < vl ? std::pair{vh, hi} : std::pair{vl, lo};
  }

  /// The pair value a -> min over the cell pair, as a PLQ function.
  static std::optional<PlqFunction> pair_function(const Cell& f, const Cell& g) {
    const double amin = f.lo + g.lo, amax = f.hi + g.hi;
    const PairForm P(f, g);
    std::vector<double> cand{amin, amax, f.lo + g.hi, f.hi + g.lo};
    // Linear forms x = e0 + e1 a of the four possible bounds.
    const std::pair<double, double> forms[] = {{f.lo, 0.0}, {-g.hi, 1.0}, {f.hi, 0.0}, {-g.lo, 1.0}};
    if (P.A > 0.0) {
      const double x0 = -P.b0 / (2.0 * P.A), x1 = -P.b1 / (2.0 * P.A);
      for (auto [e0, e1] : forms) {
        if (std::isfinite(e0) && x1 != e1) cand.push_back((e0 - x0) / (x1 - e1));
      }
    } else if (P.A == 0.0 && P.b1 != 0.0) {
      cand.push_back(-P.b0 / P.b1);
    }
    detail::sort_unique(cand);
    std::vector<double> inner;
    for (double c : cand) {
      if (c >= amin && c <= amax) inner.push_back(c);
    }
    cand = inner;

    // Value of the objective along x = e0 + e1 a, as a quadratic in a.
    auto along = [&](double e0, double e1) {
      return Quadratic{P.A * e1 * e1 + P.b1 * e1 + P.c2, 2.0 * P.A * e0 * e1 + P.b0 * e1 + P.b1 * e0 + P.c1,
                       P.A * e0 * e0 + P.b0 * e0 + P.c0};
    };
    auto lo_form = [&](double a) {
      return (f.lo >= a - g.hi) ? std::pair{f.lo, 0.0} : std::pair{-g.hi, 1.0};
    };
    auto hi_form = [&](double a) {
      return (f.hi <= a - g.lo) ? std::pair{f.hi, 0.0} : std::pair{-g.lo, 1.0};
    };

    std::vector<double> br;
    std::vector<Piece> pc;
    auto emit = [&](double lo, double hi) {
      const double a = detail::interior_point(lo, hi);
      if (!(a > amin && a < amax)) {
        pc.push_back(Piece::infinite());
        return;
      }
      const auto [l0, l1] = lo_form(a);
      const auto [h0, h1] = hi_form(a);
      const double xlo = l0 + l1 * a, xhi = h0 + h1 * a;
      const double B = P.B(a);
      if (P.A > 0.0) {
        const double xs = -B / (2.0 * P.A);
        if (xs < xlo) pc.push_back({true, along(l0, l1)});
        else if (xs > xhi) pc.push_back({true, along(h0, h1)});
        else
          pc.push_back(Piece::quad(P.c2 - P.b1 * P.b1 / (4.0 * P.A), P.c1 - P.b0 * P.b1 / (2.0 * P.A),
                                   P.c0 - P.b0 * P.b0 / (4.0 * P.A)));
        return;
      }
      if (P.A == 0.0) {
        if (B > 0.0) {
          if (std::isinf(xlo)) throw std::domain_error("inf_convolution: value -inf");
          pc.push_back({true, along(l0, l1)});
        } else if (B < 0.0) {
          if (std::isinf(xhi)) throw std::domain_error("inf_convolution: value -inf");
          pc.push_back({true, along(h0, h1)});
        } else {
          // B vanishes on the whole interval: the objective does not depend on x.
          pc.push_back({true, std::isfinite(xlo) ? along(l0, l1) : (std::isfinite(xhi) ? along(h0, h1) : along(0, 0))});
        }
        return;
      }
      if (std::isinf(xlo) || std::isinf(xhi)) throw std::domain_error("inf_convolution: value -inf");
      // Concave objective: the smaller endpoint value, split where they cross.
      const Quadratic ql = along(l0, l1), qh = along(h0, h1);
      auto roots = detail::crossings(ql, qh, lo, hi);
      double prev = lo;
      roots.push_back(hi);
      for (std::size_t i = 0; i < roots.size(); ++i) {
        const double t = detail::interior_point(prev, roots[i]);
        if (i > 0) br.push_back(prev);
        pc.push_back({true, qh(t) < ql(t) ? qh : ql});
        prev = roots[i];
      }
    };

    for (std::size_t k = 0; k <= cand.size(); ++k) {
      const double lo = k == 0 ? -kInf : cand[k - 1];
      const double hi = k == cand.size() ? kInf : cand[k];
      if (k > 0) br.push_back(lo);
      emit(lo, hi);
    }
    std::vector<ExtReal> vs;
    for (double a : br) vs.push_back(pair_min(f, g, a).first);
    bool any = std::any_of(pc.begin(), pc.end(), [](const Piece& p) { return p.finite; }) ||
               std::any_of(vs.begin(), vs.end(), [](ExtReal v) { return v.is_finite(); });
    if (!any) return std::nullopt;
    return PlqFunction(br, pc, vs);
  }

  PlqFunction f_, g_;
  PlqFunction value_;
};

inline InfConvolution inf_convolution(const PlqFunction& f, const PlqFunction& g) { return {f, g}; }

/// Convex subdifferential at x: a closed interval, empty off the domain.
inline SetOnLine subdifferential(const PlqFunction& f, double x) {
  const ExtReal fx = f(x);
  if (!fx.is_finite()) return SetOnLine::empty();
  std::size_t k = 0;
  if (auto j = f.locate(x, &k)) return SetOnLine(Interval::point(f.pieces()[*j].q.slope(x)));
  const Piece& l = f.pieces()[k];
  const Piece& r = f.pieces()[k + 1];
  const double lo = l.finite ? l.q.slope(x) : -kInf;
  const double hi = r.finite ? r.q.slope(x) : kInf;
  if (lo > hi) {
    // A kink that is flat up to rounding.
    if (lo - hi <= 1e-9 * std::max(detail::scale_of(lo), detail::scale_of(hi)))
      return SetOnLine(Interval::point(0.5 * (lo + hi)));
    return SetOnLine::empty();
  }
  return SetOnLine(Interval::closed(lo, hi));
}

/// f(x) + f*(xs) - x xs, given the conjugate.
inline ExtReal fenchel_young_gap(const PlqFunction& f, const PlqFunction& fstar, double x, double xs) {
  const ExtReal fx = f(x);
  if (fx.is_pos_inf()) return fx;
  const ExtReal fs = fstar(xs);
  if (fs.is_pos_inf()) return fs;
  return ExtReal(fx.value() + fs.value() - x * xs);
}

inline ExtReal fenchel_young_gap(const PlqFunction& f, double x, double xs) {
  return fenchel_young_gap(f, conjugate(f), x, xs);
}

}  // namespace fitzrange
