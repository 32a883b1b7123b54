#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "fitzrange/ext_real.hpp"

namespace fitzrange {

/// One endpoint of an interval. Infinite endpoints are never closed.
struct Endpoint {
  double at = 0.0;
  bool closed = true;

  static Endpoint neg_inf() { return {-kInf, false}; }
  static Endpoint pos_inf() { return {kInf, false}; }
  bool is_infinite() const { return std::isinf(at); }
};

/// A nonempty interval of the real line.
struct Interval {
  Endpoint lo;
  Endpoint hi;

  static Interval closed(double a, double b) { return {{a, !std::isinf(a)}, {b, !std::isinf(b)}}; }
  static Interval open(double a, double b) { return {{a, false}, {b, false}}; }
  static Interval point(double a) { return closed(a, a); }
  static Interval whole() { return {Endpoint::neg_inf(), Endpoint::pos_inf()}; }

  bool is_empty() const {
    if (lo.at > hi.at) return true;
    if (lo.at == hi.at) return !(lo.closed && hi.closed);
    return false;
  }
  bool contains(double x) const {
    if (x < lo.at || x > hi.at) return false;
    if (x == lo.at && !lo.closed) return false;
    if (x == hi.at && !hi.closed) return false;
    return true;
  }
  bool is_closed() const {
    return (lo.closed || lo.is_infinite()) && (hi.closed || hi.is_infinite());
  }
  bool is_point() const { return lo.at == hi.at && lo.closed && hi.closed; }

  friend bool operator==(const Interval& a, const Interval& b) {
    return a.lo.at == b.lo.at && a.hi.at == b.hi.at && a.lo.closed == b.lo.closed &&
           a.hi.closed == b.hi.closed;
  }
};

/// Minkowski sum of two nonempty intervals.
inline Interval minkowski_sum(const Interval& a, const Interval& b) {
  Interval r;
  r.lo.at = a.lo.at + b.lo.at;
  r.hi.at = a.hi.at + b.hi.at;
  r.lo.closed = a.lo.closed && b.lo.closed && !std::isinf(r.lo.at);
  r.hi.closed = a.hi.closed && b.hi.closed && !std::isinf(r.hi.at);
  return r;
}

/// Finite union of disjoint, non-adjacent intervals kept in increasing order.
class SetOnLine {
 public:
  SetOnLine() = default;
  explicit SetOnLine(Interval i) { add(i); }

  static SetOnLine empty() { return {}; }
  static SetOnLine whole() { return SetOnLine(Interval::whole()); }

  /// Union with one interval, merging overlapping or touching components.
  void add(Interval i) {
    if (i.is_empty()) return;
    parts_.push_back(i);
    normalize();
  }
  void add(const SetOnLine& s) {
    for (const auto& i : s.parts_) parts_.push_back(i);
    normalize();
  }

  const std::vector<Interval>& components() const { return parts_; }
  bool is_empty() const { return parts_.empty(); }
  bool is_whole_line() const {
    return parts_.size() == 1 && std::isinf(parts_[0].lo.at) && std::isinf(parts_[0].hi.at);
  }
  bool contains(double x) const {
    return std::any_of(parts_.begin(), parts_.end(), [x](const Interval& i) { return i.contains(x); });
  }
  /// Contains x, or lies within `tol` of a component.
  bool contains_approx(double x, double tol) const {
    return std::any_of(parts_.begin(), parts_.end(), [&](const Interval& i) {
      return x >= i.lo.at - tol && x <= i.hi.at + tol;
    });
  }
  bool is_single_closed_interval() const { return parts_.size() == 1 && parts_[0].is_closed(); }

  /// Smallest and largest elements (as infima/suprema).
  double inf() const { return parts_.empty() ? kInf : parts_.front().lo.at; }
  double sup() const { return parts_.empty() ? -kInf : parts_.back().hi.at; }

  SetOnLine translated(double d) const {
    SetOnLine r;
    for (auto i : parts_) {
      i.lo.at += d;
      i.hi.at += d;
      r.parts_.push_back(i);
    }
    return r;
  }

  SetOnLine intersect(const SetOnLine& o) const {
    SetOnLine r;
    for (const auto& a : parts_) {
      for (const auto& b : o.parts_) {
        Interval c;
        if (a.lo.at > b.lo.at || (a.lo.at == b.lo.at && !a.lo.closed)) c.lo = a.lo; else c.lo = b.lo;
        if (a.hi.at < b.hi.at || (a.hi.at == b.hi.at && !a.hi.closed)) c.hi = a.hi; else c.hi = b.hi;
        if (!c.is_empty()) r.parts_.push_back(c);
      }
    }
    r.normalize();
    return r;
  }

  friend bool operator==(const SetOnLine& a, const SetOnLine& b) { return a.parts_ == b.parts_; }

  std::string to_string() const {
    if (parts_.empty()) return "{}";
    std::ostringstream os;
    for (std::size_t k = 0; k < parts_.size(); ++k) {
      const auto& i = parts_[k];
      if (k) os << " U ";
      if (i.is_point()) {
        os << "{" << i.lo.at << "}";
        continue;
      }
      os << (i.lo.closed ? "[" : "(") << fmt(i.lo.at) << ", " << fmt(i.hi.at) << (i.hi.closed ? "]" : ")");
    }
    return os.str();
  }

 private:
  static std::string fmt(double v) {
    if (v == kInf) return "+inf";
    if (v == -kInf) return "-inf";
    std::ostringstream os;
    os << v;
    return os.str();
  }

  void normalize() {
    for (auto& i : parts_) {
      if (std::isinf(i.lo.at)) i.lo.closed = false;
      if (std::isinf(i.hi.at)) i.hi.closed = false;
    }
    std::sort(parts_.begin(), parts_.end(), [](const Interval& a, const Interval& b) {
      if (a.lo.at != b.lo.at) return a.lo.at < b.lo.at;
      return a.lo.closed && !b.lo.closed;
    });
    std::vector<Interval> out;
    for (const auto& i : parts_) {
      if (!out.empty()) {
        auto& last = out.back();
        bool touches = i.lo.at < last.hi.at ||
                       (i.lo.at == last.hi.at && (i.lo.closed || last.hi.closed));
        if (touches) {
          if (i.hi.at > last.hi.at || (i.hi.at == last.hi.at && i.hi.closed)) last.hi = i.hi;
          continue;
        }
      }
      out.push_back(i);
    }
    parts_ = std::move(out);
  }

  std::vector<Interval> parts_;
};

/// Same components with endpoints equal up to a relative `tol`.
inline bool approx_equal(const SetOnLine& a, const SetOnLine& b, double tol = 1e-9) {
  const auto& pa = a.components();
  const auto& pb = b.components();
  if (pa.size() != pb.size()) return false;
  auto near = [tol](const Endpoint& u, const Endpoint& v) {
    if (std::isinf(u.at) || std::isinf(v.at)) return u.at == v.at;
    return u.closed == v.closed && std::abs(u.at - v.at) <= tol * std::max(1.0, std::abs(u.at));
  };
  for (std::size_t k = 0; k < pa.size(); ++k) {
    if (!near(pa[k].lo, pb[k].lo) || !near(pa[k].hi, pb[k].hi)) return false;
  }
  return true;
}

}  // namespace fitzrange
