#pragma once

// Discrete Legendre-Fenchel transforms on uniform grids in one and two
// dimensions, min-plus convolution, and a refining attainment probe.

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "fitzrange/ext_real.hpp"

namespace fitzrange {

struct Axis {
  double lo = -8.0;
  double hi = 8.0;
  int n = 257;

  double step() const { return (hi - lo) / (n - 1); }
  double node(int i) const { return i == n - 1 ? hi : lo + i * step(); }
  /// Nearest node index, ties to the lower index; nullopt outside the axis.
  std::optional<int> nearest(double x) const {
    const double h = step();
    if (x < lo - 0.5 * h || x > hi + 0.5 * h) return std::nullopt;
    const double t = (x - lo) / h;
    int i = static_cast<int>(std::ceil(t - 0.5));
    i = std::max(0, std::min(n - 1, i));
    return i;
  }
  void validate() const {
    if (n < 2) throw std::invalid_argument("Axis: need n >= 2");
    if (!(lo < hi)) throw std::invalid_argument("Axis: need lo < hi");
  }
  friend bool operator==(const Axis&, const Axis&) = default;
};

/// Samples of an extended-real function on a uniform grid; +inf is stored
/// as an IEEE infinity. Two-dimensional values are row-major in the first
/// axis.
class GridFn {
 public:
  GridFn(std::vector<Axis> axes, std::vector<double> values) : axes_(std::move(axes)), values_(std::move(values)) {
    if (axes_.empty() || axes_.size() > 2) throw std::invalid_argument("GridFn: dimension must be 1 or 2");
    std::size_t count = 1;
    for (const auto& a : axes_) {
      a.validate();
      count *= static_cast<std::size_t>(a.n);
    }
    if (values_.size() != count) throw std::invalid_argument("GridFn: value count does not match axes");
    bool any = false;
    for (double v : values_) {
      if (std::isnan(v) || v == -kInf) throw std::invalid_argument("GridFn: values must be finite or +inf");
      any = any || std::isfinite(v);
    }
    if (!any) throw std::invalid_argument("GridFn: all values are +inf");
  }

  static GridFn sample(const Axis& ax, const std::function<ExtReal(double)>& f) {
    std::vector<double> v(ax.n);
    for (int i = 0; i < ax.n; ++i) v[i] = f(ax.node(i)).value();
    return GridFn({ax}, std::move(v));
  }
  static GridFn sample(const Axis& ax, const Axis& ay, const std::function<ExtReal(double, double)>& f) {
    std::vector<double> v(static_cast<std::size_t>(ax.n) * ay.n);
    for (int i = 0; i < ax.n; ++i)
      for (int j = 0; j < ay.n; ++j) v[static_cast<std::size_t>(i) * ay.n + j] = f(ax.node(i), ay.node(j)).value();
    return GridFn({ax, ay}, std::move(v));
  }

  int dimension() const { return static_cast<int>(axes_.size()); }
  const std::vector<Axis>& axes() const { return axes_; }
  const std::vector<double>& values() const { return values_; }
  double at(int i) const { return values_[i]; }
  double at(int i, int j) const { return values_[static_cast<std::size_t>(i) * axes_[1].n + j]; }

 private:
  std::vector<Axis> axes_;
  std::vector<double> values_;
};

namespace detail {

struct HullPoint {
  double x, y;
};

/// Lower convex hull of points sorted by x, skipping infinite values.
inline std::vector<HullPoint> lower_hull(const std::vector<double>& xs, const std::vector<double>& ys) {
  std::vector<HullPoint> h;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(ys[i])) continue;
    const HullPoint p{xs[i], ys[i]};
    while (h.size() >= 2) {
      const auto& a = h[h.size() - 2];
      const auto& b = h.back();
      // Drop b when it lies on or above segment a-p.
      if ((b.y - a.y) * (p.x - a.x) >= (p.y - a.y) * (b.x - a.x)) h.pop_back();
      else break;
    }
    h.push_back(p);
  }
  return h;
}

/// max_i (s x_i - y_i) over hull vertices for increasing s, by a merge scan.
inline std::vector<double> conjugate_scan(const std::vector<HullPoint>& h, const std::vector<double>& s) {
  std::vector<double> out(s.size());
  std::size_t k = 0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    while (k + 1 < h.size() && s[j] * h[k + 1].x - h[k + 1].y >= s[j] * h[k].x - h[k].y) ++k;
    out[j] = s[j] * h[k].x - h[k].y;
  }
  return out;
}

}  // namespace detail

/// Dual axis spanning the slope range of the lower convex hull of F, with
/// the same node count. A one-point hull falls back to [-1, 1].
inline Axis default_dual_axis(const GridFn& F) {
  const Axis& ax = F.axes()[0];
  std::vector<double> xs(ax.n);
  for (int i = 0; i < ax.n; ++i) xs[i] = ax.node(i);
  const auto h = detail::lower_hull(xs, F.values());
  if (h.size() < 2) return {-1.0, 1.0, ax.n};
  const double s0 = (h[1].y - h[0].y) / (h[1].x - h[0].x);
  const double s1 = (h.back().y - h[h.size() - 2].y) / (h.back().x - h[h.size() - 2].x);
  if (!(s0 < s1)) return {s0 - 1.0, s0 + 1.0, ax.n};
  return {s0, s1, ax.n};
}

/// Discrete conjugate s -> max_i [s x_i - F_i] on the dual axis, computed in
/// linear time from the lower convex hull.
inline GridFn llt_1d(const GridFn& F, std::optional<Axis> dual = std::nullopt) {
  if (F.dimension() != 1) throw std::invalid_argument("llt_1d: one-dimensional input required");
  const Axis& ax = F.axes()[0];
  const Axis du = dual ? *dual : default_dual_axis(F);
  std::vector<double> xs(ax.n), s(du.n);
  for (int i = 0; i < ax.n; ++i) xs[i] = ax.node(i);
  for (int j = 0; j < du.n; ++j) s[j] = du.node(j);
  return GridFn({du}, detail::conjugate_scan(detail::lower_hull(xs, F.values()), s));
}

/// Discrete bivariate conjugate (u, v) -> max_{i,j} [u x_i + v y_j - F_ij],
/// factored as a transform along the second axis followed by one along the
/// first. Output axes are the dual axes (default: the input axes).
inline GridFn llt_2d(const GridFn& F, std::optional<Axis> dual_u = std::nullopt,
                     std::optional<Axis> dual_v = std::nullopt) {
  if (F.dimension() != 2) throw std::invalid_argument("llt_2d: two-dimensional input required");
  const Axis& ax = F.axes()[0];
  const Axis& ay = F.axes()[1];
  const Axis du = dual_u ? *dual_u : ax;
  const Axis dv = dual_v ? *dual_v : ay;
  std::vector<double> ys(ay.n), vs(dv.n), us(du.n);
  for (int j = 0; j < ay.n; ++j) ys[j] = ay.node(j);
  for (int j = 0; j < dv.n; ++j) vs[j] = dv.node(j);
  for (int i = 0; i < du.n; ++i) us[i] = du.node(i);

  // G(i, v) = max_j [v y_j - F_ij]; rows without finite values stay -inf.
  std::vector<std::vector<double>> G(ax.n);
  for (int i = 0; i < ax.n; ++i) {
    std::vector<double> row(F.values().begin() + static_cast<std::ptrdiff_t>(i) * ay.n,
                            F.values().begin() + static_cast<std::ptrdiff_t>(i + 1) * ay.n);
    const auto h = detail::lower_hull(ys, row);
    G[i] = h.empty() ? std::vector<double>(dv.n, -kInf) : detail::conjugate_scan(h, vs);
  }
  std::vector<double> out(static_cast<std::size_t>(du.n) * dv.n);
  std::vector<double> xs(ax.n), col(ax.n);
  for (int i = 0; i < ax.n; ++i) xs[i] = ax.node(i);
  for (int j = 0; j < dv.n; ++j) {
    for (int i = 0; i < ax.n; ++i) col[i] = -G[i][j];
    const auto r = detail::conjugate_scan(detail::lower_hull(xs, col), us);
    for (int i = 0; i < du.n; ++i) out[static_cast<std::size_t>(i) * dv.n + j] = r[i];
  }
  return GridFn({du, dv}, std::move(out));
}

/// H(w) = min over nodes u of F(w - u) + G(u) + <tilt, u>, with w - u snapped
/// to the nearest node of F (ties to the lower index). Output lives on F's
/// grid. Direct quadratic-time evaluation.
inline GridFn discrete_infconv(const GridFn& F, const GridFn& G, std::array<double, 2> tilt = {0.0, 0.0}) {
  if (F.dimension() != G.dimension()) throw std::invalid_argument("discrete_infconv: dimension mismatch");
  for (int d = 0; d < F.dimension(); ++d) {
    if (std::abs(F.axes()[d].step() - G.axes()[d].step()) > 1e-12 * F.axes()[d].step())
      throw std::invalid_argument("discrete_infconv: incompatible grid steps");
  }
  const auto& fa = F.axes();
  const auto& ga = G.axes();
  std::vector<double> out(F.values().size(), kInf);
  if (F.dimension() == 1) {
    for (int w = 0; w < fa[0].n; ++w) {
      double best = kInf;
      for (int u = 0; u < ga[0].n; ++u) {
        const double gu = G.at(u);
        if (!std::isfinite(gu)) continue;
        const auto k = fa[0].nearest(fa[0].node(w) - ga[0].node(u));
        if (!k) continue;
        const double fv = F.at(*k);
        if (!std::isfinite(fv)) continue;
        best = std::min(best, fv + gu + tilt[0] * ga[0].node(u));
      }
      out[w] = best;
    }
  } else {
    for (int w1 = 0; w1 < fa[0].n; ++w1) {
      for (int w2 = 0; w2 < fa[1].n; ++w2) {
        double best = kInf;
        for (int u1 = 0; u1 < ga[0].n; ++u1) {
          const auto k1 = fa[0].nearest(fa[0].node(w1) - ga[0].node(u1));
          if (!k1) continue;
          for (int u2 = 0; u2 < ga[1].n; ++u2) {
            const double gu = G.at(u1, u2);
            if (!std::isfinite(gu)) continue;
            const auto k2 = fa[1].nearest(fa[1].node(w2) - ga[1].node(u2));
            if (!k2) continue;
            const double fv = F.at(*k1, *k2);
            if (!std::isfinite(fv)) continue;
            best = std::min(best, fv + gu + tilt[0] * ga[0].node(u1) + tilt[1] * ga[1].node(u2));
          }
        }
        out[static_cast<std::size_t>(w1) * fa[1].n + w2] = best;
      }
    }
  }
  bool any = false;
  for (double v : out) any = any || std::isfinite(v);
  if (!any) throw std::invalid_argument("discrete_infconv: result is identically +inf");
  return GridFn(fa, std::move(out));
}

/// Pointwise discrete infimal convolution at a single w, in linear time.
inline ExtReal discrete_infconv_at(const GridFn& F, const GridFn& G, double w, double tilt = 0.0) {
  if (F.dimension() != 1 || G.dimension() != 1) throw std::invalid_argument("discrete_infconv_at: 1D only");
  double best = kInf;
  const Axis& fa = F.axes()[0];
  const Axis& ga = G.axes()[0];
  for (int u = 0; u < ga.n; ++u) {
    const double gu = G.at(u);
    if (!std::isfinite(gu)) continue;
    const auto k = fa.nearest(w - ga.node(u));
    if (!k || !std::isfinite(F.at(*k))) continue;
    best = std::min(best, F.at(*k) + gu + tilt * ga.node(u));
  }
  return ExtReal(best);
}

enum class ProbeStatus { kFound, kBoundary, kInfeasible };

inline const char* to_string(ProbeStatus s) {
  switch (s) {
    case ProbeStatus::kFound: return "found";
    case ProbeStatus::kBoundary: return "boundary";
    case ProbeStatus::kInfeasible: return "infeasible";
  }
  return "?";
}

struct ProbeResult {
  ProbeStatus status = ProbeStatus::kInfeasible;
  std::array<double, 2> point{0.0, 0.0};
  ExtReal value = ExtReal::inf();
};

struct ProbeConfig {
  double box = 8.0;  // search in [-box, box]^dim
  int n = 257;       // nodes per axis on each pass
  int refinements = 4;
  double tol = 1e-6;
};

/// Minimizes `objective` over [-box, box]^dim by a coarse grid pass followed
/// by `refinements` passes on incumbent +- 2h. An incumbent on the outer box
/// edge is reported as kBoundary (inconclusive: the infimum may lie beyond).
inline ProbeResult attainment_probe(int dim, const std::function<ExtReal(std::array<double, 2>)>& objective,
                                    const ProbeConfig& cfg) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("attainment_probe: dimension must be 1 or 2");
  std::array<double, 2> lo{-cfg.box, -cfg.box}, hi{cfg.box, cfg.box};
  if (dim == 1) lo[1] = hi[1] = 0.0;
  ProbeResult best;
  for (int pass = 0; pass <= cfg.refinements; ++pass) {
    const int n1 = cfg.n;
    const int n2 = dim == 2 ? cfg.n : 1;
    const double h1 = (hi[0] - lo[0]) / (n1 - 1);
    const double h2 = dim == 2 ? (hi[1] - lo[1]) / (n2 - 1) : 0.0;
    for (int i = 0; i < n1; ++i) {
      for (int j = 0; j < n2; ++j) {
        const std::array<double, 2> z{i == n1 - 1 ? hi[0] : lo[0] + i * h1,
                                      dim == 2 ? (j == n2 - 1 ? hi[1] : lo[1] + j * h2) : 0.0};
        const ExtReal v = objective(z);
        if (v < best.value) {
          best.value = v;
          best.point = z;
        }
      }
    }
    if (!best.value.is_finite()) return best;
    for (int d = 0; d < dim; ++d) {
      const double h = d == 0 ? h1 : h2;
      lo[d] = std::max(-cfg.box, best.point[d] - 2.0 * h);
      hi[d] = std::min(cfg.box, best.point[d] + 2.0 * h);
      if (!(lo[d] < hi[d])) hi[d] = lo[d] + cfg.tol;
    }
  }
  best.status = ProbeStatus::kFound;
  for (int d = 0; d < dim; ++d) {
    if (std::abs(std::abs(best.point[d]) - cfg.box) <= cfg.tol) best.status = ProbeStatus::kBoundary;
  }
  return best;
}

}  // namespace fitzrange
