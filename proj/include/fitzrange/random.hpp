#pragma once

// Seeded generators for property suites. All draws are quantized so that
// generated data is exactly representable and reproducible.

#include <cstdint>
#include <random>
#include <vector>

#include "fitzrange/operators.hpp"
#include "fitzrange/plq.hpp"

namespace fitzrange {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  /// Uniform integer in [lo, hi].
  int integer(int lo, int hi) {
    return lo + static_cast<int>(eng_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  /// Uniform multiple of `step` in [lo, hi].
  double quantized(double lo, double hi, double step) {
    const int n = static_cast<int>((hi - lo) / step + 0.5);
    return lo + step * integer(0, n);
  }
  bool coin(int percent_true = 50) { return integer(0, 99) < percent_true; }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

/// A random convex lsc proper PLQ function with at most `max_breaks`
/// breakpoints on a quarter grid in [-4, 4].
inline PlqFunction random_convex_plq(Rng& rng, int max_breaks = 4) {
  const int k = rng.integer(0, max_breaks);
  std::vector<double> br;
  while (static_cast<int>(br.size()) < k) {
    const double x = rng.quantized(-4, 4, 0.25);
    if (std::find(br.begin(), br.end(), x) == br.end()) br.push_back(x);
  }
  std::sort(br.begin(), br.end());

  // Finite pieces are those with index in [first, last]; a bounded end sits
  // on a breakpoint. first == last + 1 encodes a single-point domain.
  int first = 0, last = k;
  if (k > 0) {
    first = rng.coin(50) ? 0 : rng.integer(1, k);
    last = rng.coin(50) ? k : rng.integer(first, k);
    if (last < first) last = first;
    if (first > 0 && last < k && rng.coin(10)) last = first - 1;
  }
  std::vector<Piece> pc(k + 1, Piece::infinite());
  std::vector<ExtReal> vs(k, ExtReal::inf());
  if (last < first) {
    vs[first - 1] = ExtReal(rng.quantized(-2, 2, 0.25));
    return {br, pc, vs};
  }

  auto expand = [](double a, double s, double v, double x0) {
    return Piece::quad(a, s - 2.0 * a * x0, a * x0 * x0 - s * x0 + v);
  };
  auto draw_a = [&] { return rng.coin(50) ? 0.0 : rng.quantized(0.25, 2, 0.25); };

  double slope = rng.quantized(-3, 3, 0.25);
  double value = rng.quantized(-2, 2, 0.25);
  for (int j = first; j <= last; ++j) {
    const double a = draw_a();
    if (j == 0) {
      // Unbounded to the left: anchor at the right end (or at 0 if none).
      const double x0 = k > 0 ? br[0] : 0.0;
      pc[j] = expand(a, slope, value, x0);
    } else {
      pc[j] = expand(a, slope, value, br[j - 1]);
    }
    if (j < k) {
      const double x = br[j];
      const auto& q = pc[j].q;
      value = q(x);
      slope = q.slope(x) + (rng.coin(50) ? 0.0 : rng.quantized(0.25, 2, 0.25));
    }
  }
  for (int b = 0; b < k; ++b) {
    const Piece& l = pc[b];
    const Piece& r = pc[b + 1];
    if (l.finite) vs[b] = ExtReal(l.q(br[b]));
    else if (r.finite) vs[b] = ExtReal(r.q(br[b]));
  }
  return {br, pc, vs};
}

/// A random maximal monotone graph: increasing quantized Minty knots with
/// x-rates drawn from {0, 1/2, 1} or a random quarter in (0, 1).
inline MonotoneGraph random_maximal_graph(Rng& rng, int max_knots = 4) {
  auto rate = [&] {
    switch (rng.integer(0, 3)) {
      case 0: return 0.0;
      case 1: return 1.0;
      case 2: return 0.5;
      default: return rng.quantized(0.25, 0.75, 0.25);
    }
  };
  const int k = rng.integer(1, max_knots);
  std::vector<double> ms;
  while (static_cast<int>(ms.size()) < k) {
    const double m = rng.quantized(-6, 6, 0.5);
    if (std::find(ms.begin(), ms.end(), m) == ms.end()) ms.push_back(m);
  }
  std::sort(ms.begin(), ms.end());
  std::vector<Segment> segs;
  double x = rng.quantized(-3, 3, 0.25);
  segs.push_back({-kInf, ms[0], ms[0], x, rate()});
  for (int i = 0; i + 1 < k; ++i) {
    const double r = rate();
    segs.push_back({ms[i], ms[i + 1], ms[i], x, r});
    x += r * (ms[i + 1] - ms[i]);
  }
  segs.push_back({ms[k - 1], kInf, ms[k - 1], x, rate()});
  return MonotoneGraph(std::move(segs));
}

}  // namespace fitzrange
