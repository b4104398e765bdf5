#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "kfl/grid_function.hpp"

namespace testutil {

inline kfl::GridFunction grid1d(double lo, double hi, std::size_t n,
                                const std::function<double(double)>& fn) {
  return kfl::GridFunction::from_callable(
      {{lo, hi, n}},
      [&fn](const std::array<double, 3>& x) { return fn(x[0]); });
}

struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}
  double uniform() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(uniform() * (hi - lo + 1.0));
  }
};

// Random non-increasing step profile breakpoints (t_i, v_i) with zero tail.
inline std::vector<std::pair<double, double>> random_step(Rng& rng,
                                                          int pieces) {
  std::vector<std::pair<double, double>> pts;
  double t = 0.0;
  double v = rng.uniform(1.0, 4.0);
  for (int i = 0; i < pieces; ++i) {
    pts.emplace_back(t, v);
    t += rng.uniform(0.05, 1.0);
    v *= rng.uniform(0.3, 0.95);
  }
  pts.emplace_back(t, 0.0);
  return pts;
}

}  // namespace testutil
