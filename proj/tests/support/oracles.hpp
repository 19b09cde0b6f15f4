// Test-only reference implementations, coded independently of the library
// paths they check.
#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "sthalf/core.hpp"

namespace sthalf::testing {

struct BruteForceThreshold {
  double gamma = 0.0;
  std::size_t rank = 0;
};

// Reference minimizer for the threshold window: explicit (margin, index)
// ordering, direct per-candidate error recount, explicit smallest-rank
// tie-break. O(n^2), for small inputs only.
inline BruteForceThreshold brute_force_select_threshold(const SampleSet& s, const Halfspace& h,
                                                        std::size_t p) {
  const std::size_t n = s.size();

  std::vector<std::pair<double, std::size_t>> by_margin;  // (-margin, index) ascending
  for (std::size_t i = 0; i < n; ++i) {
    double m = 0.0;
    for (std::size_t c = 0; c < s[i].x.size(); ++c) m += h.weights()[c] * s[i].x[c];
    by_margin.emplace_back(-std::abs(m), i);
  }
  std::sort(by_margin.begin(), by_margin.end());

  const std::size_t stride = n / p >= 1 ? n / p : 1;
  std::vector<std::size_t> candidates;
  for (std::size_t j = 1; j <= p; ++j) {
    std::size_t rank = j * stride;
    if (rank > n) rank = n;
    bool seen = false;
    for (std::size_t existing : candidates) seen = seen || existing == rank;
    if (!seen) candidates.push_back(rank);
  }

  BruteForceThreshold best;
  double best_error = 0.0;
  for (std::size_t rank : candidates) {
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < rank; ++i) {
      const auto& ex = s[by_margin[i].second];
      double m = 0.0;
      for (std::size_t c = 0; c < ex.x.size(); ++c) m += h.weights()[c] * ex.x[c];
      const int predicted = m < 0.0 ? -1 : +1;
      if (predicted != ex.y.value()) ++wrong;
    }
    const double error = static_cast<double>(wrong) / static_cast<double>(rank);
    if (best.rank == 0 || error < best_error) {
      best.rank = rank;
      best.gamma = -by_margin[rank - 1].first;
      best_error = error;
    }
  }
  return best;
}

}  // namespace sthalf::testing
