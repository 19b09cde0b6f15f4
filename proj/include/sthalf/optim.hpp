// Projected stochastic subgradient descent for the empirical perceptron risk
// over the unit ball. Step size 1/(M sqrt(t)), output the averaged iterate.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>

#include "sthalf/core.hpp"
#include "sthalf/random.hpp"

namespace sthalf {

struct SgdConfig {
  // Steps T. Unset = 100 * |sample| capped at 200000.
  std::optional<std::size_t> steps;
  // Subgradient norm bound M. Unset = max ||x||_2 over the sample (1 if that
  // max is 0); ||subgradient||_2 <= ||x||_2 always holds for this loss.
  std::optional<double> gradient_bound;
  std::uint64_t seed = 0;
  // Target accuracy the step schedule is sized for; informational only
  // (T = Omega(log(1/delta)/epsilon^2)).
  double epsilon = 0.1;
};

struct SgdResult {
  Halfspace halfspace;  // averaged iterate
  double final_empirical_risk = 0.0;
  std::size_t steps_run = 0;
};

// Subgradient of the perceptron loss at w: -y*x when y<w,x> <= 0, else 0.
inline FeatureVector subgradient(const FeatureVector& w, const LabeledExample& ex) {
  check_same_dimension(w.size(), ex.x.size());
  FeatureVector g(w.size(), 0.0);
  if (ex.y.value() * dot(w, ex.x) <= 0.0) {
    for (std::size_t i = 0; i < w.size(); ++i) g[i] = -ex.y.value() * ex.x[i];
  }
  return g;
}

// Euclidean projection onto the unit ball: v if ||v||_2 <= 1, else v/||v||_2.
inline FeatureVector project_unit_ball(FeatureVector v) {
  check_finite(v);
  const double norm = l2_norm(v);
  if (norm > 1.0) {
    for (double& c : v) c /= norm;
  }
  return v;
}

// Mean perceptron loss over s.
inline double empirical_risk(const SampleSet& s, const FeatureVector& w) {
  if (s.empty()) throw std::invalid_argument("empirical_risk needs a nonempty sample set");
  double sum = 0.0;
  for (const auto& ex : s) sum += perceptron_loss(ex.y, w, ex.x);
  return sum / static_cast<double>(s.size());
}

inline double max_input_norm(const SampleSet& s) {
  double max_norm = 0.0;
  for (const auto& ex : s) max_norm = std::max(max_norm, l2_norm(ex.x));
  return max_norm;
}

// Core iteration, with a hook observing every post-projection iterate.
// Starts from w = 0; draws one example uniformly at random per step; the
// returned halfspace is the average of iterates t = 1..T.
template <typename Observer>
SgdResult projected_sgd_observed(const SampleSet& s, const SgdConfig& cfg, Observer&& observe) {
  if (s.empty()) throw std::invalid_argument("projected_sgd needs a nonempty sample set");
  if (cfg.steps && *cfg.steps == 0) throw std::invalid_argument("projected_sgd needs steps >= 1");
  if (cfg.gradient_bound && !(*cfg.gradient_bound > 0.0)) {
    throw std::invalid_argument("gradient bound must be > 0");
  }

  const std::size_t n = s.size();
  const std::size_t dim = s.dimension();
  const std::size_t steps = cfg.steps ? *cfg.steps : std::min<std::size_t>(100 * n, 200000);
  double bound = cfg.gradient_bound ? *cfg.gradient_bound : max_input_norm(s);
  if (bound == 0.0) bound = 1.0;

  std::mt19937_64 gen(cfg.seed);
  FeatureVector w(dim, 0.0);
  FeatureVector sum(dim, 0.0);

  for (std::size_t t = 1; t <= steps; ++t) {
    const auto& ex = s[uniform_index(gen, n)];
    if (ex.y.value() * dot(w, ex.x) <= 0.0) {
      const double step = 1.0 / (bound * std::sqrt(static_cast<double>(t)));
      for (std::size_t i = 0; i < dim; ++i) w[i] += step * ex.y.value() * ex.x[i];
      const double norm = l2_norm(w);
      if (norm > 1.0) {
        for (double& c : w) c /= norm;
      }
    }
    // A zero subgradient leaves w unchanged, which is already in the ball.
    observe(static_cast<const FeatureVector&>(w));
    for (std::size_t i = 0; i < dim; ++i) sum[i] += w[i];
  }

  for (double& c : sum) c /= static_cast<double>(steps);
  FeatureVector averaged = project_unit_ball(std::move(sum));
  const double risk = empirical_risk(s, averaged);
  return SgdResult{Halfspace(std::move(averaged)), risk, steps};
}

inline SgdResult projected_sgd(const SampleSet& s, const SgdConfig& cfg) {
  return projected_sgd_observed(s, cfg, [](const FeatureVector&) {});
}

}  // namespace sthalf
