// Label-corruption oracle (flip probability below 1/2, possibly
// margin-dependent) and synthetic input generation for controlled runs.
#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sthalf/core.hpp"
#include "sthalf/random.hpp"

namespace sthalf {

// Planted concept f(x) = sign(<w*, x>) with a unit-norm normal vector.
class TargetConcept {
 public:
  explicit TargetConcept(FeatureVector normal) : normal_(std::move(normal)) {
    check_finite(normal_);
    const double norm = l2_norm(normal_);
    if (std::abs(norm - 1.0) > 1e-9) {
      throw std::invalid_argument("target concept normal must have unit norm, got " +
                                  std::to_string(norm));
    }
  }

  // Normalizes an arbitrary nonzero direction.
  static TargetConcept from_direction(FeatureVector direction) {
    check_finite(direction);
    const double norm = l2_norm(direction);
    if (norm == 0.0) throw std::invalid_argument("target concept direction must be nonzero");
    for (double& c : direction) c /= norm;
    return TargetConcept(std::move(direction));
  }

  const FeatureVector& normal() const { return normal_; }
  Label classify(const FeatureVector& x) const { return sign_label(dot(normal_, x)); }

 private:
  FeatureVector normal_;
};

enum class NoiseKind { constant, margin_decay };

// Flip-probability profile eta(x). Either a constant rate, or a rate that
// decays exponentially with the distance to the planted boundary:
// eta(x) = eta_max * exp(-c * |<w*, x>|).
class NoiseSpec {
 public:
  static NoiseSpec constant(double eta_max) { return NoiseSpec(NoiseKind::constant, eta_max, 0.0); }
  static NoiseSpec margin_decay(double eta_max, double decay) {
    if (!(decay >= 0.0)) throw std::invalid_argument("margin decay rate must be >= 0");
    return NoiseSpec(NoiseKind::margin_decay, eta_max, decay);
  }

  NoiseKind kind() const { return kind_; }
  double eta_max() const { return eta_max_; }
  double decay() const { return decay_; }

  double flip_probability(const TargetConcept& f, const FeatureVector& x) const {
    if (kind_ == NoiseKind::constant) return eta_max_;
    return eta_max_ * std::exp(-decay_ * unsigned_margin(f.normal(), x));
  }

 private:
  NoiseSpec(NoiseKind kind, double eta_max, double decay)
      : kind_(kind), eta_max_(eta_max), decay_(decay) {
    if (!(eta_max >= 0.0) || !(eta_max < 0.5)) {
      throw std::invalid_argument("flip rate must lie in [0, 0.5)");
    }
  }

  NoiseKind kind_;
  double eta_max_;
  double decay_;
};

enum class InputDistribution { uniform_ball, gaussian_clipped };

struct SyntheticSpec {
  std::size_t dimension = 0;
  std::size_t count = 0;
  double radius = 1.0;
  InputDistribution distribution = InputDistribution::uniform_ball;
  std::uint64_t seed = 0;
};

// Draws `count` points of dimension `dimension`, all with ||x||_2 <= radius.
// uniform_ball: uniform over the ball (gaussian direction, radius R*u^(1/d)).
// gaussian_clipped: standard normal coordinates, rescaled onto the radius-R
// sphere whenever the norm exceeds R, so the count stays exact.
inline UnlabeledSet sample_inputs(const SyntheticSpec& spec) {
  if (spec.count == 0) throw std::invalid_argument("sample_inputs needs count >= 1");
  if (spec.dimension == 0) throw std::invalid_argument("sample_inputs needs dimension >= 1");
  if (!(spec.radius > 0.0)) throw std::invalid_argument("sample_inputs needs radius > 0");

  std::mt19937_64 gen(spec.seed);
  UnlabeledSet out;
  for (std::size_t i = 0; i < spec.count; ++i) {
    FeatureVector x(spec.dimension);
    double norm = 0.0;
    do {
      for (double& c : x) c = standard_normal(gen);
      norm = l2_norm(x);
    } while (norm == 0.0);

    if (spec.distribution == InputDistribution::uniform_ball) {
      const double u = uniform_real01(gen);
      const double target = spec.radius * std::pow(u, 1.0 / static_cast<double>(spec.dimension));
      for (double& c : x) c *= target / norm;
    } else if (norm > spec.radius) {
      for (double& c : x) c *= spec.radius / norm;
    }
    out.add(std::move(x));
  }
  return out;
}

// Labels each point by the planted concept and flips it independently with
// probability eta(x). Output order matches input order; eta = 0 never flips.
inline SampleSet massart_corrupt(const TargetConcept& f, const UnlabeledSet& xs,
                                 const NoiseSpec& noise, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  SampleSet out;
  for (const auto& x : xs) {
    const Label clean = f.classify(x);
    const bool flip = uniform_real01(gen) < noise.flip_probability(f, x);
    out.add(x, flip ? (clean == Label::plus() ? Label::minus() : Label::plus()) : clean);
  }
  return out;
}

struct SemisupSplit {
  SampleSet labeled;
  UnlabeledSet unlabeled;
  // True labels of the unlabeled part, aligned index-for-index; evaluation
  // use only, never visible to training.
  SampleSet hidden_labels;
};

// Keeps the labels of a uniformly random subset of size `labeled_count` and
// strips the rest.
inline SemisupSplit make_semisup_split(const SampleSet& s, std::size_t labeled_count,
                                       std::uint64_t seed) {
  if (labeled_count == 0) throw std::invalid_argument("semisup split needs labeled_count >= 1");
  if (labeled_count > s.size()) {
    throw std::invalid_argument("semisup split: labeled_count " + std::to_string(labeled_count) +
                                " exceeds sample size " + std::to_string(s.size()));
  }

  std::vector<std::size_t> order(s.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 gen(seed);
  seeded_shuffle(order, gen);

  SemisupSplit split;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& ex = s[order[i]];
    if (i < labeled_count) {
      split.labeled.add(ex);
    } else {
      split.unlabeled.add(ex.x);
      split.hidden_labels.add(ex);
    }
  }
  return split;
}

}  // namespace sthalf
