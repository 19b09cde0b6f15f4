// Vector arithmetic, hypothesis representations, losses, and the
// list-classifier prediction rule.
#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sthalf {

using FeatureVector = std::vector<double>;

// Slack on the ||w||_2 <= 1 constraint; absorbs projection round-off.
inline constexpr double kNormSlack = 1e-9;

inline void check_same_dimension(std::size_t lhs, std::size_t rhs) {
  if (lhs != rhs) {
    throw std::invalid_argument("dimension mismatch: " + std::to_string(lhs) +
                                " vs " + std::to_string(rhs));
  }
}

inline void check_finite(const FeatureVector& v) {
  for (double c : v) {
    if (!std::isfinite(c)) {
      throw std::invalid_argument("feature vector has a non-finite coordinate");
    }
  }
}

inline double dot(const FeatureVector& w, const FeatureVector& x) {
  check_same_dimension(w.size(), x.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) sum += w[i] * x[i];
  return sum;
}

inline double squared_norm(const FeatureVector& v) {
  double sum = 0.0;
  for (double c : v) sum += c * c;
  return sum;
}

inline double l2_norm(const FeatureVector& v) { return std::sqrt(squared_norm(v)); }

inline double unsigned_margin(const FeatureVector& w, const FeatureVector& x) {
  return std::abs(dot(w, x));
}

// Binary label, value in {-1, +1}.
class Label {
 public:
  constexpr Label() = default;

  static Label from_int(int value) {
    if (value != -1 && value != 1) {
      throw std::invalid_argument("label must be -1 or +1, got " + std::to_string(value));
    }
    return Label(value);
  }
  static constexpr Label plus() { return Label(+1); }
  static constexpr Label minus() { return Label(-1); }

  constexpr int value() const { return value_; }
  friend constexpr bool operator==(Label, Label) = default;

 private:
  constexpr explicit Label(int value) : value_(value) {}
  int value_ = +1;
};

// sign(v) with the sign(0) = +1 convention.
inline Label sign_label(double v) { return v < 0.0 ? Label::minus() : Label::plus(); }

struct LabeledExample {
  FeatureVector x;
  Label y;
};

// Ordered collection of labeled examples; all members share one dimension.
class SampleSet {
 public:
  SampleSet() = default;
  explicit SampleSet(std::vector<LabeledExample> items) {
    for (auto& ex : items) add(std::move(ex));
  }

  void add(LabeledExample ex) {
    check_finite(ex.x);
    if (!items_.empty()) check_same_dimension(items_.front().x.size(), ex.x.size());
    items_.push_back(std::move(ex));
  }
  void add(FeatureVector x, Label y) { add(LabeledExample{std::move(x), y}); }

  const std::vector<LabeledExample>& items() const { return items_; }
  const LabeledExample& operator[](std::size_t i) const { return items_[i]; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  std::size_t dimension() const { return items_.empty() ? 0 : items_.front().x.size(); }

  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }

 private:
  std::vector<LabeledExample> items_;
};

// Ordered collection of unlabeled points; all members share one dimension.
class UnlabeledSet {
 public:
  UnlabeledSet() = default;
  explicit UnlabeledSet(std::vector<FeatureVector> items) {
    for (auto& x : items) add(std::move(x));
  }

  void add(FeatureVector x) {
    check_finite(x);
    if (!items_.empty()) check_same_dimension(items_.front().size(), x.size());
    items_.push_back(std::move(x));
  }

  const std::vector<FeatureVector>& items() const { return items_; }
  const FeatureVector& operator[](std::size_t i) const { return items_[i]; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  std::size_t dimension() const { return items_.empty() ? 0 : items_.front().size(); }

  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }

 private:
  std::vector<FeatureVector> items_;
};

// Centered halfspace h_w(x) = sign(<w,x>), constrained to the unit ball.
class Halfspace {
 public:
  Halfspace() = default;
  explicit Halfspace(FeatureVector weights) : weights_(std::move(weights)) {
    const double norm = l2_norm(weights_);
    if (!(norm <= 1.0 + kNormSlack)) {
      throw std::invalid_argument("halfspace weights must satisfy ||w||_2 <= 1, got norm " +
                                  std::to_string(norm));
    }
  }

  const FeatureVector& weights() const { return weights_; }
  std::size_t dimension() const { return weights_.size(); }

 private:
  FeatureVector weights_;
};

inline Label sign_predict(const Halfspace& h, const FeatureVector& x) {
  return sign_label(dot(h.weights(), x));
}

// A halfspace trusted only where |<w,x>| >= gamma.
class ThresholdedHalfspace {
 public:
  ThresholdedHalfspace(Halfspace halfspace, double gamma)
      : halfspace_(std::move(halfspace)), gamma_(gamma) {
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
      throw std::invalid_argument("margin threshold must be finite and >= 0");
    }
  }

  const Halfspace& halfspace() const { return halfspace_; }
  double gamma() const { return gamma_; }

 private:
  Halfspace halfspace_;
  double gamma_;
};

// Ordered list of thresholded halfspaces; the fallback predictor is the
// first listed halfspace by construction.
class HalfspaceList {
 public:
  explicit HalfspaceList(std::vector<ThresholdedHalfspace> pairs) : pairs_(std::move(pairs)) {
    if (pairs_.empty()) {
      throw std::invalid_argument("halfspace list requires at least one pair");
    }
    for (const auto& pair : pairs_) {
      check_same_dimension(pairs_.front().halfspace().dimension(), pair.halfspace().dimension());
    }
  }

  const std::vector<ThresholdedHalfspace>& pairs() const { return pairs_; }
  const Halfspace& fallback() const { return pairs_.front().halfspace(); }
  std::size_t size() const { return pairs_.size(); }
  std::size_t dimension() const { return pairs_.front().halfspace().dimension(); }

 private:
  std::vector<ThresholdedHalfspace> pairs_;
};

// Perceptron loss: -y<w,x> when y<w,x> <= 0, else 0. Always >= 0.
inline double perceptron_loss(Label y, const FeatureVector& w, const FeatureVector& x) {
  const double agreement = y.value() * dot(w, x);
  return agreement <= 0.0 ? -agreement : 0.0;
}

inline double zero_one_error(const Halfspace& h, const SampleSet& s) {
  if (s.empty()) throw std::invalid_argument("zero_one_error needs a nonempty sample set");
  std::size_t wrong = 0;
  for (const auto& ex : s) {
    if (!(sign_predict(h, ex.x) == ex.y)) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(s.size());
}

struct ListPrediction {
  Label label;
  // 1-based index of the pair whose threshold the point cleared; 0 = fallback.
  std::size_t fired_position;
};

// Scan pairs in list order; the first pair whose threshold the point clears
// predicts. If none qualifies, the fallback (first listed) halfspace does.
inline ListPrediction list_predict_detail(const HalfspaceList& list, const FeatureVector& x) {
  const auto& pairs = list.pairs();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& pair = pairs[i];
    if (unsigned_margin(pair.halfspace().weights(), x) >= pair.gamma()) {
      return {sign_predict(pair.halfspace(), x), i + 1};
    }
  }
  return {sign_predict(list.fallback(), x), 0};
}

inline Label list_predict(const HalfspaceList& list, const FeatureVector& x) {
  return list_predict_detail(list, x).label;
}

}  // namespace sthalf
