// Benchmark protocol: repeated seeded trials, supervised-vs-self-trained
// accuracy aggregation, and a rank-sum significance test.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sthalf/core.hpp"
#include "sthalf/noise.hpp"
#include "sthalf/optim.hpp"
#include "sthalf/random.hpp"
#include "sthalf/selftrain.hpp"

namespace sthalf {

struct TrialSpec {
  std::size_t labeled_count = 10;  // l: labeled examples drawn per trial
  std::size_t trials = 20;
  double train_fraction = 0.7;
  std::uint64_t base_seed = 0;
  SelfTrainConfig selftrain;
};

struct MethodResult {
  std::string method;  // "LTF" or "L_m"
  std::vector<double> per_trial_accuracy;
  double mean = 0.0;
  double std_dev = 0.0;  // population standard deviation (divide by n)
};

struct RankSumResult {
  double u_statistic = 0.0;
  double z_score = 0.0;
  bool significant_at_0_01 = false;  // |z| > 2.576, two-sided
};

template <typename Predictor>
double accuracy(Predictor&& predict, const SampleSet& test) {
  if (test.empty()) throw std::invalid_argument("accuracy needs a nonempty test set");
  std::size_t correct = 0;
  for (const auto& ex : test) {
    if (predict(ex.x) == ex.y) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

// Rank-sum test via the normal approximation with tie-corrected variance.
// Pooled values get average ranks over tie runs; U is reported for sample a,
// and z > 0 means a's values rank higher. Swapping the samples negates z.
inline RankSumResult wilcoxon_rank_sum(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() < 5 || b.size() < 5) {
    throw std::invalid_argument("rank-sum test needs at least 5 values per sample");
  }

  struct Entry {
    double value;
    bool from_a;
  };
  std::vector<Entry> pooled;
  pooled.reserve(a.size() + b.size());
  for (double v : a) pooled.push_back({v, true});
  for (double v : b) pooled.push_back({v, false});
  std::stable_sort(pooled.begin(), pooled.end(),
                   [](const Entry& lhs, const Entry& rhs) { return lhs.value < rhs.value; });

  const double count_a = static_cast<double>(a.size());
  const double count_b = static_cast<double>(b.size());
  const double total = count_a + count_b;

  double rank_sum_a = 0.0;
  double tie_term = 0.0;  // sum of t^3 - t over tie groups
  std::size_t i = 0;
  while (i < pooled.size()) {
    std::size_t j = i;
    while (j < pooled.size() && pooled[j].value == pooled[i].value) ++j;
    const double ties = static_cast<double>(j - i);
    const double average_rank = static_cast<double>(i + j + 1) / 2.0;  // ranks are 1-based
    for (std::size_t k = i; k < j; ++k) {
      if (pooled[k].from_a) rank_sum_a += average_rank;
    }
    tie_term += ties * ties * ties - ties;
    i = j;
  }

  const double u_a = rank_sum_a - count_a * (count_a + 1.0) / 2.0;
  const double mean_u = count_a * count_b / 2.0;
  const double variance =
      count_a * count_b / 12.0 * ((total + 1.0) - tie_term / (total * (total - 1.0)));

  RankSumResult result;
  result.u_statistic = u_a;
  result.z_score = variance > 0.0 ? (u_a - mean_u) / std::sqrt(variance) : 0.0;
  result.significant_at_0_01 = std::abs(result.z_score) > 2.576;
  return result;
}

struct TrialOutcome {
  double ltf_accuracy = 0.0;  // supervised halfspace, labeled points only
  double lm_accuracy = 0.0;   // self-trained cascade
};

// One seeded trial: shuffle, split train/test by train_fraction, draw the
// labeled subset, train both methods, score on the held-out split. All
// randomness flows from mix_seed(base_seed, trial_index), sub-streams
// 0 = shuffle, 1 = labeled subset, 2 = supervised fit, 3 = self-training.
inline TrialOutcome run_trial(const SampleSet& full, const TrialSpec& spec,
                              std::size_t trial_index) {
  if (!(spec.train_fraction > 0.0) || !(spec.train_fraction < 1.0)) {
    throw std::invalid_argument("train fraction must lie in (0, 1)");
  }
  const std::size_t train_size =
      static_cast<std::size_t>(std::floor(static_cast<double>(full.size()) * spec.train_fraction));
  if (train_size < spec.labeled_count || train_size >= full.size()) {
    throw std::invalid_argument("insufficient data: train split of " + std::to_string(train_size) +
                                " cannot serve " + std::to_string(spec.labeled_count) +
                                " labeled examples plus a nonempty test set");
  }

  const std::uint64_t trial_seed = mix_seed(spec.base_seed, trial_index);

  std::vector<std::size_t> order(full.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 gen(mix_seed(trial_seed, 0));
  seeded_shuffle(order, gen);

  SampleSet train;
  SampleSet test;
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < train_size ? train : test).add(full[order[i]]);
  }

  const SemisupSplit split = make_semisup_split(train, spec.labeled_count, mix_seed(trial_seed, 1));

  SgdConfig supervised_cfg = spec.selftrain.sgd;
  supervised_cfg.seed = mix_seed(trial_seed, 2);
  const Halfspace supervised = projected_sgd(split.labeled, supervised_cfg).halfspace;

  SelfTrainConfig selftrain_cfg = spec.selftrain;
  selftrain_cfg.seed = mix_seed(trial_seed, 3);
  const HalfspaceList cascade = self_train(split.labeled, split.unlabeled, selftrain_cfg).list;

  TrialOutcome outcome;
  outcome.ltf_accuracy = accuracy([&](const FeatureVector& x) { return sign_predict(supervised, x); }, test);
  outcome.lm_accuracy = accuracy([&](const FeatureVector& x) { return list_predict(cascade, x); }, test);
  return outcome;
}

struct BenchmarkResult {
  MethodResult ltf;
  MethodResult lm;
  // Compares lm (sample a) against ltf (sample b); z > 0 favors the
  // self-trained cascade. Absent when trials < 5 (too few for the normal
  // approximation).
  std::optional<RankSumResult> rank_sum;
};

inline MethodResult summarize_method(std::string method, std::vector<double> per_trial) {
  MethodResult result;
  result.method = std::move(method);
  result.mean = std::accumulate(per_trial.begin(), per_trial.end(), 0.0) /
                static_cast<double>(per_trial.size());
  double squares = 0.0;
  for (double v : per_trial) squares += (v - result.mean) * (v - result.mean);
  result.std_dev = std::sqrt(squares / static_cast<double>(per_trial.size()));
  result.per_trial_accuracy = std::move(per_trial);
  return result;
}

// Runs trials 0..trials-1 and aggregates. Each trial is seeded purely by its
// index, so results do not depend on execution order and adding trials never
// perturbs earlier ones.
// TODO: trials are independent; run them on a thread pool and gather by index
// once benchmarks move past desk-scale datasets.
inline BenchmarkResult run_benchmark(const SampleSet& full, const TrialSpec& spec) {
  if (spec.trials == 0) throw std::invalid_argument("benchmark needs trials >= 1");

  std::vector<double> ltf_accuracies;
  std::vector<double> lm_accuracies;
  ltf_accuracies.reserve(spec.trials);
  lm_accuracies.reserve(spec.trials);
  for (std::size_t trial = 0; trial < spec.trials; ++trial) {
    const TrialOutcome outcome = run_trial(full, spec, trial);
    ltf_accuracies.push_back(outcome.ltf_accuracy);
    lm_accuracies.push_back(outcome.lm_accuracy);
  }

  BenchmarkResult result;
  result.ltf = summarize_method("LTF", std::move(ltf_accuracies));
  result.lm = summarize_method("L_m", std::move(lm_accuracies));
  if (spec.trials >= 5) {
    result.rank_sum = wilcoxon_rank_sum(result.lm.per_trial_accuracy, result.ltf.per_trial_accuracy);
  }
  return result;
}

}  // namespace sthalf
