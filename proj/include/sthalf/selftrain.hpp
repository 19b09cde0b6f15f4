// Self-training loop over halfspaces: margin-window threshold selection,
// exploration (pseudo-labeling of high-margin unlabeled points), and pruning
// rounds that assemble the output cascade.
#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sthalf/core.hpp"
#include "sthalf/optim.hpp"
#include "sthalf/random.hpp"

namespace sthalf {

struct SelfTrainConfig {
  std::size_t threshold_tests = 5;  // p: number of candidate ranks per round
  // Template for the per-round fit. Its seed is ignored: round k runs with
  // seed mix_seed(seed, k), so rounds stay independent and reproducible.
  SgdConfig sgd;
  std::uint64_t seed = 0;
};

struct RoundRecord {
  std::size_t round = 0;
  std::size_t labeled_size = 0;    // |S| entering the round
  std::size_t unlabeled_size = 0;  // |X_u| entering the round
  double gamma = 0.0;
  std::size_t pseudo_labeled = 0;
  std::size_t pruned = 0;
  bool appended = false;
  // Set when an append round pruned nothing and the loop stopped early.
  bool forced_stop = false;
};

struct TrainTrace {
  std::vector<RoundRecord> rounds;
  std::size_t total_rounds = 0;
  // Residual |S| after the loop; the mass the cascade gives no guarantee for.
  std::size_t final_labeled_size = 0;
};

struct ThresholdChoice {
  double gamma = 0.0;
  std::size_t rank = 1;  // 1-based position in the descending-margin order
};

// Picks the margin threshold for halfspace h over s. The samples are sorted
// by unsigned margin, largest first (stable: ties keep insertion order), and
// candidate ranks omega, 2*omega, ..., p*omega with omega = max(1, |s|/p)
// (clipped to |s|, duplicates dropped) are tested. The chosen rank minimizes
// the misclassification rate over the top-ranked samples, smallest rank
// winning ties; gamma is the margin of the sample at that rank.
inline ThresholdChoice select_threshold(const SampleSet& s, const Halfspace& h, std::size_t p) {
  if (s.empty()) throw std::invalid_argument("select_threshold needs a nonempty sample set");
  if (p == 0) throw std::invalid_argument("select_threshold needs p >= 1");

  const std::size_t n = s.size();
  std::vector<double> margins(n);
  std::vector<bool> wrong(n);
  for (std::size_t i = 0; i < n; ++i) {
    margins[i] = unsigned_margin(h.weights(), s[i].x);
    wrong[i] = !(sign_predict(h, s[i].x) == s[i].y);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return margins[a] > margins[b]; });

  const std::size_t stride = std::max<std::size_t>(1, n / p);
  std::vector<std::size_t> ranks;
  for (std::size_t j = 1; j <= p; ++j) {
    const std::size_t rank = std::min(j * stride, n);
    if (ranks.empty() || ranks.back() != rank) ranks.push_back(rank);
  }

  std::size_t best_rank = 0;
  double best_error = 0.0;
  std::size_t mistakes = 0;
  std::size_t covered = 0;
  for (const std::size_t rank : ranks) {
    for (; covered < rank; ++covered) mistakes += wrong[order[covered]] ? 1 : 0;
    const double error = static_cast<double>(mistakes) / static_cast<double>(rank);
    if (best_rank == 0 || error < best_error) {
      best_rank = rank;
      best_error = error;
    }
  }
  return ThresholdChoice{margins[order[best_rank - 1]], best_rank};
}

struct PseudoLabelResult {
  SampleSet labeled;
  UnlabeledSet remaining;
};

// Assigns sign(<w,x>) to every point whose unsigned margin clears the
// threshold; the rest stay unlabeled. Order is preserved within each part.
inline PseudoLabelResult pseudo_label(const UnlabeledSet& u, const ThresholdedHalfspace& th) {
  PseudoLabelResult out;
  for (const auto& x : u) {
    check_same_dimension(th.halfspace().dimension(), x.size());
    if (unsigned_margin(th.halfspace().weights(), x) >= th.gamma()) {
      out.labeled.add(x, sign_predict(th.halfspace(), x));
    } else {
      out.remaining.add(x);
    }
  }
  return out;
}

// Keeps exactly the members with unsigned margin strictly below gamma.
inline SampleSet prune(const SampleSet& s, const ThresholdedHalfspace& th) {
  SampleSet kept;
  for (const auto& ex : s) {
    check_same_dimension(th.halfspace().dimension(), ex.x.size());
    if (unsigned_margin(th.halfspace().weights(), ex.x) < th.gamma()) {
      kept.add(ex);
    }
  }
  return kept;
}

struct SelfTrainResult {
  HalfspaceList list;
  TrainTrace trace;
};

// The full loop. While |S| >= l (the initial labeled count): fit a halfspace
// on S, choose its threshold, then either pseudo-label the qualifying
// unlabeled points (exploration) or, when none qualify, append the pair to
// the output list and prune S (pruning). Each exploration round shrinks the
// unlabeled pool and each pruning round shrinks S, so the loop halts; a
// pruning round that removes nothing stops it outright.
inline SelfTrainResult self_train(const SampleSet& labeled, const UnlabeledSet& unlabeled,
                                  const SelfTrainConfig& cfg) {
  if (labeled.empty()) throw std::invalid_argument("self_train needs a nonempty labeled set");
  if (!unlabeled.empty()) check_same_dimension(labeled.dimension(), unlabeled.dimension());
  if (cfg.threshold_tests == 0) throw std::invalid_argument("self_train needs p >= 1");

  const std::size_t initial_labeled = labeled.size();
  SampleSet active = labeled;
  UnlabeledSet pool = unlabeled;
  std::vector<ThresholdedHalfspace> list;
  TrainTrace trace;

  std::size_t round = 0;
  bool stop = false;
  while (!stop && active.size() >= initial_labeled) {
    RoundRecord record;
    record.round = round;
    record.labeled_size = active.size();
    record.unlabeled_size = pool.size();

    SgdConfig sgd = cfg.sgd;
    sgd.seed = mix_seed(cfg.seed, round);
    Halfspace fitted = projected_sgd(active, sgd).halfspace;

    const ThresholdChoice choice = select_threshold(active, fitted, cfg.threshold_tests);
    record.gamma = choice.gamma;
    ThresholdedHalfspace pair(std::move(fitted), choice.gamma);

    PseudoLabelResult split = pseudo_label(pool, pair);
    if (!split.labeled.empty()) {
      record.pseudo_labeled = split.labeled.size();
      for (const auto& ex : split.labeled) active.add(ex);
      pool = std::move(split.remaining);
    } else {
      record.appended = true;
      SampleSet kept = prune(active, pair);
      record.pruned = active.size() - kept.size();
      active = std::move(kept);
      list.push_back(std::move(pair));
      if (record.pruned == 0) {
        record.forced_stop = true;
        stop = true;
      }
    }

    trace.rounds.push_back(record);
    ++round;
  }

  trace.total_rounds = round;
  trace.final_labeled_size = active.size();
  return SelfTrainResult{HalfspaceList(std::move(list)), std::move(trace)};
}

}  // namespace sthalf
