#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "sthalf/eval.hpp"
#include "sthalf/noise.hpp"
#include "sthalf/selftrain.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace sthalf;
using Catch::Approx;

namespace {

// Points along the first axis so margins against w = (1, 0) are explicit.
SampleSet axis_points(const std::vector<std::pair<double, int>>& coords_and_labels) {
  SampleSet s;
  for (const auto& [c, y] : coords_and_labels) {
    s.add({c, 0.0}, Label::from_int(y));
  }
  return s;
}

}  // namespace

TEST_CASE("threshold selection: all-correct samples tie toward the largest margin", "[selftrain]") {
  const Halfspace h(FeatureVector{1, 0});
  const auto s = axis_points({{5, 1}, {4, 1}, {3, 1}, {2, 1}, {1, 1}});
  const auto choice = select_threshold(s, h, 5);
  CHECK(choice.rank == 1);
  CHECK(choice.gamma == 5.0);
}

TEST_CASE("threshold selection: a mistake at the top pushes the window out", "[selftrain]") {
  const Halfspace h(FeatureVector{1, 0});
  // Only the margin-5 sample is misclassified; top-i errors are 1, 1/2, ... 1/5.
  const auto s = axis_points({{5, -1}, {4, 1}, {3, 1}, {2, 1}, {1, 1}});
  const auto choice = select_threshold(s, h, 5);
  CHECK(choice.rank == 5);
  CHECK(choice.gamma == 1.0);
}

TEST_CASE("threshold selection: stride 2 window over ten samples", "[selftrain]") {
  const Halfspace h(FeatureVector{1, 0});
  std::mt19937_64 gen(17);
  for (int it = 0; it < 50; ++it) {
    SampleSet s;
    for (int i = 0; i < 10; ++i) {
      s.add({3.0 * uniform_real01(gen) - 1.5, uniform_real01(gen)}, testing::random_label(gen));
    }
    const auto choice = select_threshold(s, h, 5);
    const auto expected = testing::brute_force_select_threshold(s, h, 5);
    CHECK(choice.rank == expected.rank);
    CHECK(choice.gamma == expected.gamma);
    CHECK((choice.rank == 2 || choice.rank == 4 || choice.rank == 6 || choice.rank == 8 ||
           choice.rank == 10));
  }
}

TEST_CASE("threshold selection matches the brute-force oracle", "[selftrain]") {
  std::mt19937_64 gen(19);
  for (int it = 0; it < 600; ++it) {
    const std::size_t n = 1 + uniform_index(gen, 50);
    const std::size_t dim = 1 + uniform_index(gen, 4);
    const std::size_t p = 1 + uniform_index(gen, 7);
    // Quantized coordinates make margin ties common.
    const auto s = testing::random_sample_set(gen, n, dim, 1.0, true);
    const Halfspace h(testing::random_ball_point(gen, dim));

    const auto got = select_threshold(s, h, p);
    const auto expected = testing::brute_force_select_threshold(s, h, p);
    REQUIRE(got.rank == expected.rank);
    REQUIRE(got.gamma == expected.gamma);
  }
  CHECK_THROWS_AS(select_threshold(SampleSet{}, Halfspace(FeatureVector{1}), 5),
                  std::invalid_argument);
}

TEST_CASE("pseudo-labeling splits on the threshold and signs by the halfspace", "[selftrain]") {
  const ThresholdedHalfspace th(Halfspace(FeatureVector{1, 0}), 1.0);

  UnlabeledSet u;
  u.add({2, 0});
  u.add({0.1, 0});
  auto result = pseudo_label(u, th);
  REQUIRE(result.labeled.size() == 1);
  CHECK(result.labeled[0].x == FeatureVector{2, 0});
  CHECK(result.labeled[0].y == Label::plus());
  REQUIRE(result.remaining.size() == 1);
  CHECK(result.remaining[0] == FeatureVector{0.1, 0});

  result = pseudo_label(UnlabeledSet{}, th);
  CHECK(result.labeled.empty());
  CHECK(result.remaining.empty());

  UnlabeledSet negative;
  negative.add({-3, 0});
  result = pseudo_label(negative, th);
  REQUIRE(result.labeled.size() == 1);
  CHECK(result.labeled[0].y == Label::minus());
  CHECK(result.remaining.empty());

  UnlabeledSet wrong_dim;
  wrong_dim.add({1, 2, 3});
  CHECK_THROWS_AS(pseudo_label(wrong_dim, th), std::invalid_argument);
}

TEST_CASE("pruning keeps exactly the strict low-margin residue", "[selftrain]") {
  const auto s = axis_points({{5, 1}, {3, 1}, {1, 1}});
  const Halfspace h(FeatureVector{1, 0});

  auto kept = prune(s, ThresholdedHalfspace(h, 3.0));
  REQUIRE(kept.size() == 1);  // the boundary member (margin 3) is removed
  CHECK(kept[0].x == FeatureVector{1, 0});

  // Every margin is strictly below 10, so nothing is removed.
  CHECK(prune(s, ThresholdedHalfspace(h, 10.0)).size() == 3);
  // Nothing is strictly below 0, so everything is removed.
  CHECK(prune(s, ThresholdedHalfspace(h, 0.0)).empty());
}

TEST_CASE("self-training without a pool is a single supervised pruning round", "[selftrain]") {
  std::mt19937_64 gen(29);
  const auto planted = TargetConcept::from_direction(testing::random_vector(gen, 3, 1.0));
  SampleSet labeled;
  while (labeled.size() < 20) {
    auto x = testing::random_ball_point(gen, 3);
    const Label y = planted.classify(x);
    labeled.add(std::move(x), y);
  }

  SelfTrainConfig cfg;
  cfg.sgd.steps = 2000;
  cfg.seed = 5;
  const auto result = self_train(labeled, UnlabeledSet{}, cfg);

  // S never grows, so the first prune drops |S| below l and ends the loop.
  REQUIRE(result.trace.rounds.size() == 1);
  const auto& round = result.trace.rounds[0];
  CHECK(round.appended);
  CHECK(round.pseudo_labeled == 0);
  CHECK(round.pruned >= 1);
  CHECK(result.list.size() == 1);
  CHECK(result.trace.final_labeled_size < labeled.size());
}

TEST_CASE("rounds either pseudo-label or append, never both", "[selftrain]") {
  std::mt19937_64 gen(31);
  for (int it = 0; it < 25; ++it) {
    const std::size_t dim = 1 + uniform_index(gen, 3);
    const auto labeled = testing::random_sample_set(gen, 5 + uniform_index(gen, 10), dim, 1.0);
    UnlabeledSet pool;
    const std::size_t pool_size = uniform_index(gen, 60);
    for (std::size_t i = 0; i < pool_size; ++i) pool.add(testing::random_vector(gen, dim, 1.0));

    SelfTrainConfig cfg;
    cfg.sgd.steps = 200;
    cfg.seed = gen();
    const auto result = self_train(labeled, pool, cfg);
    for (const auto& round : result.trace.rounds) {
      const bool explored = round.pseudo_labeled > 0;
      const bool appended = round.appended;
      CHECK(explored != appended);
    }
  }
}

TEST_CASE("termination and conservation on adversarial inputs", "[selftrain]") {
  std::mt19937_64 gen(37);
  for (int it = 0; it < 60; ++it) {
    const std::size_t dim = 1 + uniform_index(gen, 3);
    SampleSet labeled;
    UnlabeledSet pool;
    const int flavor = static_cast<int>(uniform_index(gen, 4));
    const std::size_t ell = 2 + uniform_index(gen, 8);
    if (flavor == 0) {
      // All points identical: every margin ties.
      const auto x = testing::random_vector(gen, dim, 1.0);
      for (std::size_t i = 0; i < ell; ++i) labeled.add(x, testing::random_label(gen));
      for (std::size_t i = 0; i < 20; ++i) pool.add(x);
    } else if (flavor == 1) {
      // All-zero points: gamma = 0 everywhere.
      for (std::size_t i = 0; i < ell; ++i) labeled.add(FeatureVector(dim, 0.0), testing::random_label(gen));
      for (std::size_t i = 0; i < 10; ++i) pool.add(FeatureVector(dim, 0.0));
    } else if (flavor == 2) {
      // Empty pool.
      labeled = testing::random_sample_set(gen, ell, dim, 1.0);
    } else {
      labeled = testing::random_sample_set(gen, ell, dim, 1.0, true);
      const std::size_t pool_size = uniform_index(gen, 80);
      for (std::size_t i = 0; i < pool_size; ++i) pool.add(testing::random_vector(gen, dim, 1.0, true));
    }

    SelfTrainConfig cfg;
    cfg.sgd.steps = 100;
    cfg.seed = gen();
    const auto result = self_train(labeled, pool, cfg);  // halting = this returns

    const std::size_t total = labeled.size() + pool.size();
    std::size_t pruned_before = 0;
    std::size_t previous_pool = pool.size();
    for (const auto& round : result.trace.rounds) {
      CHECK(round.labeled_size >= labeled.size());  // loop condition held on entry
      CHECK(round.labeled_size + round.unlabeled_size + pruned_before == total);
      CHECK(round.unlabeled_size <= previous_pool);  // points never return to the pool
      previous_pool = round.unlabeled_size;
      pruned_before += round.pruned;
    }
    const std::size_t final_pool = previous_pool - result.trace.rounds.back().pseudo_labeled;
    CHECK(result.trace.final_labeled_size + final_pool + pruned_before == total);
    CHECK(result.list.size() >= 1);
  }
}

TEST_CASE("the loop is a composition of the exported steps", "[selftrain]") {
  // Replays every round with the library primitives and the published
  // per-round seed rule; the trace must match and appended rounds must have
  // had no qualifying unlabeled point.
  std::mt19937_64 gen(41);
  const auto labeled = testing::random_sample_set(gen, 8, 2, 1.0);
  UnlabeledSet pool;
  for (int i = 0; i < 40; ++i) pool.add(testing::random_vector(gen, 2, 1.0));

  SelfTrainConfig cfg;
  cfg.sgd.steps = 300;
  cfg.seed = 1234;
  const auto result = self_train(labeled, pool, cfg);

  SampleSet active = labeled;
  UnlabeledSet remaining = pool;
  std::vector<ThresholdedHalfspace> expected_list;
  for (const auto& round : result.trace.rounds) {
    REQUIRE(active.size() == round.labeled_size);
    REQUIRE(remaining.size() == round.unlabeled_size);

    SgdConfig sgd = cfg.sgd;
    sgd.seed = mix_seed(cfg.seed, round.round);
    const Halfspace fitted = projected_sgd(active, sgd).halfspace;
    const auto choice = select_threshold(active, fitted, cfg.threshold_tests);
    REQUIRE(choice.gamma == round.gamma);

    const ThresholdedHalfspace pair(fitted, choice.gamma);
    const auto split = pseudo_label(remaining, pair);
    if (round.appended) {
      CHECK(split.labeled.empty());  // append fires only with no qualifying point
      expected_list.push_back(pair);
      active = prune(active, pair);
    } else {
      CHECK(split.labeled.size() == round.pseudo_labeled);
      for (const auto& ex : split.labeled) active.add(ex);
      remaining = split.remaining;
    }
  }
  REQUIRE(expected_list.size() == result.list.size());
  for (std::size_t i = 0; i < expected_list.size(); ++i) {
    CHECK(expected_list[i].halfspace().weights() == result.list.pairs()[i].halfspace().weights());
    CHECK(expected_list[i].gamma() == result.list.pairs()[i].gamma());
  }
  CHECK(result.list.fallback().weights() == result.list.pairs()[0].halfspace().weights());
}

TEST_CASE("identical inputs and seeds reproduce the run exactly", "[selftrain]") {
  std::mt19937_64 gen(43);
  const auto labeled = testing::random_sample_set(gen, 10, 3, 1.0);
  UnlabeledSet pool;
  for (int i = 0; i < 50; ++i) pool.add(testing::random_vector(gen, 3, 1.0));

  SelfTrainConfig cfg;
  cfg.sgd.steps = 400;
  cfg.seed = 77;
  const auto a = self_train(labeled, pool, cfg);
  const auto b = self_train(labeled, pool, cfg);

  REQUIRE(a.list.size() == b.list.size());
  for (std::size_t i = 0; i < a.list.size(); ++i) {
    CHECK(a.list.pairs()[i].halfspace().weights() == b.list.pairs()[i].halfspace().weights());
    CHECK(a.list.pairs()[i].gamma() == b.list.pairs()[i].gamma());
  }
  REQUIRE(a.trace.rounds.size() == b.trace.rounds.size());
  for (std::size_t i = 0; i < a.trace.rounds.size(); ++i) {
    CHECK(a.trace.rounds[i].gamma == b.trace.rounds[i].gamma);
    CHECK(a.trace.rounds[i].pseudo_labeled == b.trace.rounds[i].pseudo_labeled);
    CHECK(a.trace.rounds[i].pruned == b.trace.rounds[i].pruned);
  }
}

TEST_CASE("input validation", "[selftrain]") {
  CHECK_THROWS_AS(self_train(SampleSet{}, UnlabeledSet{}, SelfTrainConfig{}),
                  std::invalid_argument);

  SampleSet labeled;
  labeled.add({1, 0}, Label::plus());
  UnlabeledSet pool;
  pool.add({1, 2, 3});
  CHECK_THROWS_AS(self_train(labeled, pool, SelfTrainConfig{}), std::invalid_argument);
}

TEST_CASE("pseudo-labeling a clean planted pool does not hurt the cascade", "[selftrain]") {
  // 10 labeled points plus 200 unlabeled drawn from the same margin-0.5
  // planted halfspace (a low-density separation instance); averaged over 20
  // seeds the cascade's held-out error must not exceed the supervised
  // halfspace's.
  double supervised_error_sum = 0.0;
  double cascade_error_sum = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 gen(mix_seed(900, seed));
    const auto planted = TargetConcept::from_direction(testing::random_vector(gen, 5, 1.0));
    auto draw = [&] {
      while (true) {
        auto x = testing::random_ball_point(gen, 5);
        if (unsigned_margin(planted.normal(), x) >= 0.5) return x;
      }
    };

    SampleSet labeled;
    while (labeled.size() < 10) {
      auto x = draw();
      const Label y = planted.classify(x);
      labeled.add(std::move(x), y);
    }
    UnlabeledSet pool;
    for (int i = 0; i < 200; ++i) pool.add(draw());
    SampleSet test;
    for (int i = 0; i < 200; ++i) {
      auto x = draw();
      const Label y = planted.classify(x);
      test.add(std::move(x), y);
    }

    SelfTrainConfig cfg;
    cfg.seed = seed;
    cfg.sgd.seed = seed;
    const Halfspace supervised = projected_sgd(labeled, cfg.sgd).halfspace;
    const HalfspaceList cascade = self_train(labeled, pool, cfg).list;

    supervised_error_sum += zero_one_error(supervised, test);
    std::size_t wrong = 0;
    for (const auto& ex : test) {
      if (!(list_predict(cascade, ex.x) == ex.y)) ++wrong;
    }
    cascade_error_sum += static_cast<double>(wrong) / static_cast<double>(test.size());
  }
  CHECK(cascade_error_sum / 20.0 <= supervised_error_sum / 20.0);
}
