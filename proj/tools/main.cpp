// Command-line surface: synth / train / predict / bench / inspect.
// Every command is fully determined by its flags; re-runs write identical
// bytes.

#include <CLI11.hpp>

#include <cctype>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "sthalf/sthalf.hpp"

namespace {

using namespace sthalf;

std::string format_g6(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.6g", v);
  return buffer;
}

bool has_csv_extension(const std::string& path) {
  if (path.size() < 4) return false;
  std::string tail = path.substr(path.size() - 4);
  for (char& c : tail) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return tail == ".csv";
}

SampleSet load_dataset(const std::string& path, bool normalize) {
  SampleSet s = has_csv_extension(path) ? read_csv(path) : read_svmlight(path);
  return normalize ? normalize_rows(s) : s;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open file for writing: " + path);
  return out;
}

struct SynthOptions {
  std::size_t dimension = 10;
  std::size_t count = 1000;
  double radius = 1.0;
  std::string distribution = "uniform-ball";
  std::string noise = "constant";
  double eta_max = 0.0;
  std::optional<double> decay;
  std::uint64_t seed = 0;
  std::string out;
};

int run_synth(const SynthOptions& opt) {
  if (opt.noise == "constant" && opt.decay) {
    throw std::runtime_error("--decay-c only applies to --noise margin-decay");
  }
  const NoiseSpec noise = opt.noise == "constant"
                              ? NoiseSpec::constant(opt.eta_max)
                              : NoiseSpec::margin_decay(opt.eta_max, opt.decay.value_or(1.0));

  // Sub-streams: 0 = planted direction, 1 = inputs, 2 = label corruption.
  std::mt19937_64 direction_gen(mix_seed(opt.seed, 0));
  FeatureVector direction(opt.dimension);
  double norm = 0.0;
  do {
    for (double& c : direction) c = standard_normal(direction_gen);
    norm = l2_norm(direction);
  } while (norm == 0.0);
  const auto planted = TargetConcept::from_direction(std::move(direction));

  SyntheticSpec spec;
  spec.dimension = opt.dimension;
  spec.count = opt.count;
  spec.radius = opt.radius;
  spec.distribution = opt.distribution == "uniform-ball" ? InputDistribution::uniform_ball
                                                         : InputDistribution::gaussian_clipped;
  spec.seed = mix_seed(opt.seed, 1);
  const auto inputs = sample_inputs(spec);
  const auto corrupted = massart_corrupt(planted, inputs, noise, mix_seed(opt.seed, 2));

  auto out = open_out(opt.out);
  write_svmlight(out, corrupted);

  std::size_t flips = 0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (!(corrupted[i].y == planted.classify(inputs[i]))) ++flips;
  }
  std::cerr << "planted w* =";
  for (double c : planted.normal()) std::cerr << ' ' << format_g6(c);
  std::cerr << '\n'
            << "wrote " << corrupted.size() << " rows to " << opt.out
            << ", realized flip fraction = "
            << format_g6(static_cast<double>(flips) / static_cast<double>(inputs.size())) << '\n';
  return 0;
}

struct TrainOptions {
  std::string data;
  std::size_t labeled = 0;
  std::size_t threshold_tests = 5;
  std::optional<std::size_t> sgd_steps;
  std::uint64_t seed = 0;
  std::string model_out;
  std::string trace_out;
  bool normalize = false;
};

void write_trace(std::ostream& out, const TrainTrace& trace) {
  out << "#round\tlabeled\tunlabeled\tgamma\tpseudo_labeled\tpruned\tappended\tforced_stop\n";
  for (const auto& r : trace.rounds) {
    out << r.round << '\t' << r.labeled_size << '\t' << r.unlabeled_size << '\t'
        << format_double(r.gamma) << '\t' << r.pseudo_labeled << '\t' << r.pruned << '\t'
        << (r.appended ? 1 : 0) << '\t' << (r.forced_stop ? 1 : 0) << '\n';
  }
}

int run_train(const TrainOptions& opt) {
  const SampleSet data = load_dataset(opt.data, opt.normalize);
  if (opt.labeled == 0) throw std::runtime_error("--labeled must be >= 1");
  if (opt.labeled > data.size()) {
    throw std::runtime_error("--labeled " + std::to_string(opt.labeled) + " exceeds dataset size " +
                             std::to_string(data.size()));
  }

  const auto split = make_semisup_split(data, opt.labeled, mix_seed(opt.seed, 0));
  SelfTrainConfig cfg;
  cfg.threshold_tests = opt.threshold_tests;
  cfg.sgd.steps = opt.sgd_steps;
  cfg.seed = mix_seed(opt.seed, 1);
  const auto result = self_train(split.labeled, split.unlabeled, cfg);

  auto model = open_out(opt.model_out);
  write_model(model, result.list);
  auto trace = open_out(opt.trace_out);
  write_trace(trace, result.trace);

  std::cerr << "trained cascade of " << result.list.size() << " pairs in "
            << result.trace.total_rounds << " rounds, residual labeled set "
            << result.trace.final_labeled_size << '\n';
  return 0;
}

struct PredictOptions {
  std::string model;
  std::string data;
  std::string out;
  bool normalize = false;
};

int run_predict(const PredictOptions& opt) {
  const HalfspaceList model = read_model(opt.model);
  const SampleSet data = load_dataset(opt.data, opt.normalize);
  if (data.empty()) throw std::runtime_error("dataset is empty: " + opt.data);
  if (data.dimension() != model.dimension()) {
    throw std::runtime_error("data dimension " + std::to_string(data.dimension()) +
                             " does not match model dimension " + std::to_string(model.dimension()));
  }

  auto out = open_out(opt.out);
  for (const auto& ex : data) {
    const auto prediction = list_predict_detail(model, ex.x);
    out << (prediction.label == Label::plus() ? "+1" : "-1") << '\t' << prediction.fired_position
        << '\n';
  }
  std::cerr << "wrote " << data.size() << " predictions to " << opt.out << '\n';
  return 0;
}

struct BenchOptions {
  std::string data;
  std::size_t labeled = 10;
  std::size_t trials = 20;
  double train_fraction = 0.7;
  std::uint64_t seed = 0;
  std::string report_out;
  bool normalize = false;
};

int run_bench(const BenchOptions& opt) {
  if (!(opt.train_fraction > 0.0) || !(opt.train_fraction < 1.0)) {
    throw std::runtime_error("--train-frac must lie strictly between 0 and 1");
  }
  const SampleSet data = load_dataset(opt.data, opt.normalize);

  TrialSpec spec;
  spec.labeled_count = opt.labeled;
  spec.trials = opt.trials;
  spec.train_fraction = opt.train_fraction;
  spec.base_seed = opt.seed;
  const auto result = run_benchmark(data, spec);

  auto report = open_out(opt.report_out);
  report << "# bench report: data=" << opt.data << " labeled=" << opt.labeled
         << " trials=" << opt.trials << " train_frac=" << format_g6(opt.train_fraction)
         << " seed=" << opt.seed << " normalize=" << (opt.normalize ? 1 : 0) << '\n';
  report << "# std is the population standard deviation; ranksum compares L_m (a) vs LTF (b), "
            "z>0 favors L_m\n";
  for (const auto& method : {result.ltf, result.lm}) {
    report << method.method << '\t' << format_double(method.mean) << '\t'
           << format_double(method.std_dev);
    for (double v : method.per_trial_accuracy) report << '\t' << format_double(v);
    report << '\n';
  }
  report << "ranksum";
  if (result.rank_sum) {
    report << "\tu=" << format_double(result.rank_sum->u_statistic)
           << "\tz=" << format_double(result.rank_sum->z_score)
           << "\tsignificant_at_0.01=" << (result.rank_sum->significant_at_0_01 ? "yes" : "no")
           << '\n';
  } else {
    report << "\tu=na\tz=na\tsignificant_at_0.01=na\n";
  }

  std::printf("method  mean      std\n");
  std::printf("LTF     %-9s %-9s\n", format_g6(result.ltf.mean).c_str(),
              format_g6(result.ltf.std_dev).c_str());
  std::printf("L_m     %-9s %-9s\n", format_g6(result.lm.mean).c_str(),
              format_g6(result.lm.std_dev).c_str());
  if (result.rank_sum) {
    std::printf("rank-sum: z = %s (%ssignificant at 0.01)\n",
                format_g6(result.rank_sum->z_score).c_str(),
                result.rank_sum->significant_at_0_01 ? "" : "not ");
  } else {
    std::printf("rank-sum: n/a (needs >= 5 trials)\n");
  }
  return 0;
}

struct InspectOptions {
  std::string trace;
};

int run_inspect(const InspectOptions& opt) {
  std::ifstream in(opt.trace);
  if (!in) throw std::runtime_error("cannot open file: " + opt.trace);

  struct Row {
    long round, labeled, unlabeled, pseudo, pruned, appended, forced;
    double gamma;
  };
  std::vector<Row> rows;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() || line[0] == '#') continue;
    Row row{};
    const int matched =
        std::sscanf(line.c_str(), "%ld\t%ld\t%ld\t%lf\t%ld\t%ld\t%ld\t%ld", &row.round,
                    &row.labeled, &row.unlabeled, &row.gamma, &row.pseudo, &row.pruned,
                    &row.appended, &row.forced);
    if (matched != 8 || row.labeled < 0 || row.unlabeled < 0) {
      throw std::runtime_error(opt.trace + " line " + std::to_string(line_number) +
                               ": malformed trace row");
    }
    rows.push_back(row);
  }

  if (rows.empty()) {
    std::printf("0 rounds\n");
    return 0;
  }

  std::printf("%-6s %-8s %-8s %-12s %-8s %-8s %s\n", "round", "|S|", "|X_u|", "gamma", "dS", "dX_u",
              "action");
  long appended_pairs = 0, pseudo_total = 0, pruned_total = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const long ds = i == 0 ? 0 : r.labeled - rows[i - 1].labeled;
    const long du = i == 0 ? 0 : r.unlabeled - rows[i - 1].unlabeled;
    std::string action;
    if (r.appended) {
      ++appended_pairs;
      pruned_total += r.pruned;
      action = "appended pair " + std::to_string(appended_pairs) + ", pruned " +
               std::to_string(r.pruned);
      if (r.forced) action += " [forced stop]";
    } else {
      pseudo_total += r.pseudo;
      action = "pseudo-labeled " + std::to_string(r.pseudo);
    }
    std::printf("%-6ld %-8ld %-8ld %-12s %+-8ld %+-8ld %s\n", r.round, r.labeled, r.unlabeled,
                format_g6(r.gamma).c_str(), ds, du, action.c_str());
  }
  std::printf("%zu rounds: %ld pairs appended, %ld pseudo-labeled, %ld pruned\n", rows.size(),
              appended_pairs, pseudo_total, pruned_total);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"self-training with halfspaces: synthesize, train, predict, benchmark"};
  app.require_subcommand(1);

  SynthOptions synth;
  auto* synth_cmd = app.add_subcommand("synth", "generate a noisy planted-halfspace dataset");
  synth_cmd->add_option("--d", synth.dimension, "input dimension")->required();
  synth_cmd->add_option("--n", synth.count, "number of examples")->required();
  synth_cmd->add_option("--radius", synth.radius, "support radius R");
  synth_cmd->add_option("--dist", synth.distribution, "input distribution")
      ->check(CLI::IsMember({"uniform-ball", "gaussian-clipped"}));
  synth_cmd->add_option("--noise", synth.noise, "flip-rate profile")
      ->check(CLI::IsMember({"constant", "margin-decay"}));
  synth_cmd->add_option("--eta-max", synth.eta_max, "maximum flip probability, in [0, 0.5)");
  synth_cmd->add_option("--decay-c", synth.decay, "margin-decay rate (margin-decay only)");
  synth_cmd->add_option("--seed", synth.seed, "random seed");
  synth_cmd->add_option("--out", synth.out, "output svmlight file")->required();

  TrainOptions train;
  auto* train_cmd = app.add_subcommand("train", "self-train a halfspace cascade");
  train_cmd->add_option("--data", train.data, "dataset (svmlight, or .csv)")->required();
  train_cmd->add_option("--labeled", train.labeled, "number of labeled examples l")->required();
  train_cmd->add_option("--p", train.threshold_tests, "threshold tests per round");
  train_cmd->add_option("--sgd-steps", train.sgd_steps, "SGD steps per round (default 100*|S|, capped)");
  train_cmd->add_option("--seed", train.seed, "random seed");
  train_cmd->add_option("--model-out", train.model_out, "model file to write")->required();
  train_cmd->add_option("--trace-out", train.trace_out, "round trace file to write")->required();
  train_cmd->add_flag("--normalize", train.normalize, "scale rows to unit norm on load");

  PredictOptions predict;
  auto* predict_cmd = app.add_subcommand("predict", "classify rows with a trained cascade");
  predict_cmd->add_option("--model", predict.model, "model file")->required();
  predict_cmd->add_option("--data", predict.data, "dataset to classify")->required();
  predict_cmd->add_option("--out", predict.out, "predictions file to write")->required();
  predict_cmd->add_flag("--normalize", predict.normalize, "scale rows to unit norm on load");

  BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "supervised-vs-self-trained benchmark");
  bench_cmd->add_option("--data", bench.data, "dataset (svmlight, or .csv)")->required();
  bench_cmd->add_option("--labeled", bench.labeled, "labeled examples per trial")->required();
  bench_cmd->add_option("--trials", bench.trials, "number of trials");
  bench_cmd->add_option("--train-frac", bench.train_fraction, "training fraction of each trial");
  bench_cmd->add_option("--seed", bench.seed, "base seed");
  bench_cmd->add_option("--report-out", bench.report_out, "report file to write")->required();
  bench_cmd->add_flag("--normalize", bench.normalize, "scale rows to unit norm on load");

  InspectOptions inspect;
  auto* inspect_cmd = app.add_subcommand("inspect", "pretty-print a training trace");
  inspect_cmd->add_option("--trace", inspect.trace, "trace file")->required();

  try {
    app.parse(argc, argv);
    if (synth_cmd->parsed()) return run_synth(synth);
    if (train_cmd->parsed()) return run_train(train);
    if (predict_cmd->parsed()) return run_predict(predict);
    if (bench_cmd->parsed()) return run_bench(bench);
    if (inspect_cmd->parsed()) return run_inspect(inspect);
    return 1;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
