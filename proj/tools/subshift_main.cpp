/// @file subshift_main.cpp
/// @brief Command-line entry point: gen-data | train | test | power | report.
///
/// Exit codes: 0 success, 2 config error, 3 data/label error, 4 shape/size
/// error, 5 missing inputs.

#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>

#include "subshift/checkpoint.hpp"
#include "subshift/dataset_io.hpp"
#include "subshift/errors.hpp"
#include "subshift/kernel_train.hpp"
#include "subshift/results.hpp"
#include "subshift/run_config.hpp"
#include "subshift/seed_plan.hpp"
#include "subshift/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace subshift;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed_override;
  std::optional<int> threads_override;
};

cli::RunConfig load_config(const CommonArgs& args) {
  cli::RunConfig cfg = cli::RunConfig::load(args.config_path);
  if (args.seed_override) cfg.root_seed = *args.seed_override;
  if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
  if (args.threads_override) cfg.experiment.threads = *args.threads_override;
  return cfg;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw MissingInputError("cannot open for writing: " + path.string());
  f << text;
}

struct PoolFiles {
  fs::path p_train, p_val, p_test, q_train, q_val, q_test;

  static PoolFiles in(const fs::path& dir) {
    return {dir / "p_train.txt", dir / "p_val.txt",   dir / "p_test.txt",
            dir / "q_train.txt", dir / "q_val.txt",   dir / "q_test.txt"};
  }
};

int cmd_gen_data(const CommonArgs& args) {
  const cli::RunConfig cfg = load_config(args);
  const auto pools = synth::build_shift_pair(cfg.scenario, cfg.data.pattern, cfg.data.corruption,
                                             cfg.data.sizes,
                                             derive_seed(cfg.root_seed, {harness::seed_plan::kData}));
  fs::create_directories(cfg.out_dir);
  const PoolFiles files = PoolFiles::in(cfg.out_dir);
  write_dataset(files.p_train, pools.p_train);
  write_dataset(files.p_val, pools.p_val);
  write_dataset(files.p_test, pools.p_test);
  write_dataset(files.q_train, pools.q_train);
  write_dataset(files.q_val, pools.q_val);
  write_dataset(files.q_test, pools.q_test);

  json sidecar = {
      {"config", cfg.to_json()},
      {"files",
       {{"p_train", "p_train.txt"},
        {"p_val", "p_val.txt"},
        {"p_test", "p_test.txt"},
        {"q_train", "q_train.txt"},
        {"q_val", "q_val.txt"},
        {"q_test", "q_test.txt"}}},
  };
  write_text(fs::path(cfg.out_dir) / "gen_data.json", sidecar.dump(2) + "\n");
  std::cout << "wrote 6 pools to " << cfg.out_dir << "\n";
  return 0;
}

json epochs_to_json(const std::vector<nn::EpochStats>& log) {
  json out = json::array();
  for (const auto& e : log) {
    out.push_back({{"epoch", e.epoch}, {"train_loss", e.train_loss}, {"val_loss", e.val_loss}});
  }
  return out;
}

int cmd_train(const CommonArgs& args, const std::string& role, const std::string& data_dir_arg) {
  const cli::RunConfig cfg = load_config(args);
  const fs::path data_dir = data_dir_arg.empty() ? fs::path(cfg.out_dir) : fs::path(data_dir_arg);
  const PoolFiles files = PoolFiles::in(data_dir);
  fs::create_directories(cfg.out_dir);

  if (role == "task") {
    const SampleSet train = read_dataset(files.p_train, "P/train");
    const SampleSet val = read_dataset(files.p_val, "P/val");
    nn::TrainConfig tc = cfg.training;
    tc.seed = derive_seed(cfg.root_seed, {harness::seed_plan::kTaskNet});
    const nn::TrainResult r = nn::train_task_classifier(train, val, tc);
    nn::save_mlp(fs::path(cfg.out_dir) / "task.ckpt", r.net);
    const json log = {{"role", "task"},
                      {"best_epoch", r.best_epoch},
                      {"best_val_loss", r.best_val_loss},
                      {"val_accuracy", r.val_accuracy},
                      {"epochs", epochs_to_json(r.log)}};
    write_text(fs::path(cfg.out_dir) / "task_train_log.json", log.dump(2) + "\n");
  } else if (role == "domain") {
    const SampleSet train_p = read_dataset(files.p_train, "P/train");
    const SampleSet train_q = read_dataset(files.q_train, "Q/train");
    const SampleSet val_p = read_dataset(files.p_val, "P/val");
    const SampleSet val_q = read_dataset(files.q_val, "Q/val");
    nn::TrainConfig tc = cfg.training;
    tc.seed = derive_seed(cfg.root_seed, {harness::seed_plan::kDomainNet});
    const nn::TrainResult r = nn::train_domain_classifier(train_p, train_q, val_p, val_q, tc);
    nn::save_mlp(fs::path(cfg.out_dir) / "domain.ckpt", r.net);
    const json log = {{"role", "domain"},
                      {"best_epoch", r.best_epoch},
                      {"best_val_loss", r.best_val_loss},
                      {"val_accuracy", r.val_accuracy},
                      {"epochs", epochs_to_json(r.log)}};
    write_text(fs::path(cfg.out_dir) / "domain_train_log.json", log.dump(2) + "\n");
  } else if (role == "kernel") {
    const SampleSet train_p = read_dataset(files.p_train, "P/train");
    const SampleSet train_q = read_dataset(files.q_train, "Q/train");
    const SampleSet val_p = read_dataset(files.p_val, "P/val");
    const SampleSet val_q = read_dataset(files.q_val, "Q/val");
    nn::TrainConfig tc = cfg.kernel_training;
    tc.seed = derive_seed(cfg.root_seed, {harness::seed_plan::kKernel});
    const kernel::KernelTrainResult r = kernel::train_deep_kernel(
        train_p, train_q, val_p, val_q, tc, cfg.kernel_feature_dim);
    kernel::save_kernel(fs::path(cfg.out_dir) / "kernel.ckpt", r.kernel);
    const json log = {{"role", "kernel"},
                      {"best_epoch", r.best_epoch},
                      {"best_val_loss", r.best_val_loss},
                      {"init_val_loss", r.init_val_loss},
                      {"epochs", epochs_to_json(r.log)}};
    write_text(fs::path(cfg.out_dir) / "kernel_train_log.json", log.dump(2) + "\n");
  } else {
    throw ConfigError("unknown role '" + role + "' (expected task|domain|kernel)");
  }
  std::cout << "trained " << role << " into " << cfg.out_dir << "\n";
  return 0;
}

int cmd_test(const std::string& x_path, const std::string& y_path, const std::string& method_name,
             const std::string& checkpoint, double alpha, int n_permutations,
             std::uint64_t seed) {
  const harness::Method method = harness::parse_method(method_name);
  const SampleSet x = read_dataset(x_path, "X");
  const SampleSet y = read_dataset(y_path, "Y");
  stats::PermutationConfig pc{n_permutations, alpha, seed};

  stats::TestOutcome outcome;
  switch (method) {
    case harness::Method::c2st:
      outcome = stats::c2st_test(x, y, nn::load_mlp(checkpoint), pc);
      break;
    case harness::Method::mmdd:
      outcome = stats::mmd_test(x, y, kernel::load_kernel(checkpoint), pc);
      break;
    case harness::Method::muks: {
      const stats::MuksResult r = stats::muks_test(x, y, nn::load_mlp(checkpoint), alpha);
      outcome = stats::muks_outcome(r, x.size(), seed);
      break;
    }
  }
  std::cout << cli::outcome_to_json(outcome).dump() << "\n";
  return 0;
}

int cmd_power(const CommonArgs& args, const std::string& replay_path) {
  cli::RunConfig cfg;
  if (!replay_path.empty()) {
    std::ifstream f(replay_path);
    if (!f) throw MissingInputError("cannot open run record: " + replay_path);
    json record;
    try {
      f >> record;
    } catch (const json::exception& e) {
      throw ConfigError(std::string("run record parse error: ") + e.what());
    }
    if (!record.contains("config")) throw ConfigError("run record has no config snapshot");
    cfg = cli::RunConfig::from_json(record.at("config"));
    if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
    if (args.threads_override) cfg.experiment.threads = *args.threads_override;
  } else {
    cfg = load_config(args);
  }

  const auto t0 = std::chrono::steady_clock::now();
  const auto pools = synth::build_shift_pair(cfg.scenario, cfg.data.pattern, cfg.data.corruption,
                                             cfg.data.sizes,
                                             derive_seed(cfg.root_seed, {harness::seed_plan::kData}));
  const harness::TrainedArtifacts artifacts =
      harness::train_artifacts(cfg.experiment, pools, cfg.training, cfg.kernel_training,
                               cfg.kernel_feature_dim,
                               harness::seed_plan::train_seeds(cfg.root_seed));

  std::vector<cli::LabeledResult> blocks;
  blocks.push_back({"power", harness::estimate_power(cfg.experiment, artifacts, pools.p_test,
                                                     pools.q_test, cfg.root_seed)});
  blocks.push_back(
      {"type1", harness::estimate_type1(cfg.experiment, artifacts, pools.p_test, cfg.root_seed)});

  switch (cfg.sweep.kind) {
    case cli::SweepKind::none:
      break;
    case cli::SweepKind::shift_strength: {
      auto entries = harness::sweep_shift_strength(
          cfg.experiment, cfg.data, cfg.training, cfg.kernel_training, cfg.kernel_feature_dim,
          cfg.scenario.source_p, cfg.sweep.w_values, cfg.root_seed);
      for (auto& e : entries) blocks.push_back({"sweep:" + e.label, std::move(e.power)});
      break;
    }
    case cli::SweepKind::training_size: {
      auto entries = harness::sweep_training_size(cfg.experiment, cfg.data, cfg.scenario,
                                                  cfg.training, cfg.kernel_training,
                                                  cfg.kernel_feature_dim, cfg.sweep.fractions,
                                                  cfg.root_seed);
      for (auto& e : entries) blocks.push_back({"sweep:" + e.label, std::move(e.power)});
      break;
    }
    case cli::SweepKind::architecture: {
      auto entries = harness::sweep_architecture(cfg.experiment, cfg.data, cfg.scenario,
                                                 cfg.training, cfg.kernel_training,
                                                 cfg.kernel_feature_dim, cfg.sweep.variants,
                                                 cfg.root_seed);
      for (auto& e : entries) blocks.push_back({"sweep:" + e.label, std::move(e.power)});
      break;
    }
  }

  fs::create_directories(cfg.out_dir);
  const fs::path out(cfg.out_dir);
  cli::write_outcomes_jsonl(out / "outcomes.jsonl", blocks);
  cli::write_summary_json(out / "summary.json", blocks, cfg.experiment.alpha);
  cli::write_curves_csv(out / "curves.csv", blocks);
  write_text(out / "run_record.json", json{{"config", cfg.to_json()}}.dump(2) + "\n");

  if (artifacts.task_net) nn::save_mlp(out / "task.ckpt", *artifacts.task_net);
  if (artifacts.domain_net) nn::save_mlp(out / "domain.ckpt", *artifacts.domain_net);
  if (artifacts.kernel) kernel::save_kernel(out / "kernel.ckpt", *artifacts.kernel);

  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ostringstream log;
  log << "wall_clock_seconds=" << seconds << "\n"
      << "task_val_accuracy=" << artifacts.task_val_accuracy << "\n"
      << "domain_val_accuracy=" << artifacts.domain_val_accuracy << "\n"
      << "kernel_init_val_loss=" << artifacts.kernel_init_val_loss << "\n"
      << "kernel_best_val_loss=" << artifacts.kernel_best_val_loss << "\n";
  write_text(out / "power.log", log.str());

  std::cout << "results in " << cfg.out_dir << "\n";
  return 0;
}

int cmd_report(const std::string& results_dir, const std::string& out_arg) {
  const fs::path results(results_dir);
  const fs::path summary_path = results / "summary.json";
  std::ifstream f(summary_path);
  if (!f) throw MissingInputError("no summary.json under " + results_dir);
  json summary;
  try {
    f >> summary;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("summary parse error: ") + e.what());
  }
  if (!summary.contains("curves") || summary.at("curves").empty()) {
    throw MissingInputError("summary.json has no curves");
  }
  const double alpha = summary.value("alpha", 0.05);

  const fs::path out = out_arg.empty() ? results : fs::path(out_arg);
  fs::create_directories(out);

  std::ofstream csv(out / "report.csv", std::ios::binary);
  csv << "role,method,m,rate,lo,hi,rejected,repetitions\n";

  for (const auto& [role, points] : summary.at("curves").items()) {
    harness::PowerCurve curve;
    for (const auto& p : points) {
      harness::PowerPoint pt;
      pt.method = harness::parse_method(p.at("method").get<std::string>());
      pt.m = p.at("m").get<std::size_t>();
      pt.rate = p.at("rate").get<double>();
      pt.ci.lo = p.at("lo").get<double>();
      pt.ci.hi = p.at("hi").get<double>();
      pt.rejected = p.at("rejected").get<int>();
      pt.repetitions = p.at("repetitions").get<int>();
      curve.points.push_back(pt);
      csv << role << ',' << harness::method_name(pt.method) << ',' << pt.m << ',' << pt.rate
          << ',' << pt.ci.lo << ',' << pt.ci.hi << ',' << pt.rejected << ',' << pt.repetitions
          << '\n';
    }
    std::string file_stem = role;
    for (char& c : file_stem) {
      if (c == ':' || c == '/' || c == '=') c = '_';
    }
    const std::string svg = role == "type1"
                                ? cli::render_type1_svg(curve, alpha, "Type I error")
                                : cli::render_curve_svg(curve, "Test power (" + role + ")");
    write_text(out / (file_stem + ".svg"), svg);
  }
  std::cout << "report in " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"subgroup shift detection via learned two-sample tests"};
  app.require_subcommand(1);

  CommonArgs common;
  std::string role, data_dir, replay_path;
  std::string x_path, y_path, method, checkpoint, results_dir, report_out;
  double alpha = 0.05;
  int n_permutations = 200;
  std::uint64_t test_seed = 0;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    sub->add_option("--config", common.config_path, "JSON run configuration")
        ->required(config_required);
    sub->add_option("--out", common.out_dir, "output directory (overrides config)");
    sub->add_option("--seed", common.seed_override, "root seed override");
    sub->add_option("--threads", common.threads_override, "worker threads");
  };

  CLI::App* gen = app.add_subcommand("gen-data", "generate source/target pools");
  add_common(gen, true);

  CLI::App* train = app.add_subcommand("train", "train one feature extractor");
  add_common(train, true);
  train->add_option("--role", role, "task|domain|kernel")->required();
  train->add_option("--data-dir", data_dir, "directory with generated pools");

  CLI::App* test = app.add_subcommand("test", "run one two-sample test");
  test->add_option("--x", x_path, "sample X dataset file")->required();
  test->add_option("--y", y_path, "sample Y dataset file")->required();
  test->add_option("--method", method, "c2st|mmdd|muks")->required();
  test->add_option("--checkpoint", checkpoint, "model checkpoint")->required();
  test->add_option("--alpha", alpha, "significance level");
  test->add_option("--n-permutations", n_permutations, "permutation count");
  test->add_option("--seed", test_seed, "permutation seed");

  CLI::App* power = app.add_subcommand("power", "run the power/type-I protocol");
  add_common(power, false);
  power->add_option("--replay", replay_path, "re-execute from a run record");

  CLI::App* report = app.add_subcommand("report", "render curves from results");
  report->add_option("--results", results_dir, "results directory")->required();
  report->add_option("--out", report_out, "output directory (default: results dir)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    if (gen->parsed()) return cmd_gen_data(common);
    if (train->parsed()) return cmd_train(common, role, data_dir);
    if (test->parsed()) return cmd_test(x_path, y_path, method, checkpoint, alpha,
                                        n_permutations, test_seed);
    if (power->parsed()) {
      if (replay_path.empty() && common.config_path.empty()) {
        throw ConfigError("power: need --config or --replay");
      }
      return cmd_power(common, replay_path);
    }
    if (report->parsed()) return cmd_report(results_dir, report_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const ShapeError& e) {
    std::cerr << "shape error: " << e.what() << "\n";
    return 4;
  } catch (const MissingInputError& e) {
    std::cerr << "missing input: " << e.what() << "\n";
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
