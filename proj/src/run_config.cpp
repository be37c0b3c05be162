#include "subshift/run_config.hpp"

#include <fstream>
#include <set>

#include "subshift/errors.hpp"

namespace subshift::cli {

namespace {

using nlohmann::json;

/// Reads fields off one JSON object, rejecting keys nobody asked for.
class StrictObject {
 public:
  StrictObject(const json& j, std::string context) : j_(j), context_(std::move(context)) {
    if (!j_.is_object()) throw ConfigError(context_ + ": expected a JSON object");
  }

  template <typename T>
  void field(const char* key, T& out) {
    allowed_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(context_ + "." + key + ": " + e.what());
    }
  }

  [[nodiscard]] bool has(const char* key) {
    allowed_.insert(key);
    return j_.contains(key);
  }

  [[nodiscard]] const json& sub(const char* key) {
    allowed_.insert(key);
    return j_.at(key);
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!allowed_.contains(key)) {
        throw ConfigError(context_ + ": unknown key '" + key + "'");
      }
    }
  }

 private:
  const json& j_;
  std::string context_;
  std::set<std::string> allowed_;
};

synth::PatternSpec parse_pattern(const json& j) {
  synth::PatternSpec p;
  StrictObject o(j, "data.pattern");
  o.field("side_length", p.side_length);
  o.field("class_count", p.class_count);
  o.field("prototype_seed", p.prototype_seed);
  o.field("noise_sigma", p.noise_sigma);
  o.finish();
  return p;
}

synth::CorruptionSpec parse_corruption(const json& j) {
  synth::CorruptionSpec c;
  StrictObject o(j, "data.corruption");
  o.field("probability", c.probability);
  o.field("rect_min_frac", c.rect_min_frac);
  o.field("rect_max_frac", c.rect_max_frac);
  o.field("fill_value", c.fill_value);
  o.finish();
  return c;
}

synth::PoolSizes parse_sizes(const json& j) {
  synth::PoolSizes s;
  StrictObject o(j, "data.sizes");
  o.field("train", s.train);
  o.field("val", s.val);
  o.field("test", s.test);
  o.finish();
  return s;
}

synth::ShiftScenario parse_scenario(const json& j) {
  synth::ShiftScenario s;
  StrictObject o(j, "scenario");
  o.field("source_p", s.source_p);
  o.field("target_p", s.target_p);
  o.field("oversample_w", s.oversample_w);
  o.finish();
  return s;
}

harness::ExperimentConfig parse_experiment(const json& j) {
  harness::ExperimentConfig e;
  StrictObject o(j, "experiment");
  if (o.has("methods")) {
    e.methods.clear();
    for (const auto& name : o.sub("methods")) {
      e.methods.push_back(harness::parse_method(name.get<std::string>()));
    }
  }
  o.field("sample_sizes", e.sample_sizes);
  o.field("repetitions", e.repetitions);
  o.field("alpha", e.alpha);
  o.field("n_permutations", e.n_permutations);
  o.field("threads", e.threads);
  o.finish();
  return e;
}

nn::TrainConfig parse_training(const json& j, const char* context, const nn::TrainConfig& base) {
  nn::TrainConfig t = base;
  StrictObject o(j, context);
  o.field("batch_size", t.batch_size);
  o.field("max_epochs", t.max_epochs);
  o.field("lr", t.lr);
  o.field("patience", t.patience);
  std::vector<long> hidden;
  o.field("hidden_dims", hidden);
  if (!hidden.empty() || j.contains("hidden_dims")) {
    t.hidden_dims.assign(hidden.begin(), hidden.end());
  }
  o.finish();
  return t;
}

SweepConfig parse_sweep(const json& j) {
  SweepConfig s;
  StrictObject o(j, "sweep");
  std::string kind = "none";
  o.field("kind", kind);
  if (kind == "none") {
    s.kind = SweepKind::none;
  } else if (kind == "shift_strength") {
    s.kind = SweepKind::shift_strength;
  } else if (kind == "training_size") {
    s.kind = SweepKind::training_size;
  } else if (kind == "architecture") {
    s.kind = SweepKind::architecture;
  } else {
    throw ConfigError("sweep.kind: unknown kind '" + kind + "'");
  }
  o.field("w_values", s.w_values);
  o.field("fractions", s.fractions);
  if (o.has("variants")) {
    s.variants.clear();
    for (const auto& v : o.sub("variants")) {
      StrictObject vo(v, "sweep.variants[]");
      harness::ArchitectureVariant variant;
      vo.field("name", variant.name);
      std::vector<long> hidden;
      vo.field("hidden_dims", hidden);
      variant.hidden_dims.assign(hidden.begin(), hidden.end());
      vo.finish();
      s.variants.push_back(std::move(variant));
    }
  }
  o.finish();
  return s;
}

}  // namespace

RunConfig::RunConfig() {
  training.lr = 1e-3;
  training.hidden_dims = {128, 64};
  kernel_training.lr = 1e-4;
  kernel_training.hidden_dims = {128};
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  RunConfig cfg;
  StrictObject o(j, "config");
  o.field("root_seed", cfg.root_seed);
  o.field("out_dir", cfg.out_dir);
  if (o.has("data")) {
    StrictObject d(o.sub("data"), "data");
    if (d.has("pattern")) cfg.data.pattern = parse_pattern(d.sub("pattern"));
    if (d.has("corruption")) cfg.data.corruption = parse_corruption(d.sub("corruption"));
    if (d.has("sizes")) cfg.data.sizes = parse_sizes(d.sub("sizes"));
    d.finish();
  }
  if (o.has("scenario")) cfg.scenario = parse_scenario(o.sub("scenario"));
  if (o.has("experiment")) cfg.experiment = parse_experiment(o.sub("experiment"));
  if (o.has("training")) cfg.training = parse_training(o.sub("training"), "training", cfg.training);
  if (o.has("kernel_training")) {
    cfg.kernel_training =
        parse_training(o.sub("kernel_training"), "kernel_training", cfg.kernel_training);
  }
  {
    long fd = cfg.kernel_feature_dim;
    o.field("kernel_feature_dim", fd);
    cfg.kernel_feature_dim = fd;
  }
  if (o.has("sweep")) cfg.sweep = parse_sweep(o.sub("sweep"));
  o.finish();
  cfg.validate();
  return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw MissingInputError("cannot open config: " + path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  return from_json(j);
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json methods = nlohmann::json::array();
  for (harness::Method m : experiment.methods) methods.push_back(harness::method_name(m));

  nlohmann::json variants = nlohmann::json::array();
  for (const auto& v : sweep.variants) {
    variants.push_back({{"name", v.name},
                        {"hidden_dims", std::vector<long>(v.hidden_dims.begin(),
                                                          v.hidden_dims.end())}});
  }
  const char* sweep_kind = "none";
  switch (sweep.kind) {
    case SweepKind::none: sweep_kind = "none"; break;
    case SweepKind::shift_strength: sweep_kind = "shift_strength"; break;
    case SweepKind::training_size: sweep_kind = "training_size"; break;
    case SweepKind::architecture: sweep_kind = "architecture"; break;
  }

  auto training_json = [](const nn::TrainConfig& t) {
    return nlohmann::json{
        {"batch_size", t.batch_size},
        {"max_epochs", t.max_epochs},
        {"lr", t.lr},
        {"patience", t.patience},
        {"hidden_dims", std::vector<long>(t.hidden_dims.begin(), t.hidden_dims.end())},
    };
  };

  // out_dir is runtime context, not experiment identity; keeping it out of
  // the snapshot makes records and sidecars byte-identical across reruns
  // into different directories.
  return nlohmann::json{
      {"root_seed", root_seed},
      {"data",
       {{"pattern",
         {{"side_length", data.pattern.side_length},
          {"class_count", data.pattern.class_count},
          {"prototype_seed", data.pattern.prototype_seed},
          {"noise_sigma", data.pattern.noise_sigma}}},
        {"corruption",
         {{"probability", data.corruption.probability},
          {"rect_min_frac", data.corruption.rect_min_frac},
          {"rect_max_frac", data.corruption.rect_max_frac},
          {"fill_value", data.corruption.fill_value}}},
        {"sizes",
         {{"train", data.sizes.train}, {"val", data.sizes.val}, {"test", data.sizes.test}}}}},
      {"scenario",
       {{"source_p", scenario.source_p},
        {"target_p", scenario.target_p},
        {"oversample_w", scenario.oversample_w}}},
      {"experiment",
       {{"methods", methods},
        {"sample_sizes", experiment.sample_sizes},
        {"repetitions", experiment.repetitions},
        {"alpha", experiment.alpha},
        {"n_permutations", experiment.n_permutations},
        {"threads", experiment.threads}}},
      {"training", training_json(training)},
      {"kernel_training", training_json(kernel_training)},
      {"kernel_feature_dim", static_cast<long>(kernel_feature_dim)},
      {"sweep",
       {{"kind", sweep_kind},
        {"w_values", sweep.w_values},
        {"fractions", sweep.fractions},
        {"variants", variants}}},
  };
}

void RunConfig::validate() const {
  data.pattern.validate();
  data.corruption.validate();
  scenario.validate();
  experiment.validate();
  training.validate();
  kernel_training.validate();
  if (data.sizes.train < 1 || data.sizes.val < 1 || data.sizes.test < 1) {
    throw ConfigError("data.sizes: all pools must be nonempty");
  }
  if (kernel_feature_dim < 1) throw ConfigError("kernel_feature_dim must be >= 1");
}

}  // namespace subshift::cli
