#include "subshift/power.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "subshift/errors.hpp"
#include "subshift/rng.hpp"
#include "subshift/sampling.hpp"

namespace subshift::harness {

const char* method_name(Method m) noexcept {
  switch (m) {
    case Method::c2st: return "c2st";
    case Method::mmdd: return "mmdd";
    case Method::muks: return "muks";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  if (name == "c2st") return Method::c2st;
  if (name == "mmdd") return Method::mmdd;
  if (name == "muks") return Method::muks;
  throw ConfigError("unknown method '" + name + "' (expected c2st|mmdd|muks)");
}

namespace {

/// Stable per-method seed slot; independent of the configured method order.
std::uint64_t method_slot(Method m) noexcept {
  switch (m) {
    case Method::c2st: return 0;
    case Method::mmdd: return 1;
    case Method::muks: return 2;
  }
  return 3;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (methods.empty()) throw ConfigError("ExperimentConfig: no methods selected");
  if (sample_sizes.empty()) throw ConfigError("ExperimentConfig: no sample sizes");
  for (std::size_t i = 0; i < sample_sizes.size(); ++i) {
    if (sample_sizes[i] < 1) throw ConfigError("ExperimentConfig: sample sizes must be >= 1");
    if (i > 0 && sample_sizes[i] <= sample_sizes[i - 1]) {
      throw ConfigError("ExperimentConfig: sample sizes must be ascending");
    }
  }
  if (repetitions < 1) throw ConfigError("ExperimentConfig: repetitions must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("ExperimentConfig: alpha must lie in (0,1)");
  if (n_permutations < 19) throw ConfigError("ExperimentConfig: n_permutations must be >= 19");
  if (threads < 1) throw ConfigError("ExperimentConfig: threads must be >= 1");
}

TrainedArtifacts train_artifacts(const ExperimentConfig& cfg, const synth::ShiftPair& pools,
                                 const nn::TrainConfig& classifier_cfg,
                                 const nn::TrainConfig& kernel_cfg, Eigen::Index feature_dim,
                                 const TrainSeeds& seeds) {
  cfg.validate();
  TrainedArtifacts art;

  auto want = [&](Method m) {
    return std::find(cfg.methods.begin(), cfg.methods.end(), m) != cfg.methods.end();
  };
  auto record_origins = [&](const SampleSet& s) {
    for (const Example& ex : s.examples) art.training_origins.insert(ex.origin);
  };

  if (want(Method::muks)) {
    nn::TrainConfig tc = classifier_cfg;
    tc.seed = seeds.task;
    nn::TrainResult r = train_task_classifier(pools.p_train, pools.p_val, tc);
    art.task_net = std::move(r.net);
    art.task_val_accuracy = r.val_accuracy;
    record_origins(pools.p_train);
    record_origins(pools.p_val);
  }
  if (want(Method::c2st)) {
    nn::TrainConfig tc = classifier_cfg;
    tc.seed = seeds.domain;
    nn::TrainResult r =
        train_domain_classifier(pools.p_train, pools.q_train, pools.p_val, pools.q_val, tc);
    art.domain_net = std::move(r.net);
    art.domain_val_accuracy = r.val_accuracy;
    record_origins(pools.p_train);
    record_origins(pools.q_train);
    record_origins(pools.p_val);
    record_origins(pools.q_val);
  }
  if (want(Method::mmdd)) {
    nn::TrainConfig tc = kernel_cfg;
    tc.seed = seeds.kernel;
    kernel::KernelTrainResult r = kernel::train_deep_kernel(pools.p_train, pools.q_train,
                                                            pools.p_val, pools.q_val, tc,
                                                            feature_dim);
    art.kernel = std::move(r.kernel);
    art.kernel_init_val_loss = r.init_val_loss;
    art.kernel_best_val_loss = r.best_val_loss;
    record_origins(pools.p_train);
    record_origins(pools.q_train);
    record_origins(pools.p_val);
    record_origins(pools.q_val);
  }
  return art;
}

Interval wilson_interval(int successes, int trials) {
  if (trials <= 0) return {0.0, 1.0};
  const double z = 1.959963984540054;  // 97.5% normal quantile
  const double n = trials;
  const double p = double(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

Interval binomial_band(int n, double p, double coverage) {
  if (n < 1 || !(p > 0.0 && p < 1.0) || !(coverage > 0.0 && coverage < 1.0)) {
    throw ConfigError("binomial_band: invalid arguments");
  }
  // log pmf via lgamma keeps this exact enough for any practical n
  auto log_pmf = [&](int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
           k * std::log(p) + (n - k) * std::log1p(-p);
  };
  const double q_lo = (1.0 - coverage) / 2.0;
  const double q_hi = (1.0 + coverage) / 2.0;
  double cdf = 0.0;
  int k_lo = -1, k_hi = -1;
  for (int k = 0; k <= n; ++k) {
    cdf += std::exp(log_pmf(k));
    if (k_lo < 0 && cdf >= q_lo) k_lo = k;
    if (k_hi < 0 && cdf >= q_hi) {
      k_hi = k;
      break;
    }
  }
  if (k_lo < 0) k_lo = n;
  if (k_hi < 0) k_hi = n;
  return {double(k_lo) / n, double(k_hi) / n};
}

const PowerPoint& PowerCurve::at(Method method, std::size_t m) const {
  for (const PowerPoint& pt : points) {
    if (pt.method == method && pt.m == m) return pt;
  }
  throw MissingInputError("PowerCurve: no point for " + std::string(method_name(method)) +
                          " at m=" + std::to_string(m));
}

void parallel_for_jobs(int threads, std::size_t n_jobs,
                       const std::function<void(std::size_t)>& job) {
  if (threads <= 1 || n_jobs <= 1) {
    for (std::size_t j = 0; j < n_jobs; ++j) job(j);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&]() {
    while (true) {
      const std::size_t j = next.fetch_add(1);
      if (j >= n_jobs) return;
      try {
        job(j);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int n_threads = static_cast<int>(std::min<std::size_t>(threads, n_jobs));
  pool.reserve(static_cast<std::size_t>(n_threads));
  for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

namespace {

void check_fold_hygiene(const TrainedArtifacts& artifacts, const SampleSet& pool) {
  for (const Example& ex : pool.examples) {
    if (artifacts.training_origins.contains(ex.origin)) {
      throw DataError("fold hygiene violation: test pool '" + pool.provenance +
                      "' contains an example used in training");
    }
  }
}

stats::TestOutcome run_one_test(Method method, const TrainedArtifacts& artifacts,
                                const SampleSet& x, const SampleSet& y, double alpha,
                                int n_permutations, std::uint64_t seed) {
  stats::PermutationConfig pc{n_permutations, alpha, seed};
  switch (method) {
    case Method::c2st:
      if (!artifacts.domain_net) throw MissingInputError("c2st requested without a domain net");
      return stats::c2st_test(x, y, *artifacts.domain_net, pc);
    case Method::mmdd:
      if (!artifacts.kernel) throw MissingInputError("mmdd requested without a trained kernel");
      return stats::mmd_test(x, y, *artifacts.kernel, pc);
    case Method::muks:
      if (!artifacts.task_net) throw MissingInputError("muks requested without a task net");
      return stats::muks_outcome(stats::muks_test(x, y, *artifacts.task_net, alpha), x.size(),
                                 seed);
  }
  throw ConfigError("run_one_test: unreachable method");
}

PowerResult run_protocol(const ExperimentConfig& cfg, const TrainedArtifacts& artifacts,
                         const SampleSet& x_pool, const SampleSet& y_pool,
                         std::uint64_t branch_root) {
  cfg.validate();
  if (x_pool.empty() || y_pool.empty()) throw DataError("power protocol: empty test pool");
  check_fold_hygiene(artifacts, x_pool);
  check_fold_hygiene(artifacts, y_pool);

  const std::size_t n_sizes = cfg.sample_sizes.size();
  const auto reps = static_cast<std::size_t>(cfg.repetitions);
  const std::size_t n_methods = cfg.methods.size();

  PowerResult result;
  result.outcomes.resize(n_sizes * reps * n_methods);

  parallel_for_jobs(cfg.threads, n_sizes * reps, [&](std::size_t j) {
    const std::size_t mi = j / reps;
    const std::size_t r = j % reps;
    const std::size_t m = cfg.sample_sizes[mi];
    const std::uint64_t mu = static_cast<std::uint64_t>(m);
    const std::uint64_t ru = static_cast<std::uint64_t>(r);

    const SampleSet x = draw_with_replacement(x_pool, m, derive_seed(branch_root, {mu, ru, 0}));
    const SampleSet y = draw_with_replacement(y_pool, m, derive_seed(branch_root, {mu, ru, 1}));

    for (std::size_t k = 0; k < n_methods; ++k) {
      const Method method = cfg.methods[k];
      const std::uint64_t seed = derive_seed(branch_root, {mu, ru, 2 + method_slot(method)});
      RunOutcome& slot = result.outcomes[(mi * reps + r) * n_methods + k];
      slot.method = method;
      slot.m = m;
      slot.repetition = static_cast<int>(r);
      slot.outcome = run_one_test(method, artifacts, x, y, cfg.alpha, cfg.n_permutations, seed);
    }
  });

  for (std::size_t mi = 0; mi < n_sizes; ++mi) {
    for (std::size_t k = 0; k < n_methods; ++k) {
      PowerPoint pt;
      pt.method = cfg.methods[k];
      pt.m = cfg.sample_sizes[mi];
      pt.repetitions = cfg.repetitions;
      for (std::size_t r = 0; r < reps; ++r) {
        pt.rejected += result.outcomes[(mi * reps + r) * n_methods + k].outcome.reject ? 1 : 0;
      }
      pt.rate = double(pt.rejected) / double(pt.repetitions);
      pt.ci = wilson_interval(pt.rejected, pt.repetitions);
      result.curve.points.push_back(pt);
    }
  }
  return result;
}

}  // namespace

PowerResult estimate_power(const ExperimentConfig& cfg, const TrainedArtifacts& artifacts,
                           const SampleSet& p_test, const SampleSet& q_test,
                           std::uint64_t root_seed) {
  return run_protocol(cfg, artifacts, p_test, q_test, derive_seed(root_seed, {1}));
}

PowerResult estimate_type1(const ExperimentConfig& cfg, const TrainedArtifacts& artifacts,
                           const SampleSet& p_test, std::uint64_t root_seed) {
  return run_protocol(cfg, artifacts, p_test, p_test, derive_seed(root_seed, {2}));
}

}  // namespace subshift::harness
