#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "subshift/adam.hpp"
#include "subshift/checkpoint.hpp"
#include "subshift/errors.hpp"
#include "subshift/losses.hpp"
#include "subshift/mlp.hpp"
#include "subshift/rng.hpp"
#include "subshift/train.hpp"

using namespace subshift;
using namespace subshift::nn;

namespace {

std::vector<double*> parameter_view(MlpParams& net) {
  std::vector<double*> view;
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    for (Eigen::Index i = 0; i < net.weights[l].size(); ++i) {
      view.push_back(net.weights[l].data() + i);
    }
    for (Eigen::Index i = 0; i < net.biases[l].size(); ++i) {
      view.push_back(net.biases[l].data() + i);
    }
  }
  return view;
}

std::vector<double> gradient_vector(const Gradients& g) {
  std::vector<double> flat;
  for (std::size_t l = 0; l < g.d_weights.size(); ++l) {
    flat.insert(flat.end(), g.d_weights[l].data(), g.d_weights[l].data() + g.d_weights[l].size());
    flat.insert(flat.end(), g.d_biases[l].data(), g.d_biases[l].data() + g.d_biases[l].size());
  }
  return flat;
}

/// Random net/batch pair whose hidden pre-activations stay away from the
/// ReLU kink, so central differences are trustworthy.
struct GradCheckInstance {
  MlpParams net;
  std::vector<Example> batch;
};

GradCheckInstance make_instance(std::uint64_t seed, Eigen::Index out_dim) {
  Rng rng(seed);
  for (int attempt = 0; attempt < 100; ++attempt) {
    const Eigen::Index d = 3 + static_cast<Eigen::Index>(rng.uniform_int(3));
    const Eigen::Index h = 4 + static_cast<Eigen::Index>(rng.uniform_int(3));
    MlpParams net = MlpParams::kaiming({d, h, out_dim}, rng.next_u64());
    for (auto& b : net.biases) {
      for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = 0.3 * rng.normal();
    }
    std::vector<Example> batch(3 + rng.uniform_int(4));
    const int labels = out_dim == 1 ? 2 : static_cast<int>(out_dim);
    for (Example& ex : batch) {
      ex.features = FeatureVector(d);
      for (Eigen::Index i = 0; i < d; ++i) ex.features[i] = rng.normal();
      ex.class_label = static_cast<int>(rng.uniform_int(labels));
    }

    Eigen::MatrixXd x(static_cast<Eigen::Index>(batch.size()), d);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      x.row(static_cast<Eigen::Index>(i)) = batch[i].features.transpose();
    }
    const ForwardCache cache = forward_cached(net, x);
    double min_abs = 1e9;
    for (std::size_t l = 0; l + 1 < cache.pre.size(); ++l) {
      min_abs = std::min(min_abs, cache.pre[l].cwiseAbs().minCoeff());
    }
    if (min_abs > 1e-3) return {std::move(net), std::move(batch)};
  }
  FAIL("could not build a kink-free gradient-check instance");
  return {};
}

double norm_relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  REQUIRE(a.size() == b.size());
  double diff = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nb), 1e-12});
}

}  // namespace

TEST_CASE("forward: zero parameters give zero output") {
  const MlpParams net = MlpParams::zeros({3, 4, 2});
  const Eigen::VectorXd out = forward(net, Eigen::Vector3d(1.0, -2.0, 3.0));
  CHECK(out.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("forward: single linear layer is Wx + b") {
  MlpParams net = MlpParams::zeros({2, 2});
  net.weights[0] << 1.0, 2.0, 3.0, 4.0;
  net.biases[0] << 0.5, -0.5;
  const Eigen::VectorXd out = forward(net, Eigen::Vector2d(1.0, 1.0));
  CHECK(out[0] == doctest::Approx(3.5).epsilon(1e-15));
  CHECK(out[1] == doctest::Approx(6.5).epsilon(1e-15));
}

TEST_CASE("forward: two-layer net matches the hand-computed value") {
  // x = (1,-1); z1 = (0.5*1 - 0.5*(-1), 1*1 + 1*(-1) - 1) = (1, -1)
  // relu -> (1, 0); out = 2*1 + 3*0 + 0.5 = 2.5
  MlpParams net = MlpParams::zeros({2, 2, 1});
  net.weights[0] << 0.5, -0.5, 1.0, 1.0;
  net.biases[0] << 0.0, -1.0;
  net.weights[1] << 2.0, 3.0;
  net.biases[1] << 0.5;
  const Eigen::VectorXd out = forward(net, Eigen::Vector2d(1.0, -1.0));
  CHECK(out[0] == doctest::Approx(2.5).epsilon(1e-15));
}

TEST_CASE("forward rejects dimension mismatches") {
  const MlpParams net = MlpParams::zeros({3, 2});
  CHECK_THROWS_AS((void)forward(net, Eigen::Vector2d(1.0, 2.0)), ShapeError);
}

TEST_CASE("softmax: symmetry, limits and a scalar evaluation") {
  const Eigen::VectorXd equal = softmax(Eigen::Vector4d(2.0, 2.0, 2.0, 2.0));
  for (int i = 0; i < 4; ++i) CHECK(equal[i] == doctest::Approx(0.25).epsilon(1e-14));

  const Eigen::VectorXd extreme = softmax(Eigen::Vector2d(0.0, 40.0));
  CHECK(extreme[1] > 1.0 - 1e-12);

  const Eigen::VectorXd v = softmax(Eigen::Vector3d(1.0, 2.0, 3.0));
  CHECK(std::abs(v[0] - 0.09003057317038046) < 1e-15);
  CHECK(std::abs(v[1] - 0.24472847105479764) < 1e-15);
  CHECK(std::abs(v[2] - 0.6652409557748218) < 1e-15);
}

TEST_CASE("softmax: sums to one and shift-invariant within 1e-12") {
  Rng rng(31);
  for (int rep = 0; rep < 50; ++rep) {
    Eigen::VectorXd z(5);
    for (int i = 0; i < 5; ++i) z[i] = 10.0 * rng.normal();
    const Eigen::VectorXd p = softmax(z);
    CHECK(std::abs(p.sum() - 1.0) < 1e-12);
    CHECK(p.minCoeff() > 0.0);
    const Eigen::VectorXd shifted = softmax(z.array() + 123.456);
    CHECK((p - shifted).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("cross entropy of a zero net is ln C") {
  const MlpParams net = MlpParams::zeros({4, 5});
  std::vector<Example> batch(3);
  for (std::size_t i = 0; i < 3; ++i) {
    batch[i].features = FeatureVector::Constant(4, 0.3);
    batch[i].class_label = static_cast<int>(i);
  }
  CHECK(cross_entropy_loss(net, batch) == doctest::Approx(std::log(5.0)).epsilon(1e-12));
}

TEST_CASE("output-layer bias gradient is softmax minus one-hot") {
  MlpParams net = MlpParams::kaiming({3, 4}, 99);
  Example ex;
  ex.features = Eigen::Vector3d(0.2, -0.4, 0.9);
  ex.class_label = 2;
  const LossGrad lg = cross_entropy_loss_and_grad(net, std::vector<Example>{ex});
  const Eigen::VectorXd probs = softmax(forward(net, ex.features));
  for (int c = 0; c < 4; ++c) {
    const double expected = probs[c] - (c == 2 ? 1.0 : 0.0);
    CHECK(lg.grads.d_biases[0][c] == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("invalid labels are rejected") {
  const MlpParams net = MlpParams::zeros({2, 3});
  Example ex;
  ex.features = Eigen::Vector2d(0.0, 0.0);
  ex.class_label = 3;
  CHECK_THROWS_AS((void)cross_entropy_loss(net, std::vector<Example>{ex}), DataError);
  ex.class_label = kNoLabel;
  CHECK_THROWS_AS((void)cross_entropy_loss(net, std::vector<Example>{ex}), DataError);
}

TEST_CASE("analytic gradients match central finite differences") {
  const double h = 1e-5;
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 24; ++seed) {
    const Eigen::Index out_dim = (seed % 2 == 0) ? 3 + Eigen::Index(seed % 3) : 1;
    GradCheckInstance inst = make_instance(1000 + seed, out_dim);

    const LossGrad lg = cross_entropy_loss_and_grad(inst.net, inst.batch);
    const std::vector<double> analytic = gradient_vector(lg.grads);

    std::vector<double*> params = parameter_view(inst.net);
    std::vector<double> fd(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double saved = *params[i];
      *params[i] = saved + h;
      const double up = cross_entropy_loss(inst.net, inst.batch);
      *params[i] = saved - h;
      const double down = cross_entropy_loss(inst.net, inst.batch);
      *params[i] = saved;
      fd[i] = (up - down) / (2.0 * h);
    }
    CHECK(norm_relative_error(analytic, fd) < 1e-4);
    ++checked;
  }
  CHECK(checked >= 20);
}

TEST_CASE("adam: zero gradient leaves parameters unchanged") {
  MlpParams net = MlpParams::kaiming({2, 3, 1}, 5);
  const MlpParams before = net;
  AdamState state = AdamState::init(net, 0.01);
  adam_step(net, Gradients::zeros_like(net), state);
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    CHECK(net.weights[l] == before.weights[l]);
    CHECK(net.biases[l] == before.biases[l]);
  }
}

TEST_CASE("adam: first-step magnitude is about lr") {
  MlpParams net = MlpParams::zeros({1, 1});
  AdamState state = AdamState::init(net, 0.1);
  Gradients g = Gradients::zeros_like(net);
  g.d_weights[0](0, 0) = 2.0;
  adam_step(net, g, state);
  // m_hat = g, v_hat = g^2: step = lr * g / (|g| + eps)
  CHECK(net.weights[0](0, 0) == doctest::Approx(-0.1).epsilon(1e-7));
}

TEST_CASE("adam trajectories are bitwise deterministic") {
  auto run = [] {
    MlpParams net = MlpParams::kaiming({3, 4, 2}, 77);
    AdamState state = AdamState::init(net, 1e-3);
    Rng rng(123);
    for (int step = 0; step < 25; ++step) {
      Gradients g = Gradients::zeros_like(net);
      for (auto& dw : g.d_weights) {
        for (Eigen::Index i = 0; i < dw.size(); ++i) *(dw.data() + i) = rng.normal();
      }
      for (auto& db : g.d_biases) {
        for (Eigen::Index i = 0; i < db.size(); ++i) *(db.data() + i) = rng.normal();
      }
      adam_step(net, g, state);
    }
    return net;
  };
  const MlpParams a = run();
  const MlpParams b = run();
  for (std::size_t l = 0; l < a.layer_count(); ++l) {
    CHECK(a.weights[l] == b.weights[l]);
    CHECK(a.biases[l] == b.biases[l]);
  }
}

namespace {

SampleSet cluster_set(std::size_t n, double center, int label, std::uint64_t seed,
                      const char* provenance) {
  Rng rng(seed);
  SampleSet set;
  set.dimension = 2;
  set.class_count = 2;
  set.provenance = provenance;
  for (std::size_t i = 0; i < n; ++i) {
    Example ex;
    ex.features = Eigen::Vector2d(center + 0.3 * rng.normal(), center + 0.3 * rng.normal());
    ex.class_label = label;
    ex.origin = derive_seed(seed, {i});
    set.examples.push_back(std::move(ex));
  }
  return set;
}

SampleSet merge(SampleSet a, const SampleSet& b) {
  a.examples.insert(a.examples.end(), b.examples.begin(), b.examples.end());
  return a;
}

}  // namespace

TEST_CASE("task training separates two clusters") {
  const SampleSet train = merge(cluster_set(100, -1.0, 0, 1, "train"),
                                cluster_set(100, 1.0, 1, 2, "train"));
  const SampleSet val = merge(cluster_set(50, -1.0, 0, 3, "val"),
                              cluster_set(50, 1.0, 1, 4, "val"));
  TrainConfig cfg;
  cfg.max_epochs = 30;
  cfg.hidden_dims = {8};
  cfg.seed = 5;
  const TrainResult r = train_task_classifier(train, val, cfg);
  CHECK(r.val_accuracy >= 0.95);
  CHECK(r.best_epoch >= 0);
}

TEST_CASE("domain training on identical pools stays near chance") {
  SampleSet pool = merge(cluster_set(150, 0.0, 0, 10, "pool"), cluster_set(150, 0.5, 1, 11, "pool"));
  SampleSet val_pool = merge(cluster_set(100, 0.0, 0, 12, "vpool"),
                             cluster_set(100, 0.5, 1, 13, "vpool"));
  TrainConfig cfg;
  cfg.max_epochs = 15;
  cfg.hidden_dims = {8};
  cfg.seed = 6;
  // same pool on both sides: domains are indistinguishable
  const TrainResult r = train_domain_classifier(pool, pool, val_pool, val_pool, cfg);
  CHECK(std::abs(r.val_accuracy - 0.5) < 5.0 * std::sqrt(0.25 / 400.0));
}

TEST_CASE("domain training separates disjoint clusters") {
  const SampleSet p = cluster_set(150, -1.0, 0, 20, "P/train");
  const SampleSet q = cluster_set(150, 1.0, 0, 21, "Q/train");
  const SampleSet pv = cluster_set(60, -1.0, 0, 22, "P/val");
  const SampleSet qv = cluster_set(60, 1.0, 0, 23, "Q/val");
  TrainConfig cfg;
  cfg.max_epochs = 30;
  cfg.hidden_dims = {8};
  cfg.seed = 7;
  const TrainResult r = train_domain_classifier(p, q, pv, qv, cfg);
  CHECK(r.val_accuracy >= 0.95);
}

TEST_CASE("zero epochs returns the initialized parameters") {
  const SampleSet train = merge(cluster_set(40, -1.0, 0, 30, "t"), cluster_set(40, 1.0, 1, 31, "t"));
  const SampleSet val = merge(cluster_set(20, -1.0, 0, 32, "v"), cluster_set(20, 1.0, 1, 33, "v"));
  TrainConfig cfg;
  cfg.max_epochs = 0;
  cfg.hidden_dims = {4};
  cfg.seed = 8;
  const TrainResult r = train_task_classifier(train, val, cfg);
  const MlpParams init = MlpParams::kaiming({2, 4, 2}, derive_seed(cfg.seed, {0}));
  for (std::size_t l = 0; l < r.net.layer_count(); ++l) {
    CHECK(r.net.weights[l] == init.weights[l]);
    CHECK(r.net.biases[l] == init.biases[l]);
  }
}

TEST_CASE("training is deterministic and returns the best recorded checkpoint") {
  const SampleSet train = merge(cluster_set(60, -0.5, 0, 40, "t"), cluster_set(60, 0.5, 1, 41, "t"));
  const SampleSet val = merge(cluster_set(30, -0.5, 0, 42, "v"), cluster_set(30, 0.5, 1, 43, "v"));
  TrainConfig cfg;
  cfg.max_epochs = 12;
  cfg.hidden_dims = {6};
  cfg.seed = 9;
  const TrainResult a = train_task_classifier(train, val, cfg);
  const TrainResult b = train_task_classifier(train, val, cfg);
  for (std::size_t l = 0; l < a.net.layer_count(); ++l) {
    CHECK(a.net.weights[l] == b.net.weights[l]);
  }
  REQUIRE_FALSE(a.log.empty());
  double min_val = a.log.front().val_loss;
  for (const auto& e : a.log) min_val = std::min(min_val, e.val_loss);
  CHECK(a.best_val_loss == min_val);
}

TEST_CASE("task training requires class labels") {
  SampleSet train = cluster_set(40, 0.0, 0, 50, "t");
  train.class_count = kNoLabel;
  for (auto& ex : train.examples) ex.class_label = kNoLabel;
  const SampleSet val = cluster_set(20, 0.0, 0, 51, "v");
  TrainConfig cfg;
  cfg.hidden_dims = {4};
  CHECK_THROWS_AS((void)train_task_classifier(train, val, cfg), DataError);
}

TEST_CASE("checkpoints round-trip bitwise") {
  const MlpParams net = MlpParams::kaiming({5, 7, 3}, 60);
  const auto dir = std::filesystem::temp_directory_path() / "subshift_ckpt_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "net.ckpt";
  save_mlp(path, net);
  const MlpParams loaded = load_mlp(path);
  REQUIRE(loaded.layer_dims == net.layer_dims);
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    CHECK(loaded.weights[l] == net.weights[l]);
    CHECK(loaded.biases[l] == net.biases[l]);
  }

  const auto path2 = dir / "net2.ckpt";
  save_mlp(path2, loaded);
  std::ifstream f1(path, std::ios::binary), f2(path2, std::ios::binary);
  const std::string b1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
  const std::string b2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
  CHECK(b1 == b2);

  std::ofstream bad(dir / "bad.ckpt", std::ios::binary);
  bad << "NOTACKPT";
  bad.close();
  CHECK_THROWS_AS((void)load_mlp(dir / "bad.ckpt"), DataError);
  std::filesystem::remove_all(dir);
}
