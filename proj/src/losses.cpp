#include "subshift/losses.hpp"

#include <cmath>

#include "subshift/errors.hpp"

namespace subshift::nn {

namespace {

Eigen::MatrixXd stack_features(const MlpParams& net, std::span<const Example> batch) {
  if (batch.empty()) throw DataError("loss: empty batch");
  Eigen::MatrixXd X(static_cast<Eigen::Index>(batch.size()), net.input_dim());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (batch[i].features.size() != net.input_dim()) {
      throw ShapeError("loss: example dim " + std::to_string(batch[i].features.size()) +
                       " != net input dim " + std::to_string(net.input_dim()));
    }
    X.row(static_cast<Eigen::Index>(i)) = batch[i].features.transpose();
  }
  return X;
}

int checked_label(const Example& ex, Eigen::Index out_dim) {
  const int y = ex.class_label;
  const int limit = out_dim == 1 ? 2 : static_cast<int>(out_dim);
  if (y == kNoLabel || y < 0 || y >= limit) {
    throw DataError("loss: class label " + std::to_string(y) + " invalid for output dim " +
                    std::to_string(out_dim));
  }
  return y;
}

/// Loss and d(loss)/d(logits) for one batch; shared by value and grad paths.
double loss_and_dlogits(const MlpParams& net, std::span<const Example> batch,
                        const Eigen::MatrixXd& logits, Eigen::MatrixXd* d_logits) {
  const auto n = static_cast<Eigen::Index>(batch.size());
  const Eigen::Index out = net.output_dim();
  const double inv_n = 1.0 / static_cast<double>(n);
  double loss = 0.0;

  if (out == 1) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const int y = checked_label(batch[static_cast<std::size_t>(i)], out);
      const double z = logits(i, 0);
      loss += std::max(z, 0.0) - y * z + std::log1p(std::exp(-std::abs(z)));
      if (d_logits) {
        const double sig = 1.0 / (1.0 + std::exp(-z));
        (*d_logits)(i, 0) = (sig - y) * inv_n;
      }
    }
  } else {
    for (Eigen::Index i = 0; i < n; ++i) {
      const int y = checked_label(batch[static_cast<std::size_t>(i)], out);
      const double mx = logits.row(i).maxCoeff();
      const double lse = mx + std::log((logits.row(i).array() - mx).exp().sum());
      loss += lse - logits(i, y);
      if (d_logits) {
        d_logits->row(i) = (logits.row(i).array() - lse).exp() * inv_n;
        (*d_logits)(i, y) -= inv_n;
      }
    }
  }
  return loss * inv_n;
}

}  // namespace

Gradients Gradients::zeros_like(const MlpParams& net) {
  Gradients g;
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    g.d_weights.emplace_back(Eigen::MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols()));
    g.d_biases.emplace_back(Eigen::VectorXd::Zero(net.biases[l].size()));
  }
  return g;
}

ForwardCache forward_cached(const MlpParams& net, const Eigen::MatrixXd& X) {
  if (X.cols() != net.input_dim()) {
    throw ShapeError("forward_cached: input dim " + std::to_string(X.cols()) + " != " +
                     std::to_string(net.input_dim()));
  }
  ForwardCache cache;
  cache.input = X;
  const Eigen::MatrixXd* a = &cache.input;
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    Eigen::MatrixXd z = (*a) * net.weights[l].transpose();
    z.rowwise() += net.biases[l].transpose();
    cache.pre.push_back(std::move(z));
    if (l + 1 < net.layer_count()) {
      cache.act.push_back(cache.pre.back().cwiseMax(0.0));
      a = &cache.act.back();
    }
  }
  return cache;
}

Gradients backward(const MlpParams& net, const ForwardCache& cache,
                   const Eigen::MatrixXd& d_output) {
  const std::size_t layers = net.layer_count();
  Gradients g;
  g.d_weights.resize(layers);
  g.d_biases.resize(layers);

  Eigen::MatrixXd dz = d_output;
  for (std::size_t l = layers; l-- > 0;) {
    const Eigen::MatrixXd& a_prev = (l == 0) ? cache.input : cache.act[l - 1];
    g.d_weights[l] = dz.transpose() * a_prev;
    g.d_biases[l] = dz.colwise().sum().transpose();
    if (l > 0) {
      Eigen::MatrixXd da = dz * net.weights[l];
      dz = da.cwiseProduct((cache.pre[l - 1].array() > 0.0).cast<double>().matrix());
    }
  }
  return g;
}

LossGrad cross_entropy_loss_and_grad(const MlpParams& net, std::span<const Example> batch) {
  const Eigen::MatrixXd X = stack_features(net, batch);
  const ForwardCache cache = forward_cached(net, X);
  Eigen::MatrixXd d_logits(X.rows(), net.output_dim());
  LossGrad out;
  out.loss = loss_and_dlogits(net, batch, cache.output(), &d_logits);
  out.grads = backward(net, cache, d_logits);
  return out;
}

double cross_entropy_loss(const MlpParams& net, std::span<const Example> batch) {
  const Eigen::MatrixXd X = stack_features(net, batch);
  const ForwardCache cache = forward_cached(net, X);
  return loss_and_dlogits(net, batch, cache.output(), nullptr);
}

double classification_accuracy(const MlpParams& net, std::span<const Example> batch) {
  const Eigen::MatrixXd X = stack_features(net, batch);
  const ForwardCache cache = forward_cached(net, X);
  const Eigen::MatrixXd& logits = cache.output();
  std::size_t correct = 0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const int y = checked_label(batch[static_cast<std::size_t>(i)], net.output_dim());
    int pred;
    if (net.output_dim() == 1) {
      pred = logits(i, 0) > 0.0 ? 1 : 0;
    } else {
      Eigen::Index arg;
      logits.row(i).maxCoeff(&arg);
      pred = static_cast<int>(arg);
    }
    correct += (pred == y);
  }
  return static_cast<double>(correct) / static_cast<double>(batch.size());
}

}  // namespace subshift::nn
