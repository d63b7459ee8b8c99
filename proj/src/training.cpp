#include "dcepcc/training.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "dcepcc/rng.hpp"

namespace dcepcc {

void TrainConfig::validate() const {
  auto bad = [](bool cond, const char* msg) {
    if (cond) throw std::invalid_argument(std::string("TrainConfig: ") + msg);
  };
  bad(!(lambda >= 0.0) || !std::isfinite(lambda), "lambda must be finite and >= 0");
  bad(!(eta >= 0.0) || !std::isfinite(eta), "eta must be finite and >= 0");
  bad(!(kappa >= 0.0) || !std::isfinite(kappa), "kappa must be finite and >= 0");
  bad(!std::isfinite(margin_delta), "margin_delta must be finite");
  bad(!(lr > 0.0) || !std::isfinite(lr), "lr must be finite and > 0");
  bad(!(momentum >= 0.0 && momentum < 1.0), "momentum must lie in [0, 1)");
  bad(!(weight_decay >= 0.0) || !std::isfinite(weight_decay), "weight_decay must be >= 0");
  bad(batch_size < 1, "batch_size must be >= 1");
  bad(epochs < 1, "epochs must be >= 1");
  bad(!(center_lr > 0.0 && center_lr <= 1.0), "center_lr must lie in (0, 1]");
}

double margin_hinge(double g_true, double g_other, double delta) {
  const double h = delta - (g_true - g_other);
  return h > 0.0 ? h : 0.0;
}

double compactness_penalty(const ConicHead& head, double kappa) {
  double total = 0.0;
  for (int c = 0; c < head.num_classes(); ++c) {
    for (int m = 0; m < head.feature_dim(); ++m) {
      const double slack = -head.gamma_tilde[c][m] - std::abs(head.w_tilde[c][m]);
      const double viol = kappa - slack;
      if (viol > 0.0) total += viol;
    }
  }
  return total;
}

HeadGrads HeadGrads::zeros_like(const ConicHead& head) {
  HeadGrads g;
  const int dim = head.feature_dim();
  g.w_tilde.assign(head.num_classes(), std::vector<double>(dim, 0.0));
  g.gamma_tilde.assign(head.num_classes(), std::vector<double>(dim, 0.0));
  g.b.assign(head.num_classes(), 0.0);
  return g;
}

ModelGrads ModelGrads::zeros_like(const FeatureNet& net, const ConicHead& head) {
  return ModelGrads{NetGrads::zeros_like(net), HeadGrads::zeros_like(head)};
}

void ModelGrads::scale(double factor) {
  for (auto& w : net.weights) {
    for (double& v : w.data) v *= factor;
  }
  for (auto& b : net.biases) {
    for (double& v : b) v *= factor;
  }
  for (auto& row : head.w_tilde) {
    for (double& v : row) v *= factor;
  }
  for (auto& row : head.gamma_tilde) {
    for (double& v : row) v *= factor;
  }
  for (double& v : head.b) v *= factor;
}

namespace {

inline double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

BatchEval loss_and_gradients(const std::vector<std::vector<double>>& xs,
                             const std::vector<int>& ys, const FeatureNet& net,
                             const ConicHead& head, const TrainConfig& cfg) {
  if (xs.empty()) throw std::invalid_argument("loss_and_gradients: empty batch");
  if (xs.size() != ys.size()) {
    throw std::invalid_argument("loss_and_gradients: features/labels mismatch");
  }
  const int classes = head.num_classes();
  const int dim = head.feature_dim();

  BatchEval out;
  out.grads = ModelGrads::zeros_like(net, head);
  out.features.reserve(xs.size());
  out.predictions.reserve(xs.size());

  ForwardCache cache;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const int y = ys[i];
    if (y < 0 || y >= classes) {
      throw std::invalid_argument("loss_and_gradients: label " + std::to_string(y) +
                                  " out of range");
    }
    const std::vector<double> f = net_forward(net, xs[i], &cache);
    const std::vector<double> g = head_scores(head, f);
    out.predictions.push_back(argmax(g));

    std::vector<double> dfeature(dim, 0.0);
    bool any_active = false;
    std::vector<double> grad_true;  // dg_y/df, computed once on first use
    for (int j = 0; j < classes; ++j) {
      if (j == y) continue;
      const double h = cfg.margin_delta - (g[y] - g[j]);
      if (h <= 0.0) continue;  // boundary counts as inactive
      out.loss.margin += h;
      if (!any_active) {
        grad_true = head_input_gradient(head, f, y);
        any_active = true;
      }
      // d(loss)/dg_y = -1 and d(loss)/dg_j = +1 per active pair.
      for (int m = 0; m < dim; ++m) {
        const double dy = f[m] - head.centers[y][m];
        const double dj = f[m] - head.centers[j][m];
        out.grads.head.w_tilde[y][m] -= dy;
        out.grads.head.gamma_tilde[y][m] -= std::abs(dy);
        out.grads.head.w_tilde[j][m] += dj;
        out.grads.head.gamma_tilde[j][m] += std::abs(dj);
      }
      out.grads.head.b[y] -= 1.0;
      out.grads.head.b[j] += 1.0;
      const std::vector<double> grad_other = head_input_gradient(head, f, j);
      for (int m = 0; m < dim; ++m) dfeature[m] += grad_other[m] - grad_true[m];
    }
    if (any_active) net_backward(net, cache, dfeature, out.grads.net);
    out.features.push_back(f);
  }

  for (int c = 0; c < classes; ++c) {
    for (int m = 0; m < dim; ++m) {
      const double w = head.w_tilde[c][m];
      out.loss.reg += 0.5 * cfg.lambda * w * w;
      out.grads.head.w_tilde[c][m] += cfg.lambda * w;
      const double slack = -head.gamma_tilde[c][m] - std::abs(w);
      const double viol = cfg.kappa - slack;
      if (viol > 0.0) {
        out.loss.compact += cfg.eta * viol;
        out.grads.head.gamma_tilde[c][m] += cfg.eta;
        out.grads.head.w_tilde[c][m] += cfg.eta * sgn(w);
      }
    }
  }
  out.loss.total = out.loss.reg + out.loss.margin + out.loss.compact;
  return out;
}

void sgd_update(double* param, const double* grad, double* velocity, std::size_t n,
                double lr, double momentum, double weight_decay) {
  for (std::size_t i = 0; i < n; ++i) {
    velocity[i] = momentum * velocity[i] - lr * (grad[i] + weight_decay * param[i]);
    param[i] += velocity[i];
  }
}

SgdState SgdState::zeros_like(const FeatureNet& net, const ConicHead& head) {
  return SgdState{ModelGrads::zeros_like(net, head)};
}

void sgd_step(FeatureNet& net, ConicHead& head, const ModelGrads& grads,
              SgdState& state, const TrainConfig& cfg, double lr) {
  for (int l = 0; l < net.num_layers(); ++l) {
    sgd_update(net.weights[l].data.data(), grads.net.weights[l].data.data(),
               state.velocity.net.weights[l].data.data(), net.weights[l].data.size(),
               lr, cfg.momentum, cfg.weight_decay);
    sgd_update(net.biases[l].data(), grads.net.biases[l].data(),
               state.velocity.net.biases[l].data(), net.biases[l].size(), lr,
               cfg.momentum, 0.0);
  }
  for (int c = 0; c < head.num_classes(); ++c) {
    sgd_update(head.w_tilde[c].data(), grads.head.w_tilde[c].data(),
               state.velocity.head.w_tilde[c].data(), head.w_tilde[c].size(), lr,
               cfg.momentum, cfg.weight_decay);
    sgd_update(head.gamma_tilde[c].data(), grads.head.gamma_tilde[c].data(),
               state.velocity.head.gamma_tilde[c].data(), head.gamma_tilde[c].size(),
               lr, cfg.momentum, 0.0);
  }
  sgd_update(head.b.data(), grads.head.b.data(), state.velocity.head.b.data(),
             head.b.size(), lr, cfg.momentum, 0.0);
}

void update_centers(ConicHead& head, const std::vector<std::vector<double>>& features,
                    const std::vector<int>& labels, double center_lr) {
  if (features.size() != labels.size()) {
    throw std::invalid_argument("update_centers: features/labels mismatch");
  }
  const int dim = head.feature_dim();
  if (head.shared_vertex) {
    if (features.empty()) return;
    std::vector<double> delta(dim, 0.0);
    for (const auto& f : features) {
      for (int m = 0; m < dim; ++m) delta[m] += head.centers[0][m] - f[m];
    }
    const double denom = 1.0 + static_cast<double>(features.size());
    std::vector<double> vertex = head.centers[0];
    for (int m = 0; m < dim; ++m) vertex[m] -= center_lr * delta[m] / denom;
    for (auto& row : head.centers) row = vertex;
    return;
  }
  std::vector<int> counts(head.num_classes(), 0);
  std::vector<std::vector<double>> delta(head.num_classes(),
                                         std::vector<double>(dim, 0.0));
  for (std::size_t i = 0; i < features.size(); ++i) {
    const int y = labels[i];
    if (y < 0 || y >= head.num_classes()) {
      throw std::invalid_argument("update_centers: label out of range");
    }
    ++counts[y];
    for (int m = 0; m < dim; ++m) delta[y][m] += head.centers[y][m] - features[i][m];
  }
  for (int c = 0; c < head.num_classes(); ++c) {
    if (counts[c] == 0) continue;
    const double denom = 1.0 + static_cast<double>(counts[c]);
    for (int m = 0; m < dim; ++m) {
      head.centers[c][m] -= center_lr * delta[c][m] / denom;
    }
  }
}

namespace {

// Learning rate with the x0.1 step decays at 60% and 85% of the epoch budget.
double scheduled_lr(const TrainConfig& cfg, int epoch) {
  const int first = (cfg.epochs * 60 + 99) / 100;
  const int second = (cfg.epochs * 85 + 99) / 100;
  double lr = cfg.lr;
  if (epoch >= first) lr *= 0.1;
  if (epoch >= second) lr *= 0.1;
  return lr;
}

}  // namespace

std::vector<EpochStats> fit(const Dataset& train, FeatureNet& net, ConicHead& head,
                            const TrainConfig& cfg, const EpochCallback& callback) {
  cfg.validate();
  train.validate();  // also rejects datasets with an empty class
  if (train.num_classes != head.num_classes()) {
    throw std::invalid_argument("fit: dataset classes != head classes");
  }
  if (train.input_dim() != net.input_dim()) {
    throw std::invalid_argument("fit: dataset dim != net input dim");
  }

  SgdState state = SgdState::zeros_like(net, head);
  Rng shuffle_rng(Rng::mix(cfg.seed, 0x0ff1e));
  const int n = train.size();
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;

  std::vector<EpochStats> history;
  history.reserve(cfg.epochs);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = scheduled_lr(cfg, epoch);
    shuffle_rng.shuffle(order);

    LossBreakdown epoch_loss;
    int batches = 0;
    for (int start = 0; start < n; start += cfg.batch_size) {
      const int stop = std::min(start + cfg.batch_size, n);
      const int m = stop - start;
      std::vector<std::vector<double>> xs;
      std::vector<int> ys;
      xs.reserve(m);
      ys.reserve(m);
      for (int k = start; k < stop; ++k) {
        xs.push_back(train.features[order[k]]);
        ys.push_back(train.labels[order[k]]);
      }
      BatchEval eval = loss_and_gradients(xs, ys, net, head, cfg);
      // Normalize by batch size so the step scale does not depend on it.
      eval.grads.scale(1.0 / static_cast<double>(m));
      sgd_step(net, head, eval.grads, state, cfg, lr);
      update_centers(head, eval.features, ys, cfg.center_lr);

      const double inv = 1.0 / static_cast<double>(m);
      epoch_loss.reg += eval.loss.reg * inv;
      epoch_loss.margin += eval.loss.margin * inv;
      epoch_loss.compact += eval.loss.compact * inv;
      epoch_loss.total += eval.loss.total * inv;
      ++batches;
    }
    const double inv_batches = 1.0 / static_cast<double>(batches);
    epoch_loss.reg *= inv_batches;
    epoch_loss.margin *= inv_batches;
    epoch_loss.compact *= inv_batches;
    epoch_loss.total *= inv_batches;

    EpochStats stats;
    stats.epoch = epoch;
    stats.loss = epoch_loss;
    stats.train_accuracy = evaluate_accuracy(net, head, train);
    history.push_back(stats);
    if (callback) callback(stats);
  }
  return history;
}

double evaluate_accuracy(const FeatureNet& net, const ConicHead& head, const Dataset& ds) {
  if (ds.size() == 0) throw std::invalid_argument("evaluate_accuracy: empty dataset");
  int correct = 0;
  for (int i = 0; i < ds.size(); ++i) {
    const std::vector<double> f = net_forward(net, ds.features[i]);
    if (argmax(head_scores(head, f)) == ds.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(ds.size());
}

TrainedModel train_dcepcc(const Dataset& train, const std::vector<int>& hidden_dims,
                          int feature_dim, bool shared_vertex, const TrainConfig& cfg,
                          const EpochCallback& callback) {
  train.validate();
  std::vector<int> dims;
  dims.push_back(train.input_dim());
  dims.insert(dims.end(), hidden_dims.begin(), hidden_dims.end());
  dims.push_back(feature_dim);

  TrainedModel model;
  model.net = make_feature_net(dims, Rng::mix(cfg.seed, 0x11e7));
  std::vector<std::vector<double>> features;
  features.reserve(train.size());
  for (int i = 0; i < train.size(); ++i) {
    features.push_back(net_forward(model.net, train.features[i]));
  }
  model.head = make_conic_head(train.num_classes, feature_dim, shared_vertex, features,
                               train.labels, Rng::mix(cfg.seed, 0x4ead));
  model.history = fit(train, model.net, model.head, cfg, callback);
  return model;
}

TrainedSoftmax train_softmax(const Dataset& train, const std::vector<int>& hidden_dims,
                             int feature_dim, const TrainConfig& cfg) {
  cfg.validate();
  train.validate();
  std::vector<int> dims;
  dims.push_back(train.input_dim());
  dims.insert(dims.end(), hidden_dims.begin(), hidden_dims.end());
  dims.push_back(feature_dim);

  TrainedSoftmax model;
  model.net = make_feature_net(dims, Rng::mix(cfg.seed, 0x11e7));
  model.head = make_softmax_head(train.num_classes, feature_dim, Rng::mix(cfg.seed, 0x50f7));

  NetGrads net_v = NetGrads::zeros_like(model.net);
  Matrix head_w_v(train.num_classes, feature_dim);
  std::vector<double> head_b_v(train.num_classes, 0.0);

  Rng shuffle_rng(Rng::mix(cfg.seed, 0x0ff1e));
  const int n = train.size();
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;

  ForwardCache cache;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = scheduled_lr(cfg, epoch);
    shuffle_rng.shuffle(order);

    double epoch_ce = 0.0;
    int batches = 0;
    for (int start = 0; start < n; start += cfg.batch_size) {
      const int stop = std::min(start + cfg.batch_size, n);
      const int m = stop - start;
      NetGrads net_g = NetGrads::zeros_like(model.net);
      Matrix head_w_g(train.num_classes, feature_dim);
      std::vector<double> head_b_g(train.num_classes, 0.0);
      double batch_ce = 0.0;
      std::vector<double> dlogits;
      for (int k = start; k < stop; ++k) {
        const int i = order[k];
        const std::vector<double> f = net_forward(model.net, train.features[i], &cache);
        batch_ce += softmax_cross_entropy(model.head, f, train.labels[i], &dlogits);
        std::vector<double> dfeature(feature_dim, 0.0);
        for (int c = 0; c < train.num_classes; ++c) {
          head_b_g[c] += dlogits[c];
          for (int mdim = 0; mdim < feature_dim; ++mdim) {
            head_w_g(c, mdim) += dlogits[c] * f[mdim];
            dfeature[mdim] += model.head.weight(c, mdim) * dlogits[c];
          }
        }
        net_backward(model.net, cache, dfeature, net_g);
      }
      const double inv = 1.0 / static_cast<double>(m);
      for (auto& w : net_g.weights) {
        for (double& v : w.data) v *= inv;
      }
      for (auto& b : net_g.biases) {
        for (double& v : b) v *= inv;
      }
      for (double& v : head_w_g.data) v *= inv;
      for (double& v : head_b_g) v *= inv;

      for (int l = 0; l < model.net.num_layers(); ++l) {
        sgd_update(model.net.weights[l].data.data(), net_g.weights[l].data.data(),
                   net_v.weights[l].data.data(), model.net.weights[l].data.size(), lr,
                   cfg.momentum, cfg.weight_decay);
        sgd_update(model.net.biases[l].data(), net_g.biases[l].data(),
                   net_v.biases[l].data(), model.net.biases[l].size(), lr,
                   cfg.momentum, 0.0);
      }
      sgd_update(model.head.weight.data.data(), head_w_g.data.data(),
                 head_w_v.data.data(), model.head.weight.data.size(), lr, cfg.momentum,
                 cfg.weight_decay);
      sgd_update(model.head.bias.data(), head_b_g.data(), head_b_v.data(),
                 model.head.bias.size(), lr, cfg.momentum, 0.0);

      epoch_ce += batch_ce * inv;
      ++batches;
    }
    SoftmaxEpochStats stats;
    stats.epoch = epoch;
    stats.cross_entropy = epoch_ce / static_cast<double>(batches);
    stats.train_accuracy = evaluate_accuracy(model.net, model.head, train);
    model.history.push_back(stats);
  }
  return model;
}

double evaluate_accuracy(const FeatureNet& net, const SoftmaxHead& head, const Dataset& ds) {
  if (ds.size() == 0) throw std::invalid_argument("evaluate_accuracy: empty dataset");
  int correct = 0;
  for (int i = 0; i < ds.size(); ++i) {
    const std::vector<double> f = net_forward(net, ds.features[i]);
    if (argmax(softmax_forward(head, f)) == ds.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(ds.size());
}

}  // namespace dcepcc
