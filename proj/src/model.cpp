#include "dcepcc/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "dcepcc/rng.hpp"

namespace dcepcc {

void FeatureNet::validate() const {
  if (layer_dims.size() < 2) {
    throw std::invalid_argument("FeatureNet: needs at least input and feature dims");
  }
  if (weights.size() != layer_dims.size() - 1 || biases.size() != weights.size()) {
    throw std::invalid_argument("FeatureNet: layer count mismatch");
  }
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (weights[l].rows != layer_dims[l + 1] || weights[l].cols != layer_dims[l] ||
        static_cast<int>(biases[l].size()) != layer_dims[l + 1]) {
      throw std::invalid_argument("FeatureNet: shape mismatch at layer " + std::to_string(l));
    }
    for (double v : weights[l].data) {
      if (!std::isfinite(v)) throw std::invalid_argument("FeatureNet: non-finite weight");
    }
    for (double v : biases[l]) {
      if (!std::isfinite(v)) throw std::invalid_argument("FeatureNet: non-finite bias");
    }
  }
}

FeatureNet make_feature_net(const std::vector<int>& layer_dims, std::uint64_t seed) {
  if (layer_dims.size() < 2) {
    throw std::invalid_argument("make_feature_net: needs at least input and feature dims");
  }
  for (int d : layer_dims) {
    if (d < 1) throw std::invalid_argument("make_feature_net: layer widths must be >= 1");
  }
  FeatureNet net;
  net.layer_dims = layer_dims;
  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
    Matrix w(layer_dims[l + 1], layer_dims[l]);
    const double scale = std::sqrt(2.0 / static_cast<double>(layer_dims[l]));
    for (double& v : w.data) v = scale * rng.normal();
    net.weights.push_back(std::move(w));
    net.biases.emplace_back(layer_dims[l + 1], 0.0);
  }
  return net;
}

std::vector<double> net_forward(const FeatureNet& net, const std::vector<double>& x,
                                ForwardCache* cache) {
  if (static_cast<int>(x.size()) != net.input_dim()) {
    throw std::invalid_argument("net_forward: input has dimension " +
                                std::to_string(x.size()) + ", expected " +
                                std::to_string(net.input_dim()));
  }
  if (cache) {
    cache->activations.assign(1, x);
    cache->preacts.clear();
  }
  std::vector<double> a = x;
  const int layers = net.num_layers();
  for (int l = 0; l < layers; ++l) {
    const Matrix& w = net.weights[l];
    std::vector<double> z(w.rows);
    for (int r = 0; r < w.rows; ++r) {
      double acc = net.biases[l][r];
      for (int c = 0; c < w.cols; ++c) acc += w(r, c) * a[c];
      z[r] = acc;
    }
    if (cache) cache->preacts.push_back(z);
    if (l + 1 < layers) {
      for (double& v : z) v = v > 0.0 ? v : 0.0;  // rectifier on hidden layers
    }
    if (cache) cache->activations.push_back(z);
    a = std::move(z);
  }
  return a;
}

NetGrads NetGrads::zeros_like(const FeatureNet& net) {
  NetGrads g;
  for (int l = 0; l < net.num_layers(); ++l) {
    g.weights.emplace_back(net.weights[l].rows, net.weights[l].cols);
    g.biases.emplace_back(net.biases[l].size(), 0.0);
  }
  return g;
}

void net_backward(const FeatureNet& net, const ForwardCache& cache,
                  const std::vector<double>& dfeature, NetGrads& grads) {
  const int layers = net.num_layers();
  std::vector<double> delta = dfeature;  // final layer is identity
  for (int l = layers - 1; l >= 0; --l) {
    const Matrix& w = net.weights[l];
    const std::vector<double>& input = cache.activations[l];
    for (int r = 0; r < w.rows; ++r) {
      grads.biases[l][r] += delta[r];
      for (int c = 0; c < w.cols; ++c) grads.weights[l](r, c) += delta[r] * input[c];
    }
    if (l == 0) break;
    std::vector<double> prev(w.cols, 0.0);
    for (int c = 0; c < w.cols; ++c) {
      double acc = 0.0;
      for (int r = 0; r < w.rows; ++r) acc += w(r, c) * delta[r];
      prev[c] = cache.preacts[l - 1][c] > 0.0 ? acc : 0.0;
    }
    delta = std::move(prev);
  }
}

void ConicHead::validate() const {
  const int classes = num_classes();
  const int dim = feature_dim();
  if (classes < 1 || dim < 1) throw std::invalid_argument("ConicHead: empty head");
  if (static_cast<int>(w_tilde.size()) != classes ||
      static_cast<int>(gamma_tilde.size()) != classes ||
      static_cast<int>(centers.size()) != classes) {
    throw std::invalid_argument("ConicHead: per-class array length mismatch");
  }
  for (int c = 0; c < classes; ++c) {
    if (static_cast<int>(w_tilde[c].size()) != dim ||
        static_cast<int>(gamma_tilde[c].size()) != dim ||
        static_cast<int>(centers[c].size()) != dim) {
      throw std::invalid_argument("ConicHead: class " + std::to_string(c) + " dim mismatch");
    }
    for (int m = 0; m < dim; ++m) {
      if (!std::isfinite(w_tilde[c][m]) || !std::isfinite(gamma_tilde[c][m]) ||
          !std::isfinite(centers[c][m])) {
        throw std::invalid_argument("ConicHead: non-finite parameter");
      }
    }
    if (!std::isfinite(b[c])) throw std::invalid_argument("ConicHead: non-finite offset");
  }
}

ConicHead make_conic_head(int classes, int dim, bool shared_vertex,
                          const std::vector<std::vector<double>>& features,
                          const std::vector<int>& labels, std::uint64_t seed) {
  if (classes < 1 || dim < 1) {
    throw std::invalid_argument("make_conic_head: classes and dim must be >= 1");
  }
  if (features.size() != labels.size() || features.empty()) {
    throw std::invalid_argument("make_conic_head: needs aligned, non-empty features");
  }
  ConicHead head;
  head.shared_vertex = shared_vertex;
  head.b.assign(classes, 1.0);
  head.gamma_tilde.assign(classes, std::vector<double>(dim, -1.0));
  Rng rng(seed);
  head.w_tilde.assign(classes, std::vector<double>(dim, 0.0));
  for (int c = 0; c < classes; ++c) {
    for (int m = 0; m < dim; ++m) head.w_tilde[c][m] = rng.uniform(-0.01, 0.01);
  }

  head.centers.assign(classes, std::vector<double>(dim, 0.0));
  if (shared_vertex) {
    std::vector<double> mean(dim, 0.0);
    for (const auto& f : features) {
      for (int m = 0; m < dim; ++m) mean[m] += f[m];
    }
    for (int m = 0; m < dim; ++m) mean[m] /= static_cast<double>(features.size());
    for (int c = 0; c < classes; ++c) head.centers[c] = mean;
  } else {
    std::vector<int> counts(classes, 0);
    for (std::size_t i = 0; i < features.size(); ++i) {
      const int y = labels[i];
      if (y < 0 || y >= classes) {
        throw std::invalid_argument("make_conic_head: label out of range");
      }
      ++counts[y];
      for (int m = 0; m < dim; ++m) head.centers[y][m] += features[i][m];
    }
    for (int c = 0; c < classes; ++c) {
      if (counts[c] == 0) {
        throw std::invalid_argument("make_conic_head: class " + std::to_string(c) +
                                    " has no samples for its center");
      }
      for (int m = 0; m < dim; ++m) head.centers[c][m] /= counts[c];
    }
  }
  return head;
}

std::vector<double> head_scores(const ConicHead& head, const std::vector<double>& f) {
  if (static_cast<int>(f.size()) != head.feature_dim()) {
    throw std::invalid_argument("head_scores: feature dim mismatch");
  }
  std::vector<double> g(head.num_classes());
  for (int c = 0; c < head.num_classes(); ++c) {
    g[c] = detail::cone_sum(head.w_tilde[c], head.gamma_tilde[c], head.centers[c], f) +
           head.b[c];
  }
  return g;
}

std::vector<double> head_input_gradient(const ConicHead& head,
                                        const std::vector<double>& f, int c) {
  const int dim = head.feature_dim();
  std::vector<double> grad(dim);
  for (int m = 0; m < dim; ++m) {
    const double d = f[m] - head.centers[c][m];
    const double sgn = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
    grad[m] = head.w_tilde[c][m] + head.gamma_tilde[c][m] * sgn;
  }
  return grad;
}

ConicRegion to_region(const ConicHead& head, int c) {
  if (c < 0 || c >= head.num_classes()) {
    throw std::invalid_argument("to_region: class out of range");
  }
  ConicRegion region;
  region.s = head.centers[c];
  region.b = head.b[c];
  region.w.resize(head.feature_dim());
  region.gamma.resize(head.feature_dim());
  for (int m = 0; m < head.feature_dim(); ++m) {
    region.w[m] = -head.w_tilde[c][m];
    region.gamma[m] = -head.gamma_tilde[c][m];
  }
  return region;
}

SoftmaxHead make_softmax_head(int classes, int dim, std::uint64_t seed) {
  if (classes < 1 || dim < 1) {
    throw std::invalid_argument("make_softmax_head: classes and dim must be >= 1");
  }
  SoftmaxHead head;
  head.weight = Matrix(classes, dim);
  head.bias.assign(classes, 0.0);
  Rng rng(seed);
  const double scale = std::sqrt(1.0 / static_cast<double>(dim));
  for (double& v : head.weight.data) v = scale * rng.normal();
  return head;
}

std::vector<double> softmax_forward(const SoftmaxHead& head, const std::vector<double>& f) {
  if (static_cast<int>(f.size()) != head.feature_dim()) {
    throw std::invalid_argument("softmax_forward: feature dim mismatch");
  }
  std::vector<double> logits(head.num_classes());
  for (int c = 0; c < head.num_classes(); ++c) {
    double acc = head.bias[c];
    for (int m = 0; m < head.feature_dim(); ++m) acc += head.weight(c, m) * f[m];
    logits[c] = acc;
  }
  double hi = logits[0];
  for (double v : logits) hi = std::max(hi, v);
  double sum = 0.0;
  for (double& v : logits) {
    v = std::exp(v - hi);
    sum += v;
  }
  for (double& v : logits) v /= sum;
  return logits;
}

double softmax_cross_entropy(const SoftmaxHead& head, const std::vector<double>& f,
                             int label, std::vector<double>* dlogits) {
  if (label < 0 || label >= head.num_classes()) {
    throw std::invalid_argument("softmax_cross_entropy: label out of range");
  }
  std::vector<double> logits(head.num_classes());
  for (int c = 0; c < head.num_classes(); ++c) {
    double acc = head.bias[c];
    for (int m = 0; m < head.feature_dim(); ++m) acc += head.weight(c, m) * f[m];
    logits[c] = acc;
  }
  double hi = logits[0];
  for (double v : logits) hi = std::max(hi, v);
  double sum = 0.0;
  for (double v : logits) sum += std::exp(v - hi);
  const double loss = std::log(sum) - (logits[label] - hi);
  if (dlogits) {
    dlogits->resize(head.num_classes());
    for (int c = 0; c < head.num_classes(); ++c) {
      (*dlogits)[c] = std::exp(logits[c] - hi) / sum - (c == label ? 1.0 : 0.0);
    }
  }
  return loss;
}

int argmax(const std::vector<double>& v) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(v.size()); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

}  // namespace dcepcc
