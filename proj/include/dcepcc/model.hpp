#pragma once

#include <cstdint>
#include <vector>

#include "dcepcc/geometry.hpp"

namespace dcepcc {

// Minimal row-major dense matrix; all networks here are desk scale.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}
  double& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
};

// Fully-connected feature extractor: rectifier on hidden layers, identity on
// the final layer. layer_dims = {input, hidden..., feature}.
struct FeatureNet {
  std::vector<int> layer_dims;
  std::vector<Matrix> weights;              // weights[l]: dims[l+1] x dims[l]
  std::vector<std::vector<double>> biases;  // biases[l]: dims[l+1]

  int input_dim() const { return layer_dims.front(); }
  int feature_dim() const { return layer_dims.back(); }
  int num_layers() const { return static_cast<int>(weights.size()); }
  void validate() const;
};

// He-style Gaussian init scaled by fan-in, zero biases. Deterministic.
FeatureNet make_feature_net(const std::vector<int>& layer_dims, std::uint64_t seed);

// Per-layer activations kept for backprop. activations[0] is the input,
// activations[l+1] the post-activation output of layer l.
struct ForwardCache {
  std::vector<std::vector<double>> activations;
  std::vector<std::vector<double>> preacts;
};

std::vector<double> net_forward(const FeatureNet& net, const std::vector<double>& x,
                                ForwardCache* cache = nullptr);

struct NetGrads {
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> biases;

  static NetGrads zeros_like(const FeatureNet& net);
};

// Backpropagates d(loss)/d(feature) through the cached forward pass,
// accumulating into grads. ReLU subgradient at 0 is 0.
void net_backward(const FeatureNet& net, const ForwardCache& cache,
                  const std::vector<double>& dfeature, NetGrads& grads);

// Multi-class EPCC head in the tilde form: per class c,
//
//   g_c(f) = w~_c'(f - s_c) + gamma~_c'|f - s_c| + b_c,
//
// which is the exact negative of eval_epcf on the converted region
// (w = -w~, gamma = -gamma~, same s and b). Larger score wins. Centers s_c
// are batch statistics, not gradient parameters. With shared_vertex set,
// every class keeps the same pooled vertex.
struct ConicHead {
  bool shared_vertex = false;
  std::vector<std::vector<double>> w_tilde;      // C x d
  std::vector<std::vector<double>> gamma_tilde;  // C x d
  std::vector<std::vector<double>> centers;      // C x d
  std::vector<double> b;                         // C

  int num_classes() const { return static_cast<int>(b.size()); }
  int feature_dim() const { return centers.empty() ? 0 : static_cast<int>(centers.front().size()); }
  void validate() const;
};

// w~ ~ U(-0.01, 0.01), gamma~ = -1, b = 1, centers at the class means of the
// supplied features (pooled mean when shared_vertex). Regions start bounded.
ConicHead make_conic_head(int classes, int dim, bool shared_vertex,
                          const std::vector<std::vector<double>>& features,
                          const std::vector<int>& labels, std::uint64_t seed);

// All C class scores g_c(f). Predicted label is the argmax.
std::vector<double> head_scores(const ConicHead& head, const std::vector<double>& f);

// dg_c/df = w~_c + gamma~_c . sgn(f - s_c), with sgn(0) = 0.
std::vector<double> head_input_gradient(const ConicHead& head,
                                        const std::vector<double>& f, int c);

// Converts class c to the original sign convention for geometry analysis.
ConicRegion to_region(const ConicHead& head, int c);

// Linear soft-max baseline head over the same features.
struct SoftmaxHead {
  Matrix weight;             // C x d
  std::vector<double> bias;  // C
  int num_classes() const { return weight.rows; }
  int feature_dim() const { return weight.cols; }
};

SoftmaxHead make_softmax_head(int classes, int dim, std::uint64_t seed);

// Numerically stable probabilities (max subtraction before exp).
std::vector<double> softmax_forward(const SoftmaxHead& head, const std::vector<double>& f);

// Cross-entropy of the label under softmax_forward. When dlogits is non-null
// it receives p - onehot(label).
double softmax_cross_entropy(const SoftmaxHead& head, const std::vector<double>& f,
                             int label, std::vector<double>* dlogits = nullptr);

// First index of the largest element; deterministic tie-break.
int argmax(const std::vector<double>& v);

}  // namespace dcepcc
