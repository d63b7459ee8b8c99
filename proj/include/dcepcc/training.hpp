#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "dcepcc/data.hpp"
#include "dcepcc/model.hpp"

namespace dcepcc {

// Optimizer and loss hyperparameters. The objective per batch B is
//
//   (lambda/2) sum_c w~_c'w~_c
//   + sum_{i in B} sum_{j != y_i} H_delta(g_{y_i}(f_i) - g_j(f_i))
//   + eta * sum_c sum_m max(0, kappa - (-gamma~_cm - |w~_cm|)),
//
// with H_delta(t) = max(0, delta - t). The last term is zero exactly when
// every class/axis has gamma_cm >= |w_cm| + kappa, i.e. the bounded-region
// condition with margin kappa.
struct TrainConfig {
  double lambda = 0.0;         // explicit w~ regularization weight in the loss
  double eta = 1.0;            // compactness term weight
  double kappa = 0.5;          // compactness margin
  double margin_delta = 1.0;   // hinge margin
  double lr = 0.01;            // base learning rate; x0.1 at 60% and 85% of epochs
  double momentum = 0.9;
  double weight_decay = 0.0005;  // applied to w~ and net weights in sgd_step
  int batch_size = 128;
  int epochs = 100;
  double center_lr = 0.5;  // vertex update rate, in (0, 1]
  std::uint64_t seed = 0;

  void validate() const;
};

struct LossBreakdown {
  double reg = 0.0;
  double margin = 0.0;
  double compact = 0.0;
  double total = 0.0;
};

// max(0, delta - (g_true - g_other)).
double margin_hinge(double g_true, double g_other, double delta);

// sum_c sum_m max(0, kappa - (-gamma~_cm - |w~_cm|)), without the eta weight.
double compactness_penalty(const ConicHead& head, double kappa);

struct HeadGrads {
  std::vector<std::vector<double>> w_tilde;
  std::vector<std::vector<double>> gamma_tilde;
  std::vector<double> b;

  static HeadGrads zeros_like(const ConicHead& head);
};

struct ModelGrads {
  NetGrads net;
  HeadGrads head;

  static ModelGrads zeros_like(const FeatureNet& net, const ConicHead& head);
  void scale(double factor);
};

struct BatchEval {
  LossBreakdown loss;
  ModelGrads grads;
  std::vector<std::vector<double>> features;  // f_i for every batch sample
  std::vector<int> predictions;               // argmax_c g_c(f_i)
};

// Batch objective above plus its exact subgradients. Hinge and compactness
// components at their kink (argument exactly 0) are treated as inactive.
// Centers s_c are constants here; they move only via update_centers.
BatchEval loss_and_gradients(const std::vector<std::vector<double>>& xs,
                             const std::vector<int>& ys, const FeatureNet& net,
                             const ConicHead& head, const TrainConfig& cfg);

// One momentum-SGD update on a flat parameter array:
//   v <- momentum*v - lr*(grad + weight_decay*param);  param <- param + v.
void sgd_update(double* param, const double* grad, double* velocity, std::size_t n,
                double lr, double momentum, double weight_decay);

struct SgdState {
  ModelGrads velocity;  // same shapes as the gradients
  static SgdState zeros_like(const FeatureNet& net, const ConicHead& head);
};

// Applies sgd_update to every parameter group. Weight decay touches the net
// weight matrices and w~ only; gamma~, b and biases update undecayed.
void sgd_step(FeatureNet& net, ConicHead& head, const ModelGrads& grads,
              SgdState& state, const TrainConfig& cfg, double lr);

// Per-batch vertex update. For each class c present with m_c samples,
//   delta_c = sum_{i: y_i=c} (s_c - f_i) / (1 + m_c),  s_c <- s_c - center_lr*delta_c.
// Absent classes keep their vertex. With shared_vertex all samples pool into
// the single common vertex.
void update_centers(ConicHead& head, const std::vector<std::vector<double>>& features,
                    const std::vector<int>& labels, double center_lr);

struct EpochStats {
  int epoch = 0;               // zero-based
  LossBreakdown loss;          // mean over batches of the batch loss / batch size
  double train_accuracy = 0.0; // full-pass accuracy at the end of the epoch
};

using EpochCallback = std::function<void(const EpochStats&)>;

// Seeded-shuffle mini-batch training. Each batch runs loss_and_gradients,
// scales the gradient by 1/batch_size, takes an sgd_step, then updates the
// vertices from the batch features. Fully deterministic for a fixed seed.
std::vector<EpochStats> fit(const Dataset& train, FeatureNet& net, ConicHead& head,
                            const TrainConfig& cfg, const EpochCallback& callback = {});

// Accuracy of the current model over a dataset (argmax of head scores).
double evaluate_accuracy(const FeatureNet& net, const ConicHead& head, const Dataset& ds);

struct TrainedModel {
  FeatureNet net;
  ConicHead head;
  std::vector<EpochStats> history;
};

// Builds the net, runs one pass to place the class vertices, then fits.
TrainedModel train_dcepcc(const Dataset& train, const std::vector<int>& hidden_dims,
                          int feature_dim, bool shared_vertex, const TrainConfig& cfg,
                          const EpochCallback& callback = {});

struct SoftmaxEpochStats {
  int epoch = 0;
  double cross_entropy = 0.0;  // mean over batches of the batch CE / batch size
  double train_accuracy = 0.0;
};

struct TrainedSoftmax {
  FeatureNet net;
  SoftmaxHead head;
  std::vector<SoftmaxEpochStats> history;
};

// Same schedule and optimizer for the cross-entropy baseline.
TrainedSoftmax train_softmax(const Dataset& train, const std::vector<int>& hidden_dims,
                             int feature_dim, const TrainConfig& cfg);

double evaluate_accuracy(const FeatureNet& net, const SoftmaxHead& head, const Dataset& ds);

}  // namespace dcepcc
