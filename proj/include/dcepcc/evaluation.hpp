#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dcepcc/data.hpp"
#include "dcepcc/training.hpp"

namespace dcepcc {

// Fraction of exact matches. Throws on empty or mismatched input.
double accuracy(const std::vector<int>& predictions, const std::vector<int>& labels);

// Non-interpolated average precision: sort by score descending (ties broken
// by original index), then average precision at the rank of each positive.
// Throws when there are no positives.
double average_precision(const std::vector<double>& scores,
                         const std::vector<int>& binary_labels);

// Probability that a random positive outscores a random negative, ties
// counted 1/2 (Mann-Whitney). Needs at least one positive and one negative.
double roc_auc(const std::vector<double>& scores, const std::vector<int>& binary_labels);

// Per-class score normalizer: divides class c scores by the maximum absolute
// calibration score of that class, so calibration scores land in [-1, 1].
struct ScoreScaler {
  std::vector<double> max_abs;  // one positive value per class (1 if all zero)
  std::vector<double> apply(const std::vector<double>& scores) const;
};

// calibration_scores: one row of C class scores per calibration sample.
ScoreScaler fit_scaler(const std::vector<std::vector<double>>& calibration_scores);

// Rejection score: -max_c of the scaled class scores. Higher means more
// likely to come from an unknown class.
double openset_score(const std::vector<double>& scaled_scores);

struct OpenSetSplit {
  std::vector<int> known;    // ascending class ids
  std::vector<int> unknown;  // ascending class ids
  std::uint64_t seed = 0;
};

// Seeded random choice of known_count known classes out of num_classes.
OpenSetSplit draw_openset_split(int num_classes, int known_count, std::uint64_t seed);

struct EvalReport {
  double accuracy = 0.0;
  std::vector<double> per_class_ap;  // empty unless one-vs-rest was requested
  std::optional<double> auroc;
  int n_known = 0;
  int n_unknown = 0;
};

enum class ClassifierKind { kConic, kSoftmax };

struct OpenSetOptions {
  int known_classes = 6;
  int repeats = 5;
  double train_fraction = 0.6;
  ClassifierKind kind = ClassifierKind::kConic;
  bool sigmoid_scores = false;  // sigmoid instead of max-abs scaling
  std::vector<int> hidden_dims = {64, 32};
  int feature_dim = 2;
  bool shared_vertex = false;
};

struct OpenSetRun {
  OpenSetSplit split;
  std::uint64_t split_hash = 0;  // fingerprint of the realized known/test split
  double auroc = 0.0;
  double closed_set_accuracy = 0.0;  // known-class test samples only
  int n_known = 0;                   // known-class test samples
  int n_unknown = 0;                 // unknown-class test samples
};

struct OpenSetResult {
  std::vector<OpenSetRun> runs;
  double mean_auroc = 0.0;
  double mean_closed_set_accuracy = 0.0;
};

// The randomized known/unknown protocol. Each repeat draws a class split and
// a stratified train/test partition from seeds derived only from cfg.seed and
// the repeat index, trains the requested classifier on known-class training
// samples (standardized with known-train statistics), calibrates the scaler
// on those same samples, scores every test sample with the rejection score,
// and computes AU-ROC with unknown-class samples as positives. Splits are
// identical across classifier kinds by construction.
OpenSetResult run_openset_protocol(const Dataset& dataset, const TrainConfig& cfg,
                                   const OpenSetOptions& options);

}  // namespace dcepcc
