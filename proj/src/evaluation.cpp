#include "dcepcc/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "dcepcc/rng.hpp"

namespace dcepcc {

double accuracy(const std::vector<int>& predictions, const std::vector<int>& labels) {
  if (predictions.empty() || predictions.size() != labels.size()) {
    throw std::invalid_argument("accuracy: needs equal-length, non-empty inputs");
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i] == labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(predictions.size());
}

double average_precision(const std::vector<double>& scores,
                         const std::vector<int>& binary_labels) {
  if (scores.size() != binary_labels.size() || scores.empty()) {
    throw std::invalid_argument("average_precision: needs equal-length, non-empty inputs");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  double sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    if (binary_labels[order[rank]] != 0) {
      ++positives;
      sum += static_cast<double>(positives) / static_cast<double>(rank + 1);
    }
  }
  if (positives == 0) {
    throw std::invalid_argument("average_precision: no positive labels");
  }
  return sum / static_cast<double>(positives);
}

double roc_auc(const std::vector<double>& scores, const std::vector<int>& binary_labels) {
  if (scores.size() != binary_labels.size() || scores.empty()) {
    throw std::invalid_argument("roc_auc: needs equal-length, non-empty inputs");
  }
  std::size_t pos = 0;
  for (int y : binary_labels) pos += y != 0 ? 1u : 0u;
  const std::size_t neg = scores.size() - pos;
  if (pos == 0 || neg == 0) {
    throw std::invalid_argument("roc_auc: needs at least one positive and one negative");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] < scores[b];
    return a < b;
  });
  // Rank-sum with average ranks over tie groups; equals pairwise counting.
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + j + 1);  // 1-based
    for (std::size_t k = i; k < j; ++k) {
      if (binary_labels[order[k]] != 0) rank_sum_pos += avg_rank;
    }
    i = j;
  }
  const double p = static_cast<double>(pos);
  const double u = rank_sum_pos - 0.5 * p * (p + 1.0);
  return u / (p * static_cast<double>(neg));
}

std::vector<double> ScoreScaler::apply(const std::vector<double>& scores) const {
  if (scores.size() != max_abs.size()) {
    throw std::invalid_argument("ScoreScaler: class count mismatch");
  }
  std::vector<double> scaled(scores.size());
  for (std::size_t c = 0; c < scores.size(); ++c) scaled[c] = scores[c] / max_abs[c];
  return scaled;
}

ScoreScaler fit_scaler(const std::vector<std::vector<double>>& calibration_scores) {
  if (calibration_scores.empty()) {
    throw std::invalid_argument("fit_scaler: empty calibration set");
  }
  const std::size_t classes = calibration_scores.front().size();
  ScoreScaler scaler;
  scaler.max_abs.assign(classes, 0.0);
  for (const auto& row : calibration_scores) {
    if (row.size() != classes) {
      throw std::invalid_argument("fit_scaler: ragged calibration scores");
    }
    for (std::size_t c = 0; c < classes; ++c) {
      scaler.max_abs[c] = std::max(scaler.max_abs[c], std::abs(row[c]));
    }
  }
  for (double& m : scaler.max_abs) {
    if (m == 0.0) m = 1.0;
  }
  return scaler;
}

double openset_score(const std::vector<double>& scaled_scores) {
  if (scaled_scores.empty()) throw std::invalid_argument("openset_score: empty scores");
  double hi = scaled_scores[0];
  for (double v : scaled_scores) hi = std::max(hi, v);
  return -hi;
}

OpenSetSplit draw_openset_split(int num_classes, int known_count, std::uint64_t seed) {
  if (known_count < 1 || known_count >= num_classes) {
    throw std::invalid_argument("draw_openset_split: need 1 <= known < classes");
  }
  std::vector<int> ids(num_classes);
  std::iota(ids.begin(), ids.end(), 0);
  Rng rng(seed);
  rng.shuffle(ids);
  OpenSetSplit split;
  split.seed = seed;
  split.known.assign(ids.begin(), ids.begin() + known_count);
  split.unknown.assign(ids.begin() + known_count, ids.end());
  std::sort(split.known.begin(), split.known.end());
  std::sort(split.unknown.begin(), split.unknown.end());
  return split;
}

namespace {

std::uint64_t hash_split(const OpenSetSplit& osplit, const Dataset& train_known,
                         const Dataset& test) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix_ints = [&h](const std::vector<int>& v) {
    h = fnv1a64(v.data(), v.size() * sizeof(int), h);
  };
  auto mix_ds = [&h, &mix_ints](const Dataset& ds) {
    for (const auto& row : ds.features) {
      h = fnv1a64(row.data(), row.size() * sizeof(double), h);
    }
    mix_ints(ds.labels);
  };
  mix_ints(osplit.known);
  mix_ints(osplit.unknown);
  mix_ds(train_known);
  mix_ds(test);
  return h;
}

Dataset filter_known(const Dataset& ds, const std::vector<int>& known) {
  std::vector<int> remap(ds.num_classes, -1);
  for (std::size_t k = 0; k < known.size(); ++k) remap[known[k]] = static_cast<int>(k);
  Dataset out;
  out.num_classes = static_cast<int>(known.size());
  for (int c : known) {
    out.class_names.push_back(ds.class_names.empty() ? std::to_string(c)
                                                     : ds.class_names[c]);
  }
  for (int i = 0; i < ds.size(); ++i) {
    const int m = remap[ds.labels[i]];
    if (m < 0) continue;
    out.features.push_back(ds.features[i]);
    out.labels.push_back(m);
  }
  out.provenance = ds.provenance + "|known_only";
  return out;
}

}  // namespace

OpenSetResult run_openset_protocol(const Dataset& dataset, const TrainConfig& cfg,
                                   const OpenSetOptions& options) {
  dataset.validate();
  if (options.repeats < 1) {
    throw std::invalid_argument("run_openset_protocol: repeats must be >= 1");
  }
  if (options.known_classes >= dataset.num_classes) {
    throw std::invalid_argument("run_openset_protocol: dataset has too few classes");
  }
  if (!(options.train_fraction > 0.0 && options.train_fraction < 1.0)) {
    throw std::invalid_argument("run_openset_protocol: train_fraction must be in (0,1)");
  }

  OpenSetResult result;
  for (int repeat = 0; repeat < options.repeats; ++repeat) {
    const std::uint64_t repeat_seed = Rng::mix(cfg.seed, 0xa110c000ull + repeat);
    OpenSetRun run;
    run.split = draw_openset_split(dataset.num_classes, options.known_classes,
                                   Rng::mix(repeat_seed, 1));

    SplitFractions fractions{options.train_fraction, 0.0, 1.0 - options.train_fraction};
    SplitResult parts = split(dataset, fractions, /*stratified=*/true,
                              Rng::mix(repeat_seed, 2));
    Dataset train_known = filter_known(parts.train, run.split.known);
    Dataset test = parts.test;
    run.split_hash = hash_split(run.split, train_known, test);

    standardize(train_known, {&test});

    std::vector<char> is_known(dataset.num_classes, 0);
    std::vector<int> remap(dataset.num_classes, -1);
    for (std::size_t k = 0; k < run.split.known.size(); ++k) {
      is_known[run.split.known[k]] = 1;
      remap[run.split.known[k]] = static_cast<int>(k);
    }

    TrainConfig run_cfg = cfg;
    run_cfg.seed = Rng::mix(repeat_seed, 3);

    std::vector<double> rejection;   // one score per test sample
    std::vector<int> unknown_label;  // 1 = sample of an unknown class
    rejection.reserve(test.size());
    unknown_label.reserve(test.size());
    std::vector<int> known_preds, known_labels;

    if (options.kind == ClassifierKind::kConic) {
      TrainedModel model = train_dcepcc(train_known, options.hidden_dims,
                                        options.feature_dim, options.shared_vertex,
                                        run_cfg);
      std::vector<std::vector<double>> calibration;
      calibration.reserve(train_known.size());
      for (int i = 0; i < train_known.size(); ++i) {
        calibration.push_back(
            head_scores(model.head, net_forward(model.net, train_known.features[i])));
      }
      const ScoreScaler scaler = fit_scaler(calibration);
      for (int i = 0; i < test.size(); ++i) {
        const std::vector<double> g =
            head_scores(model.head, net_forward(model.net, test.features[i]));
        std::vector<double> scaled;
        if (options.sigmoid_scores) {
          scaled.resize(g.size());
          for (std::size_t c = 0; c < g.size(); ++c) {
            scaled[c] = 1.0 / (1.0 + std::exp(-g[c]));
          }
        } else {
          scaled = scaler.apply(g);
        }
        rejection.push_back(openset_score(scaled));
        const int y = test.labels[i];
        unknown_label.push_back(is_known[y] ? 0 : 1);
        if (is_known[y]) {
          known_preds.push_back(argmax(g));
          known_labels.push_back(remap[y]);
        }
      }
    } else {
      TrainedSoftmax model = train_softmax(train_known, options.hidden_dims,
                                           options.feature_dim, run_cfg);
      for (int i = 0; i < test.size(); ++i) {
        const std::vector<double> p =
            softmax_forward(model.head, net_forward(model.net, test.features[i]));
        rejection.push_back(openset_score(p));
        const int y = test.labels[i];
        unknown_label.push_back(is_known[y] ? 0 : 1);
        if (is_known[y]) {
          known_preds.push_back(argmax(p));
          known_labels.push_back(remap[y]);
        }
      }
    }

    if (known_preds.empty() || known_preds.size() == rejection.size()) {
      throw std::invalid_argument("run_openset_protocol: empty test partition");
    }
    run.auroc = roc_auc(rejection, unknown_label);
    run.closed_set_accuracy = accuracy(known_preds, known_labels);
    run.n_known = static_cast<int>(known_preds.size());
    run.n_unknown = static_cast<int>(rejection.size() - known_preds.size());
    result.runs.push_back(std::move(run));
  }

  for (const OpenSetRun& run : result.runs) {
    result.mean_auroc += run.auroc;
    result.mean_closed_set_accuracy += run.closed_set_accuracy;
  }
  result.mean_auroc /= static_cast<double>(result.runs.size());
  result.mean_closed_set_accuracy /= static_cast<double>(result.runs.size());
  return result;
}

}  // namespace dcepcc
