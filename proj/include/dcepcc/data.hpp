#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dcepcc {

// Labeled feature vectors. Labels are contiguous integers starting at 0;
// class_names, when present, maps label -> original name.
struct Dataset {
  std::vector<std::vector<double>> features;
  std::vector<int> labels;
  int num_classes = 0;
  std::vector<std::string> class_names;
  std::string provenance;

  int size() const { return static_cast<int>(features.size()); }
  int input_dim() const {
    return features.empty() ? 0 : static_cast<int>(features.front().size());
  }
  void validate() const;  // throws std::invalid_argument on broken invariants
  std::vector<int> class_counts() const;
};

// Isotropic Gaussian clusters around seeded random centers drawn uniformly
// from [-4, 4]^dim. Deterministic per seed.
Dataset make_blobs(int classes, int per_class, int dim, double spread,
                   std::uint64_t seed);

// Binary relabeling: positive_class -> 1, everything else -> 0.
// Features are carried over unchanged.
Dataset make_one_vs_rest(const Dataset& ds, int positive_class);

// CSV ingestion. Header row required; the label column is named; all other
// columns must be numeric. Label values map to 0..C-1 by first appearance.
// Accepts LF or CRLF. Records a content digest in provenance.
Dataset load_csv(const std::string& path, const std::string& label_column);

// Writes header f0..f{d-1},label with %.17g features so a reload reproduces
// them bit-exactly. Labels are written as class names when available.
void save_csv(const Dataset& ds, const std::string& path);

struct SplitFractions {
  double train = 0.6;
  double val = 0.0;
  double test = 0.4;
};

struct SplitResult {
  Dataset train, val, test;
};

// Deterministic seeded partition. Stratified mode shuffles and slices each
// class separately, keeping per-class proportions within one sample; it
// throws if a nonzero fraction would leave some class empty.
SplitResult split(const Dataset& ds, const SplitFractions& fractions,
                  bool stratified, std::uint64_t seed);

// Per-feature z-scoring statistics. stddev has a 1e-8 floor.
struct FeatureScaler {
  std::vector<double> mean;
  std::vector<double> stddev;
  void apply(Dataset& ds) const;
};

// Computes statistics from `train` only and applies the transform in place
// to `train` and every dataset in `others`.
FeatureScaler standardize(Dataset& train, const std::vector<Dataset*>& others = {});

// FNV-1a content hashing, used for dataset digests and split fingerprints.
std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ull);
std::string to_hex(std::uint64_t v);

}  // namespace dcepcc
