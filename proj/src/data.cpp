#include "dcepcc/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "dcepcc/rng.hpp"

namespace dcepcc {

void Dataset::validate() const {
  if (features.size() != labels.size()) {
    throw std::invalid_argument("Dataset: features/labels length mismatch");
  }
  if (num_classes < 1 || size() < num_classes) {
    throw std::invalid_argument("Dataset: needs at least one sample per class slot");
  }
  const std::size_t dim = features.empty() ? 0 : features.front().size();
  std::vector<char> seen(num_classes, 0);
  for (int i = 0; i < size(); ++i) {
    if (features[i].size() != dim) {
      throw std::invalid_argument("Dataset: ragged feature row " + std::to_string(i));
    }
    for (double v : features[i]) {
      if (std::isnan(v)) {
        throw std::invalid_argument("Dataset: NaN feature in row " + std::to_string(i));
      }
    }
    if (labels[i] < 0 || labels[i] >= num_classes) {
      throw std::invalid_argument("Dataset: label out of range in row " + std::to_string(i));
    }
    seen[labels[i]] = 1;
  }
  for (int c = 0; c < num_classes; ++c) {
    if (!seen[c]) {
      throw std::invalid_argument("Dataset: class " + std::to_string(c) + " has no samples");
    }
  }
}

std::vector<int> Dataset::class_counts() const {
  std::vector<int> counts(num_classes, 0);
  for (int y : labels) {
    if (y >= 0 && y < num_classes) ++counts[y];
  }
  return counts;
}

Dataset make_blobs(int classes, int per_class, int dim, double spread,
                   std::uint64_t seed) {
  if (classes < 2 || per_class < 1 || dim < 1) {
    throw std::invalid_argument("make_blobs: need classes >= 2, per_class >= 1, dim >= 1");
  }
  Rng rng(seed);
  std::vector<std::vector<double>> centers(classes, std::vector<double>(dim));
  for (auto& center : centers) {
    for (double& v : center) v = rng.uniform(-4.0, 4.0);
  }
  Dataset ds;
  ds.num_classes = classes;
  ds.features.reserve(static_cast<std::size_t>(classes) * per_class);
  ds.labels.reserve(ds.features.capacity());
  for (int c = 0; c < classes; ++c) {
    for (int k = 0; k < per_class; ++k) {
      std::vector<double> x(dim);
      for (int j = 0; j < dim; ++j) x[j] = centers[c][j] + spread * rng.normal();
      ds.features.push_back(std::move(x));
      ds.labels.push_back(c);
    }
  }
  std::ostringstream prov;
  prov << "blobs(classes=" << classes << ",per_class=" << per_class
       << ",dim=" << dim << ",spread=" << spread << ",seed=" << seed << ")";
  ds.provenance = prov.str();
  return ds;
}

Dataset make_one_vs_rest(const Dataset& ds, int positive_class) {
  if (positive_class < 0 || positive_class >= ds.num_classes) {
    throw std::invalid_argument("make_one_vs_rest: positive class " +
                                std::to_string(positive_class) + " is absent");
  }
  Dataset out;
  out.features = ds.features;
  out.num_classes = 2;
  out.labels.resize(ds.labels.size());
  for (std::size_t i = 0; i < ds.labels.size(); ++i) {
    out.labels[i] = ds.labels[i] == positive_class ? 1 : 0;
  }
  std::string positive_name = ds.class_names.empty()
                                  ? std::to_string(positive_class)
                                  : ds.class_names[positive_class];
  out.class_names = {"rest", positive_name};
  out.provenance = ds.provenance + "|one_vs_rest(" + std::to_string(positive_class) + ")";
  return out;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

bool parse_double(const std::string& cell, double* out) {
  if (cell.empty()) return false;
  char* end = nullptr;
  *out = std::strtod(cell.c_str(), &end);
  return end == cell.c_str() + cell.size();
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& label_column) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_csv: cannot open '" + path + "'");
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  const std::uint64_t digest = fnv1a64(content.data(), content.size());

  std::vector<std::string> lines;
  {
    std::string cur;
    for (char ch : content) {
      if (ch == '\n') {
        if (!cur.empty() && cur.back() == '\r') cur.pop_back();
        lines.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(ch);
      }
    }
    if (!cur.empty()) {
      if (cur.back() == '\r') cur.pop_back();
      lines.push_back(cur);
    }
  }
  if (lines.empty()) throw std::runtime_error("load_csv: '" + path + "' is empty");

  const auto header = split_fields(lines[0]);
  int label_idx = -1;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == label_column) {
      label_idx = static_cast<int>(j);
      break;
    }
  }
  if (label_idx < 0) {
    throw std::runtime_error("load_csv: label column '" + label_column +
                             "' not found in '" + path + "'");
  }

  Dataset ds;
  std::unordered_map<std::string, int> label_map;
  for (std::size_t row = 1; row < lines.size(); ++row) {
    if (lines[row].empty()) continue;
    const auto fields = split_fields(lines[row]);
    if (fields.size() != header.size()) {
      throw std::runtime_error("load_csv: line " + std::to_string(row + 1) + " has " +
                               std::to_string(fields.size()) + " fields, expected " +
                               std::to_string(header.size()));
    }
    std::vector<double> x;
    x.reserve(header.size() - 1);
    for (std::size_t j = 0; j < fields.size(); ++j) {
      if (static_cast<int>(j) == label_idx) continue;
      double v = 0.0;
      if (!parse_double(fields[j], &v)) {
        throw std::runtime_error("load_csv: non-numeric value '" + fields[j] +
                                 "' at line " + std::to_string(row + 1) +
                                 ", column '" + header[j] + "'");
      }
      x.push_back(v);
    }
    const std::string& name = fields[label_idx];
    auto it = label_map.find(name);
    if (it == label_map.end()) {
      it = label_map.emplace(name, static_cast<int>(ds.class_names.size())).first;
      ds.class_names.push_back(name);
    }
    ds.features.push_back(std::move(x));
    ds.labels.push_back(it->second);
  }
  ds.num_classes = static_cast<int>(ds.class_names.size());
  ds.provenance = "csv:" + path + "#fnv1a64=" + to_hex(digest);
  ds.validate();
  return ds;
}

void save_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_csv: cannot write '" + path + "'");
  const int dim = ds.input_dim();
  for (int j = 0; j < dim; ++j) out << "f" << j << ",";
  out << "label\n";
  char buf[40];
  for (int i = 0; i < ds.size(); ++i) {
    for (int j = 0; j < dim; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", ds.features[i][j]);
      out << buf << ",";
    }
    if (ds.class_names.empty()) {
      out << ds.labels[i];
    } else {
      out << ds.class_names[ds.labels[i]];
    }
    out << "\n";
  }
}

namespace {

// Cumulative rounding keeps every slice within one sample of its fraction.
std::vector<std::size_t> slice_boundaries(std::size_t n, const SplitFractions& f) {
  const double f1 = f.train;
  const double f2 = f.train + f.val;
  const double f3 = f.train + f.val + f.test;
  std::vector<std::size_t> b(3);
  b[0] = static_cast<std::size_t>(std::llround(f1 * static_cast<double>(n)));
  b[1] = static_cast<std::size_t>(std::llround(f2 * static_cast<double>(n)));
  b[2] = static_cast<std::size_t>(std::llround(f3 * static_cast<double>(n)));
  b[0] = std::min(b[0], n);
  b[1] = std::min(std::max(b[1], b[0]), n);
  b[2] = std::min(std::max(b[2], b[1]), n);
  return b;
}

void append_rows(Dataset& out, const Dataset& src, const std::vector<int>& rows,
                 std::size_t begin, std::size_t end) {
  for (std::size_t k = begin; k < end; ++k) {
    out.features.push_back(src.features[rows[k]]);
    out.labels.push_back(src.labels[rows[k]]);
  }
}

}  // namespace

SplitResult split(const Dataset& ds, const SplitFractions& fractions,
                  bool stratified, std::uint64_t seed) {
  if (fractions.train < 0 || fractions.val < 0 || fractions.test < 0 ||
      fractions.train + fractions.val + fractions.test > 1.0 + 1e-12) {
    throw std::invalid_argument("split: fractions must be nonnegative and sum to at most 1");
  }
  SplitResult result;
  for (Dataset* part : {&result.train, &result.val, &result.test}) {
    part->num_classes = ds.num_classes;
    part->class_names = ds.class_names;
  }
  const char* part_names[3] = {"train", "val", "test"};
  const double part_fracs[3] = {fractions.train, fractions.val, fractions.test};

  Rng rng(seed);
  if (stratified) {
    for (int c = 0; c < ds.num_classes; ++c) {
      std::vector<int> rows;
      for (int i = 0; i < ds.size(); ++i) {
        if (ds.labels[i] == c) rows.push_back(i);
      }
      rng.shuffle(rows);
      const auto b = slice_boundaries(rows.size(), fractions);
      const std::size_t sizes[3] = {b[0], b[1] - b[0], b[2] - b[1]};
      for (int p = 0; p < 3; ++p) {
        if (part_fracs[p] > 0.0 && sizes[p] == 0) {
          throw std::invalid_argument("split: class " + std::to_string(c) +
                                      " would have zero samples in the " +
                                      part_names[p] + " split");
        }
      }
      append_rows(result.train, ds, rows, 0, b[0]);
      append_rows(result.val, ds, rows, b[0], b[1]);
      append_rows(result.test, ds, rows, b[1], b[2]);
    }
  } else {
    std::vector<int> rows(ds.size());
    for (int i = 0; i < ds.size(); ++i) rows[i] = i;
    rng.shuffle(rows);
    const auto b = slice_boundaries(rows.size(), fractions);
    append_rows(result.train, ds, rows, 0, b[0]);
    append_rows(result.val, ds, rows, b[0], b[1]);
    append_rows(result.test, ds, rows, b[1], b[2]);
  }
  int p = 0;
  for (Dataset* part : {&result.train, &result.val, &result.test}) {
    part->provenance = ds.provenance + "|split(" + part_names[p++] + ",seed=" +
                       std::to_string(seed) + (stratified ? ",stratified)" : ")");
  }
  return result;
}

void FeatureScaler::apply(Dataset& ds) const {
  for (auto& row : ds.features) {
    if (row.size() != mean.size()) {
      throw std::invalid_argument("FeatureScaler: dimension mismatch");
    }
    for (std::size_t j = 0; j < row.size(); ++j) {
      row[j] = (row[j] - mean[j]) / stddev[j];
    }
  }
}

FeatureScaler standardize(Dataset& train, const std::vector<Dataset*>& others) {
  if (train.size() == 0) throw std::invalid_argument("standardize: empty train set");
  const int dim = train.input_dim();
  FeatureScaler scaler;
  scaler.mean.assign(dim, 0.0);
  scaler.stddev.assign(dim, 0.0);
  const double n = static_cast<double>(train.size());
  for (const auto& row : train.features) {
    for (int j = 0; j < dim; ++j) scaler.mean[j] += row[j];
  }
  for (int j = 0; j < dim; ++j) scaler.mean[j] /= n;
  for (const auto& row : train.features) {
    for (int j = 0; j < dim; ++j) {
      const double d = row[j] - scaler.mean[j];
      scaler.stddev[j] += d * d;
    }
  }
  for (int j = 0; j < dim; ++j) {
    scaler.stddev[j] = std::max(std::sqrt(scaler.stddev[j] / n), 1e-8);
  }
  scaler.apply(train);
  for (Dataset* ds : others) scaler.apply(*ds);
  return scaler;
}

std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string to_hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace dcepcc
