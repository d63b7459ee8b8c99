#include "dcepcc/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dcepcc/checkpoint.hpp"
#include "dcepcc/data.hpp"
#include "dcepcc/evaluation.hpp"
#include "dcepcc/geometry.hpp"
#include "dcepcc/gradcheck.hpp"
#include "dcepcc/model.hpp"
#include "dcepcc/training.hpp"

namespace dcepcc::cli {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitCheckFailed = 3;

// Raised for problems that should map to the usage exit code.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool verbose() {
  const char* v = std::getenv("DCEPCC_VERBOSE");
  return v != nullptr && *v != '\0' && std::string(v) != "0";
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<int> parse_int_list(const std::string& text, const char* what) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw UsageError(std::string(what) + ": cannot parse '" + item + "' as integer");
    }
  }
  if (out.empty()) throw UsageError(std::string(what) + ": empty list");
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
}

// ---------------------------------------------------------------------------
// Dataset source flags, shared by train/eval/openset.

struct DataOpts {
  std::string csv_path;
  std::string label_column = "label";
  bool blobs = false;
  int classes = 3;
  int per_class = 100;
  int dim = 2;
  double spread = 1.0;
  std::uint64_t data_seed = 1234;
};

void add_data_flags(CLI::App* cmd, DataOpts& o) {
  cmd->add_option("--data", o.csv_path, "CSV dataset path (header row required)");
  cmd->add_option("--label-col", o.label_column, "Label column name")
      ->capture_default_str();
  cmd->add_flag("--blobs", o.blobs, "Generate a synthetic Gaussian-blob dataset");
  cmd->add_option("--classes", o.classes, "Blob generator: class count")
      ->capture_default_str();
  cmd->add_option("--per-class", o.per_class, "Blob generator: samples per class")
      ->capture_default_str();
  cmd->add_option("--dim", o.dim, "Blob generator: input dimension")
      ->capture_default_str();
  cmd->add_option("--spread", o.spread, "Blob generator: cluster standard deviation")
      ->capture_default_str();
  cmd->add_option("--data-seed", o.data_seed, "Blob generator: seed")
      ->capture_default_str();
}

Dataset load_dataset(const DataOpts& o) {
  if (o.blobs == o.csv_path.empty()) {
    throw UsageError("choose exactly one dataset source: --data <csv> or --blobs");
  }
  Dataset ds = o.blobs ? make_blobs(o.classes, o.per_class, o.dim, o.spread, o.data_seed)
                       : load_csv(o.csv_path, o.label_column);
  ds.validate();
  return ds;
}

// ---------------------------------------------------------------------------
// Training configuration: defaults, config file, then flag overrides.

struct RunSettings {
  TrainConfig train;
  std::vector<int> hidden_dims = {64, 32};
  int feature_dim = 2;
  bool shared_vertex = false;
};

void apply_config_line(RunSettings& s, const std::string& key, const std::string& value,
                       const std::string& path, int line_no) {
  auto fail = [&](const char* why) {
    throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + why +
                             " for key '" + key + "'");
  };
  auto as_double = [&]() {
    try {
      std::size_t used = 0;
      const double v = std::stod(value, &used);
      if (used != value.size()) fail("bad numeric value");
      return v;
    } catch (const std::runtime_error&) {
      throw;
    } catch (const std::exception&) {
      fail("bad numeric value");
      return 0.0;
    }
  };
  auto as_int = [&]() {
    const double v = as_double();
    return static_cast<int>(v);
  };
  auto as_bool = [&]() {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    fail("bad boolean value");
    return false;
  };

  if (key == "lambda") s.train.lambda = as_double();
  else if (key == "eta") s.train.eta = as_double();
  else if (key == "kappa") s.train.kappa = as_double();
  else if (key == "margin_delta") s.train.margin_delta = as_double();
  else if (key == "lr") s.train.lr = as_double();
  else if (key == "momentum") s.train.momentum = as_double();
  else if (key == "weight_decay") s.train.weight_decay = as_double();
  else if (key == "batch_size") s.train.batch_size = as_int();
  else if (key == "epochs") s.train.epochs = as_int();
  else if (key == "center_lr") s.train.center_lr = as_double();
  else if (key == "seed") s.train.seed = static_cast<std::uint64_t>(as_double());
  else if (key == "hidden_dims") s.hidden_dims = parse_int_list(value, "hidden_dims");
  else if (key == "feature_dim") s.feature_dim = as_int();
  else if (key == "shared_vertex") s.shared_vertex = as_bool();
  else fail("unknown key");
}

void apply_config_file(const std::string& path, RunSettings& s) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (eq == std::string::npos) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected 'key = value'");
    }
    auto trim = [](std::string v) {
      const auto b = v.find_first_not_of(" \t");
      const auto e = v.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : v.substr(b, e - b + 1);
    };
    apply_config_line(s, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), path,
                      line_no);
  }
}

// Flag values land in this mirror; only flags the user actually passed
// override the config file.
struct TrainFlags {
  std::string config_path;
  double lambda = 0, eta = 0, kappa = 0, margin_delta = 0, lr = 0, momentum = 0;
  double weight_decay = 0, center_lr = 0;
  int batch_size = 0, epochs = 0, feature_dim = 0;
  std::uint64_t seed = 0;
  std::string hidden;
  bool shared_vertex = false;
};

void add_train_flags(CLI::App* cmd, TrainFlags& f) {
  cmd->add_option("--config", f.config_path, "Config file (key = value lines)");
  cmd->add_option("--lambda", f.lambda, "Explicit w~ regularization weight");
  cmd->add_option("--eta", f.eta, "Compactness term weight");
  cmd->add_option("--kappa", f.kappa, "Compactness margin");
  cmd->add_option("--margin", f.margin_delta, "Hinge margin delta");
  cmd->add_option("--lr", f.lr, "Base learning rate");
  cmd->add_option("--momentum", f.momentum, "SGD momentum");
  cmd->add_option("--weight-decay", f.weight_decay, "Weight decay for decayed groups");
  cmd->add_option("--batch-size", f.batch_size, "Mini-batch size");
  cmd->add_option("--epochs", f.epochs, "Training epochs");
  cmd->add_option("--center-lr", f.center_lr, "Class-vertex update rate");
  cmd->add_option("--seed", f.seed, "Master seed");
  cmd->add_option("--hidden", f.hidden, "Hidden layer widths, e.g. 64,32");
  cmd->add_option("--feature-dim", f.feature_dim, "Feature dimension d");
  cmd->add_flag("--shared-vertex", f.shared_vertex,
                "Use one pooled cone vertex for all classes");
}

RunSettings resolve_settings(CLI::App* cmd, const TrainFlags& f) {
  RunSettings s;
  if (!f.config_path.empty()) apply_config_file(f.config_path, s);
  auto set = [&](const char* name, auto& dst, const auto& src) {
    if (cmd->count(name) > 0) dst = src;
  };
  set("--lambda", s.train.lambda, f.lambda);
  set("--eta", s.train.eta, f.eta);
  set("--kappa", s.train.kappa, f.kappa);
  set("--margin", s.train.margin_delta, f.margin_delta);
  set("--lr", s.train.lr, f.lr);
  set("--momentum", s.train.momentum, f.momentum);
  set("--weight-decay", s.train.weight_decay, f.weight_decay);
  set("--batch-size", s.train.batch_size, f.batch_size);
  set("--epochs", s.train.epochs, f.epochs);
  set("--center-lr", s.train.center_lr, f.center_lr);
  set("--seed", s.train.seed, f.seed);
  set("--feature-dim", s.feature_dim, f.feature_dim);
  if (cmd->count("--hidden") > 0) s.hidden_dims = parse_int_list(f.hidden, "--hidden");
  if (cmd->count("--shared-vertex") > 0) s.shared_vertex = f.shared_vertex;
  s.train.validate();
  return s;
}

// ---------------------------------------------------------------------------
// train

int do_train(CLI::App* cmd, const TrainFlags& flags, const DataOpts& data_opts,
             const std::string& out_path, std::string metrics_path) {
  const RunSettings s = resolve_settings(cmd, flags);
  const Dataset ds = load_dataset(data_opts);
  if (metrics_path.empty()) metrics_path = out_path + ".metrics.csv";

  std::string metrics = "epoch,reg,margin,compact,total,train_acc\n";
  const bool chatty = verbose();
  EpochCallback log = [&](const EpochStats& e) {
    metrics += std::to_string(e.epoch) + "," + g17(e.loss.reg) + "," +
               g17(e.loss.margin) + "," + g17(e.loss.compact) + "," + g17(e.loss.total) +
               "," + g17(e.train_accuracy) + "\n";
    if (chatty) {
      std::cerr << "epoch " << e.epoch << " total " << e.loss.total << " acc "
                << e.train_accuracy << "\n";
    }
  };

  TrainedModel model =
      train_dcepcc(ds, s.hidden_dims, s.feature_dim, s.shared_vertex, s.train, log);

  std::vector<std::vector<double>> calibration;
  calibration.reserve(ds.size());
  for (int i = 0; i < ds.size(); ++i) {
    calibration.push_back(head_scores(model.head, net_forward(model.net, ds.features[i])));
  }

  Checkpoint ckpt;
  ckpt.net = std::move(model.net);
  ckpt.head = std::move(model.head);
  ckpt.scaler = fit_scaler(calibration);
  ckpt.config = s.train;
  ckpt.dataset_provenance = ds.provenance;
  ckpt.seed = s.train.seed;
  ckpt.epochs_trained = s.train.epochs;
  save_checkpoint(ckpt, out_path);
  write_file(metrics_path, metrics);

  const EpochStats& last = model.history.back();
  std::cout << "trained " << ds.num_classes << " classes, " << ds.size() << " samples, "
            << s.train.epochs << " epochs\n"
            << "final train accuracy " << g17(last.train_accuracy) << "\n"
            << "final loss total " << g17(last.loss.total) << " (reg "
            << g17(last.loss.reg) << ", margin " << g17(last.loss.margin) << ", compact "
            << g17(last.loss.compact) << ")\n"
            << "checkpoint " << out_path << "\nmetrics " << metrics_path << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// eval

int do_eval(const std::string& ckpt_path, const DataOpts& data_opts, bool one_vs_rest,
            const std::string& out_path) {
  const Checkpoint ckpt = load_checkpoint(ckpt_path);
  const Dataset ds = load_dataset(data_opts);
  if (ds.input_dim() != ckpt.net.input_dim()) {
    throw std::runtime_error("eval: dataset dimension " + std::to_string(ds.input_dim()) +
                             " != model input dimension " +
                             std::to_string(ckpt.net.input_dim()));
  }
  if (ds.num_classes != ckpt.head.num_classes()) {
    throw std::runtime_error("eval: dataset has " + std::to_string(ds.num_classes) +
                             " classes, model has " +
                             std::to_string(ckpt.head.num_classes()));
  }

  std::vector<std::vector<double>> scores;
  scores.reserve(ds.size());
  std::vector<int> preds(ds.size());
  for (int i = 0; i < ds.size(); ++i) {
    scores.push_back(head_scores(ckpt.head, net_forward(ckpt.net, ds.features[i])));
    preds[i] = argmax(scores.back());
  }

  EvalReport report;
  report.accuracy = accuracy(preds, ds.labels);
  report.n_known = ds.size();
  report.n_unknown = 0;
  if (one_vs_rest) {
    for (int c = 0; c < ds.num_classes; ++c) {
      std::vector<double> class_scores(ds.size());
      std::vector<int> positives(ds.size());
      for (int i = 0; i < ds.size(); ++i) {
        class_scores[i] = scores[i][c];
        positives[i] = ds.labels[i] == c ? 1 : 0;
      }
      report.per_class_ap.push_back(average_precision(class_scores, positives));
    }
  }

  nlohmann::json j;
  j["accuracy"] = report.accuracy;
  j["auroc"] = nullptr;
  j["n_known"] = report.n_known;
  j["n_unknown"] = report.n_unknown;
  if (one_vs_rest) {
    j["per_class_ap"] = report.per_class_ap;
  } else {
    j["per_class_ap"] = nullptr;
  }
  const std::string text = j.dump(2) + "\n";
  std::cout << text;
  if (!out_path.empty()) write_file(out_path, text);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// openset

int do_openset(CLI::App* cmd, const TrainFlags& flags, const DataOpts& data_opts,
               int known, int repeats, double train_fraction, bool sigmoid_scores,
               const std::string& out_path) {
  const RunSettings s = resolve_settings(cmd, flags);
  const Dataset ds = load_dataset(data_opts);

  OpenSetOptions opt;
  opt.known_classes = known;
  opt.repeats = repeats;
  opt.train_fraction = train_fraction;
  opt.sigmoid_scores = sigmoid_scores;
  opt.hidden_dims = s.hidden_dims;
  opt.feature_dim = s.feature_dim;
  opt.shared_vertex = s.shared_vertex;

  opt.kind = ClassifierKind::kConic;
  const OpenSetResult conic = run_openset_protocol(ds, s.train, opt);
  opt.kind = ClassifierKind::kSoftmax;
  const OpenSetResult softmax = run_openset_protocol(ds, s.train, opt);

  std::string table = "run,auroc_dcepcc,auroc_softmax,split_hash_dcepcc,split_hash_softmax\n";
  for (int r = 0; r < repeats; ++r) {
    table += std::to_string(r) + "," + g17(conic.runs[r].auroc) + "," +
             g17(softmax.runs[r].auroc) + "," + to_hex(conic.runs[r].split_hash) + "," +
             to_hex(softmax.runs[r].split_hash) + "\n";
  }
  std::cout << table;
  std::cout << "mean_auroc_dcepcc " << g17(conic.mean_auroc) << "\n"
            << "mean_auroc_softmax " << g17(softmax.mean_auroc) << "\n"
            << "mean_closed_set_accuracy_dcepcc " << g17(conic.mean_closed_set_accuracy)
            << "\n";
  for (int r = 0; r < repeats; ++r) {
    if (conic.runs[r].split_hash != softmax.runs[r].split_hash) {
      std::cerr << "warning: split hash mismatch at run " << r << "\n";
    }
  }
  if (!out_path.empty()) write_file(out_path, table);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// grid

int do_grid(const std::string& ckpt_path, int cls, const std::string& space,
            std::vector<double> bounds, const std::vector<int>& axes, int resolution,
            const std::string& out_path) {
  const Checkpoint ckpt = load_checkpoint(ckpt_path);
  if (cls < 0 || cls >= ckpt.head.num_classes()) {
    throw std::runtime_error("grid: class " + std::to_string(cls) + " out of range");
  }
  if (resolution < 1) throw UsageError("grid: resolution must be >= 1");

  const bool feature_space = space == "feature";
  if (!feature_space && space != "input") {
    throw UsageError("grid: --space must be 'feature' or 'input'");
  }

  int ax0 = 0, ax1 = 1;
  if (feature_space) {
    const int d = ckpt.head.feature_dim();
    if (d != 2 && axes.empty()) {
      throw std::runtime_error(
          "grid: feature dimension " + std::to_string(d) +
          " > 2; select an axis pair with --axes i,j");
    }
    if (!axes.empty()) {
      if (axes.size() != 2 || axes[0] < 0 || axes[1] < 0 || axes[0] >= d ||
          axes[1] >= d || axes[0] == axes[1]) {
        throw UsageError("grid: --axes needs two distinct in-range indices");
      }
      ax0 = axes[0];
      ax1 = axes[1];
    }
  } else {
    if (ckpt.net.input_dim() != 2) {
      throw std::runtime_error("grid: input space requires a 2-dimensional input, model has " +
                               std::to_string(ckpt.net.input_dim()));
    }
    if (!axes.empty()) throw UsageError("grid: --axes applies to feature space only");
    if (bounds.empty()) throw UsageError("grid: input space requires --bounds");
  }

  if (bounds.empty()) {
    // Default window: the region's own box on the chosen axes, padded 25%.
    const ConicRegion region = to_region(ckpt.head, cls);
    if (!is_bounded(region)) {
      throw std::runtime_error(
          "grid: class region is unbounded; supply --bounds x0,x1,y0,y1");
    }
    const auto extents = axis_extents(region);
    for (int ax : {ax0, ax1}) {
      const double lo = extents[ax].first;
      const double hi = extents[ax].second;
      const double pad = 0.25 * (hi - lo);
      bounds.push_back(lo - pad);
      bounds.push_back(hi + pad);
    }
  }
  if (bounds.size() != 4 || !(bounds[0] < bounds[1]) || !(bounds[2] < bounds[3])) {
    throw UsageError("grid: --bounds needs x0,x1,y0,y1 with x0<x1 and y0<y1");
  }

  std::string csv = "x,y,g,inside\n";
  const double dx = (bounds[1] - bounds[0]) / resolution;
  const double dy = (bounds[3] - bounds[2]) / resolution;
  std::vector<double> point = feature_space ? ckpt.head.centers[cls]
                                            : std::vector<double>(2, 0.0);
  for (int iy = 0; iy < resolution; ++iy) {
    const double y = bounds[2] + (iy + 0.5) * dy;
    for (int ix = 0; ix < resolution; ++ix) {
      const double x = bounds[0] + (ix + 0.5) * dx;
      double g = 0.0;
      if (feature_space) {
        point[ax0] = x;
        point[ax1] = y;
        g = head_scores(ckpt.head, point)[cls];
      } else {
        point[0] = x;
        point[1] = y;
        g = head_scores(ckpt.head, net_forward(ckpt.net, point))[cls];
      }
      csv += g17(x) + "," + g17(y) + "," + g17(g) + "," + (g >= 0.0 ? "1" : "0") + "\n";
    }
  }
  write_file(out_path, csv);
  std::cout << "grid " << out_path << " (" << resolution << "x" << resolution
            << " cells)\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// gradcheck

int do_gradcheck(std::uint64_t seed, const std::string& dims, const std::string& classes,
                 double eps, double tol, bool corrupt) {
  GradCheckOptions opt;
  opt.seed = seed;
  opt.feature_dims = parse_int_list(dims, "--dims");
  opt.class_counts = parse_int_list(classes, "--classes");
  opt.epsilon = eps;
  opt.tolerance = tol;
  opt.corrupt = corrupt;

  const GradCheckReport report = run_gradcheck(opt);
  for (const GradCheckGroup& g : report.groups) {
    std::cout << g.name << " max_rel_error " << g17(g.max_rel_error) << "\n";
  }
  std::cout << "overall max_rel_error " << g17(report.max_rel_error) << " tolerance "
            << g17(opt.tolerance) << "\n"
            << (report.passed ? "PASS" : "FAIL") << "\n";
  return report.passed ? kExitOk : kExitCheckFailed;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Compact polyhedral conic classifier: training, geometry analysis, "
               "and closed/open-set evaluation"};
  app.require_subcommand(1);

  // train
  auto* train_cmd = app.add_subcommand("train", "Train a model and write a checkpoint");
  TrainFlags train_flags;
  DataOpts train_data;
  std::string train_out, train_metrics;
  add_train_flags(train_cmd, train_flags);
  add_data_flags(train_cmd, train_data);
  train_cmd->add_option("--out", train_out, "Checkpoint output path")->required();
  train_cmd->add_option("--metrics", train_metrics,
                        "Metrics CSV path (default: <out>.metrics.csv)");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Closed-set evaluation of a checkpoint");
  DataOpts eval_data;
  std::string eval_ckpt, eval_out;
  bool eval_ovr = false;
  eval_cmd->add_option("--ckpt", eval_ckpt, "Checkpoint path")->required();
  add_data_flags(eval_cmd, eval_data);
  eval_cmd->add_flag("--one-vs-rest", eval_ovr,
                     "Also report average precision per positive class");
  eval_cmd->add_option("--out", eval_out, "Write the report JSON here as well");

  // openset
  auto* open_cmd = app.add_subcommand(
      "openset", "Known/unknown protocol for the conic and soft-max heads");
  TrainFlags open_flags;
  DataOpts open_data;
  std::string open_out;
  int open_known = 6, open_repeats = 5;
  double open_frac = 0.6;
  bool open_sigmoid = false;
  add_train_flags(open_cmd, open_flags);
  add_data_flags(open_cmd, open_data);
  open_cmd->add_option("--known", open_known, "Known classes per repeat")
      ->capture_default_str();
  open_cmd->add_option("--repeats", open_repeats, "Protocol repeats")
      ->capture_default_str();
  open_cmd->add_option("--train-fraction", open_frac, "Train fraction per repeat")
      ->capture_default_str();
  open_cmd->add_flag("--sigmoid", open_sigmoid,
                     "Sigmoid score conversion instead of max-abs scaling");
  open_cmd->add_option("--out", open_out, "Comparison table CSV path");

  // grid
  auto* grid_cmd = app.add_subcommand("grid", "Export a score grid CSV for plotting");
  std::string grid_ckpt, grid_space = "feature", grid_out;
  int grid_class = 0, grid_resolution = 100;
  std::vector<double> grid_bounds;
  std::vector<int> grid_axes;
  grid_cmd->add_option("--ckpt", grid_ckpt, "Checkpoint path")->required();
  grid_cmd->add_option("--class", grid_class, "Class index")->capture_default_str();
  grid_cmd->add_option("--space", grid_space, "Grid space: feature or input")
      ->capture_default_str();
  grid_cmd->add_option("--bounds", grid_bounds, "Window x0,x1,y0,y1")
      ->delimiter(',')
      ->expected(4);
  grid_cmd->add_option("--axes", grid_axes, "Feature axis pair i,j when d > 2")
      ->delimiter(',')
      ->expected(2);
  grid_cmd->add_option("--resolution", grid_resolution, "Cells per side")
      ->capture_default_str();
  grid_cmd->add_option("--out", grid_out, "Grid CSV output path")->required();

  // gradcheck
  auto* check_cmd = app.add_subcommand(
      "gradcheck", "Compare analytic gradients against central finite differences");
  std::uint64_t check_seed = 42;
  std::string check_dims = "2,4,8", check_classes = "2,3,5";
  double check_eps = 1e-5, check_tol = 1e-4;
  bool check_corrupt = false;
  check_cmd->add_option("--seed", check_seed, "Problem seed")->capture_default_str();
  check_cmd->add_option("--dims", check_dims, "Feature dims to test")
      ->capture_default_str();
  check_cmd->add_option("--classes", check_classes, "Class counts to test")
      ->capture_default_str();
  check_cmd->add_option("--eps", check_eps, "Perturbation")->capture_default_str();
  check_cmd->add_option("--tol", check_tol, "Failure threshold")->capture_default_str();
  check_cmd->add_flag("--corrupt", check_corrupt)->group("");  // test hook

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (train_cmd->parsed()) {
      return do_train(train_cmd, train_flags, train_data, train_out, train_metrics);
    }
    if (eval_cmd->parsed()) {
      return do_eval(eval_ckpt, eval_data, eval_ovr, eval_out);
    }
    if (open_cmd->parsed()) {
      return do_openset(open_cmd, open_flags, open_data, open_known, open_repeats,
                        open_frac, open_sigmoid, open_out);
    }
    if (grid_cmd->parsed()) {
      return do_grid(grid_ckpt, grid_class, grid_space, grid_bounds, grid_axes,
                     grid_resolution, grid_out);
    }
    if (check_cmd->parsed()) {
      return do_gradcheck(check_seed, check_dims, check_classes, check_eps, check_tol,
                          check_corrupt);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

int run(const std::vector<std::string>& args) {
  std::vector<std::string> owned;
  owned.reserve(args.size() + 1);
  owned.push_back("dcepcc");
  owned.insert(owned.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(owned.size());
  for (const std::string& a : owned) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace dcepcc::cli
