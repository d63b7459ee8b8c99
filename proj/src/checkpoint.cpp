#include "dcepcc/checkpoint.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace dcepcc {

namespace {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
  return json{{"rows", m.rows}, {"cols", m.cols}, {"data", m.data}};
}

Matrix matrix_from_json(const json& j) {
  Matrix m(j.at("rows").get<int>(), j.at("cols").get<int>());
  m.data = j.at("data").get<std::vector<double>>();
  if (m.data.size() != static_cast<std::size_t>(m.rows) * m.cols) {
    throw std::runtime_error("checkpoint: matrix payload size mismatch");
  }
  return m;
}

json config_to_json(const TrainConfig& cfg) {
  return json{{"lambda", cfg.lambda},
              {"eta", cfg.eta},
              {"kappa", cfg.kappa},
              {"margin_delta", cfg.margin_delta},
              {"lr", cfg.lr},
              {"momentum", cfg.momentum},
              {"weight_decay", cfg.weight_decay},
              {"batch_size", cfg.batch_size},
              {"epochs", cfg.epochs},
              {"center_lr", cfg.center_lr},
              {"seed", cfg.seed}};
}

TrainConfig config_from_json(const json& j) {
  TrainConfig cfg;
  cfg.lambda = j.at("lambda").get<double>();
  cfg.eta = j.at("eta").get<double>();
  cfg.kappa = j.at("kappa").get<double>();
  cfg.margin_delta = j.at("margin_delta").get<double>();
  cfg.lr = j.at("lr").get<double>();
  cfg.momentum = j.at("momentum").get<double>();
  cfg.weight_decay = j.at("weight_decay").get<double>();
  cfg.batch_size = j.at("batch_size").get<int>();
  cfg.epochs = j.at("epochs").get<int>();
  cfg.center_lr = j.at("center_lr").get<double>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  return cfg;
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  json j;
  j["format_version"] = ckpt.format_version;
  j["net"] = {{"layer_dims", ckpt.net.layer_dims}, {"biases", ckpt.net.biases}};
  json weights = json::array();
  for (const Matrix& m : ckpt.net.weights) weights.push_back(matrix_to_json(m));
  j["net"]["weights"] = std::move(weights);
  j["head"] = {{"shared_vertex", ckpt.head.shared_vertex},
               {"w_tilde", ckpt.head.w_tilde},
               {"gamma_tilde", ckpt.head.gamma_tilde},
               {"centers", ckpt.head.centers},
               {"b", ckpt.head.b}};
  if (ckpt.scaler.has_value()) {
    j["scaler"] = {{"max_abs", ckpt.scaler->max_abs}};
  } else {
    j["scaler"] = nullptr;
  }
  j["config"] = config_to_json(ckpt.config);
  j["provenance"] = {{"dataset", ckpt.dataset_provenance},
                     {"seed", ckpt.seed},
                     {"epochs", ckpt.epochs_trained}};

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_checkpoint: cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_checkpoint: cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("load_checkpoint: '" + path + "' is not valid JSON: " +
                             e.what());
  }
  Checkpoint ckpt;
  ckpt.format_version = j.at("format_version").get<int>();
  if (ckpt.format_version != kCheckpointFormatVersion) {
    throw std::runtime_error("load_checkpoint: unsupported format_version " +
                             std::to_string(ckpt.format_version) + " (expected " +
                             std::to_string(kCheckpointFormatVersion) + ")");
  }
  const json& net = j.at("net");
  ckpt.net.layer_dims = net.at("layer_dims").get<std::vector<int>>();
  ckpt.net.biases = net.at("biases").get<std::vector<std::vector<double>>>();
  for (const json& m : net.at("weights")) ckpt.net.weights.push_back(matrix_from_json(m));
  ckpt.net.validate();

  const json& head = j.at("head");
  ckpt.head.shared_vertex = head.at("shared_vertex").get<bool>();
  ckpt.head.w_tilde = head.at("w_tilde").get<std::vector<std::vector<double>>>();
  ckpt.head.gamma_tilde = head.at("gamma_tilde").get<std::vector<std::vector<double>>>();
  ckpt.head.centers = head.at("centers").get<std::vector<std::vector<double>>>();
  ckpt.head.b = head.at("b").get<std::vector<double>>();
  ckpt.head.validate();

  if (!j.at("scaler").is_null()) {
    ScoreScaler scaler;
    scaler.max_abs = j.at("scaler").at("max_abs").get<std::vector<double>>();
    ckpt.scaler = std::move(scaler);
  }
  ckpt.config = config_from_json(j.at("config"));
  const json& prov = j.at("provenance");
  ckpt.dataset_provenance = prov.at("dataset").get<std::string>();
  ckpt.seed = prov.at("seed").get<std::uint64_t>();
  ckpt.epochs_trained = prov.at("epochs").get<int>();
  return ckpt;
}

}  // namespace dcepcc
