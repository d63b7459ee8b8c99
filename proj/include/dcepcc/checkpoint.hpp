#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "dcepcc/evaluation.hpp"
#include "dcepcc/model.hpp"
#include "dcepcc/training.hpp"

namespace dcepcc {

inline constexpr int kCheckpointFormatVersion = 1;

// Everything needed to reload and rerun a trained model: network and head
// parameters (vertices included), the optional score scaler, the training
// configuration, and where the data came from. Serialized as JSON with
// value-exact floats, so save -> load -> save is byte identical.
struct Checkpoint {
  int format_version = kCheckpointFormatVersion;
  FeatureNet net;
  ConicHead head;
  std::optional<ScoreScaler> scaler;
  TrainConfig config;
  std::string dataset_provenance;
  std::uint64_t seed = 0;
  int epochs_trained = 0;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);

// Throws std::runtime_error on IO/parse problems or a format_version this
// build does not understand.
Checkpoint load_checkpoint(const std::string& path);

}  // namespace dcepcc
