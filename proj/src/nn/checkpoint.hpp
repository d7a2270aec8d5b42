#pragma once

#include <cstdint>
#include <string>

#include "nn/policy.hpp"

namespace parkour::nn {

/// Trailing checkpoint metadata (provenance, not architecture).
struct CheckpointMeta {
  std::uint64_t iteration = 0;
  std::uint64_t seed = 0;
  std::uint64_t config_digest = 0;  // digest of the training configuration
  std::uint8_t strategy = 0;        // 0 = pre-training; adaptation runs tag 1..4
};

/// Binary checkpoint: magic, format version, architecture digest, named shape
/// table, little-endian float32 parameter block, metadata. Parameters are
/// stored rounded to float32.
void save_checkpoint(const std::string& path, const ActorCritic& net,
                     const CheckpointMeta& meta);

/// Loads into an already-built net; the architecture digest and the full
/// shape table must match exactly.
CheckpointMeta load_checkpoint(const std::string& path, ActorCritic& net);

/// Reads only the header (for inspection / compatibility checks).
struct CheckpointInfo {
  std::uint32_t version = 0;
  std::uint64_t arch_digest = 0;
  std::uint64_t param_count = 0;
  CheckpointMeta meta;
};
CheckpointInfo inspect_checkpoint(const std::string& path);

}  // namespace parkour::nn
