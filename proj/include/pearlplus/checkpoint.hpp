#pragma once

#include <cstdint>
#include <string>

#include "pearlplus/meta.hpp"

namespace pearlplus {

inline constexpr char kCheckpointMagic[4] = {'P', 'P', 'C', 'K'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointHeader {
  std::uint32_t version = kCheckpointVersion;
  std::uint64_t config_hash = 0;
  std::int64_t iteration = 0;
  std::uint64_t env_steps = 0;
};

// Binary checkpoint: magic, version header, config hash, then the full
// trainer state (parameters, optimizer moments, RNG streams, replay buffers,
// counters). Round-trip restores training bit-exactly.
void save_checkpoint(const std::string& path, const MetaTrainer& trainer);

// Refuses to load when the version or the config hash do not match.
void load_checkpoint(const std::string& path, MetaTrainer& trainer);

CheckpointHeader read_checkpoint_header(const std::string& path);

// Human-readable JSON summary (version, iteration, env steps, config hash).
std::string inspect_checkpoint(const std::string& path);

}  // namespace pearlplus
