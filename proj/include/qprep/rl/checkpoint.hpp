#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "qprep/rl/trainer.hpp"

namespace qprep::rl {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view data);

/// Binary layout (little-endian host order): magic "QPRPCKPT", u32 version,
/// u64 config hash, network shape, training counters, learner RNG state,
/// online and target parameters, Adam step count and moments. Written to a
/// temporary file and renamed into place.
void save_checkpoint(const std::string& path, const TrainState& state, std::uint64_t config_hash);

struct LoadedCheckpoint {
  TrainState state;
  std::uint64_t config_hash = 0;
};

/// Throws InvalidArgument on a bad magic, version or truncated file.
LoadedCheckpoint load_checkpoint(const std::string& path, const AdamConfig& adam);

}  // namespace qprep::rl
