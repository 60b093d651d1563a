#pragma once

#include <filesystem>

#include "sae_info/sae_trainer.hpp"

namespace sae_info {

// Binary layout is documented in docs/checkpoint_format.md.
inline constexpr char kCheckpointMagic[8] = {'S', 'A', 'E', 'C', 'K', 'P', 'T', '1'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  long iteration = 0;
  double train_mse = 0.0;
  bool tied = false;
  SAEModel model;
};

void save_checkpoint(const std::filesystem::path& path, const TrainingSnapshot& snapshot,
                     bool tied = false);

/// Throws FormatError / LengthError naming the file on any corruption.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace sae_info
