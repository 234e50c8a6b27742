#ifndef SECTORCAST_CHECKPOINT_HPP
#define SECTORCAST_CHECKPOINT_HPP

#include <string>

#include "sectorcast/lstm.hpp"

namespace sectorcast {

// Versioned binary container: ModelConfig, every parameter tensor
// (shape-tagged, 64-bit little-endian floats), the fitted ScalerParams and
// the training seed. Load rejects wrong magic/version and any tensor whose
// tagged shape disagrees with the stored config.
struct Checkpoint {
    ModelParams params;
    ScalerParams scaler;
    std::uint64_t seed = 0;
};

std::string checkpoint_to_bytes(const Checkpoint& checkpoint);
Checkpoint checkpoint_from_bytes(const std::string& bytes);

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace sectorcast

#endif  // SECTORCAST_CHECKPOINT_HPP
