#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "core_kge/dataset.hpp"
#include "core_kge/model.hpp"
#include "core_kge/trainer.hpp"

namespace core_kge {

/// On disk a checkpoint is a pair of files: a JSON manifest at the given path
/// (format version, model config, vocabulary, array layout) and a sibling
/// binary blob of little-endian float64 arrays in manifest order.
struct Checkpoint {
  ModelConfig model;
  Vocabulary vocab;
  Parameters params;
  std::optional<OptimizerState> optimizer;
  std::int64_t step = 0;
};

/// Writes manifest to `path` and the blob to `path` + ".bin". Throws
/// RuntimeFailure on I/O errors.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);

/// Throws DataError on a missing file, unrecognized version, or any shape
/// inconsistency. Round-trips parameters bit-exactly.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace core_kge
