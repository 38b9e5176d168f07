#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "emtk/data.hpp"
#include "emtk/lexicon.hpp"
#include "emtk/model.hpp"

namespace emtk {

/// Everything needed to run a trained model on new essays.
struct ModelBundle {
  NetworkParams params;
  CategoricalVocab vocab;
  LabelVocab emotions;
  Standardizer numeric;
  Standardizer lexical;  ///< empty in empathy mode
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// EMTK1 layout: "EMTK", u32 version, u32 JSON byte length, JSON header
/// (config, vocabularies, standardizers, tensor manifest), then every tensor
/// as little-endian float32 in manifest order.
std::string serialize_checkpoint(const ModelBundle& bundle);
void save_checkpoint(const ModelBundle& bundle, const std::filesystem::path& path);

/// Throws FormatError for corrupt or truncated input and on a version or
/// tensor-shape mismatch; ConfigError when expected_mode is given and differs.
ModelBundle parse_checkpoint(std::string_view bytes, std::optional<Target> expected_mode = std::nullopt);
ModelBundle load_checkpoint(const std::filesystem::path& path,
                            std::optional<Target> expected_mode = std::nullopt);

}  // namespace emtk
