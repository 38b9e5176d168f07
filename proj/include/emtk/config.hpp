#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "emtk/data.hpp"
#include "emtk/lexicon.hpp"
#include "emtk/model.hpp"
#include "emtk/trainer.hpp"

namespace emtk {

struct RunPaths {
  std::string train;
  std::string dev;
  std::string test;
  std::string out_dir = "out";
  std::string contractions;  ///< empty: shipped list
  std::string acronyms;      ///< empty: shipped list
  std::string nrc_eil;
  std::string nrc_vad;
  std::string empath_dir;
};

struct EmbeddingSettings {
  /// Generate stand-in vectors from the cleaned text instead of reading EMB1.
  bool pseudo = false;
  std::size_t dim = 768;
  std::string train;
  std::string dev;
  std::string test;
};

/// One declarative run. Every field has a dotted key ("train.epochs",
/// "paths.out_dir", ...) usable in the JSON file and as a CLI flag.
struct RunConfig {
  Target target = Target::Empathy;
  std::uint64_t seed = 13;
  RunPaths paths;
  EmbeddingSettings embeddings;
  ColumnMapping columns;
  std::size_t max_len = 200;
  /// Model sizes; mode, vocabulary sizes and class count are filled from the
  /// fitted data at train time.
  ModelConfig model;
  /// Lexical features for the distress model.
  FeatureSpec lexical = FeatureSpec::distress_default();
  TrainConfig train;
  std::string predict_split = "test";
  std::string evaluate_split = "dev";
  std::string evaluate_empathy;   ///< prediction file; empty: derived
  std::string evaluate_distress;  ///< prediction file; empty: derived
};

/// Dotted keys with their default values rendered as JSON text, in a stable
/// order.
std::vector<std::pair<std::string, std::string>> config_keys();

/// Parses a JSON config (empty text means all defaults), then applies
/// overrides given as dotted key and raw value. Unknown keys are
/// configuration errors.
RunConfig parse_run_config(const std::string& json_text,
                           const std::vector<std::pair<std::string, std::string>>& overrides = {});

/// Effective configuration as JSON text.
std::string dump_run_config(const RunConfig& cfg);

}  // namespace emtk
