#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "emtk/data.hpp"
#include "emtk/lexicon.hpp"
#include "emtk/model.hpp"

namespace emtk::testing {

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// Labeled corpus in the shared-task column layout. Essays mix affect words
/// from the tiny lexicons with filler, contractions, digits and accents;
/// scores are deterministic functions of the seed.
std::string synthetic_corpus_tsv(std::size_t rows, std::uint64_t seed, const std::string& id_prefix = "m");

/// Writes nrc_eil.tsv, nrc_vad.tsv and an empath/ directory covering the
/// default distress feature spec.
void write_tiny_lexicons(const std::filesystem::path& dir);

/// Writes train/dev/test splits and tiny lexicons under dir and returns
/// config overrides for a fast pseudo-embedding run writing to dir/out.
std::vector<std::pair<std::string, std::string>> write_run_inputs(const std::filesystem::path& dir,
                                                                  Target target);

/// Vocabulary with the shared-task corpus category counts: 3 genders,
/// 7 education levels, 6 races, 4 age buckets (sizes 4, 8, 7, 5 with UNKNOWN).
CategoricalVocab corpus_shaped_vocab();

/// Small network config for gradient checks: emb_dim 8 and narrow layers.
ModelConfig shrunken_config(Target mode);

/// Random batch and targets for a config.
struct RandomBatch {
  Batch batch;
  Targets targets;
};
RandomBatch random_batch(const ModelConfig& c, std::size_t n, std::uint64_t seed);

}  // namespace emtk::testing
