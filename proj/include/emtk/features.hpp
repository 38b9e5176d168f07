#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "emtk/data.hpp"
#include "emtk/embedding.hpp"
#include "emtk/lexicon.hpp"
#include "emtk/model.hpp"
#include "emtk/preprocess.hpp"

namespace emtk {

/// Statistics fitted on the training split and reused for every split.
struct FeatureArtifacts {
  Target target = Target::Empathy;
  CategoricalVocab vocab;
  LabelVocab emotions;
  Standardizer numeric;
  Standardizer lexical;  ///< empty unless target is distress
  FeatureSpec spec;      ///< empty unless target is distress
  bool include_income = false;
  std::size_t emb_dim = 0;

  friend bool operator==(const FeatureArtifacts& a, const FeatureArtifacts& b);
};

/// Model-ready rows of one split.
struct FeatureTable {
  std::vector<std::string> ids;
  Batch inputs;
  std::optional<Targets> targets;  ///< present when the split is labeled

  std::size_t size() const { return ids.size(); }
};

/// clean_text over every essay, in record order.
std::vector<std::string> clean_all(const Dataset& ds, const CleanConfig& cfg);

/// Personality and IRI columns (plus income when enabled), unstandardized.
Eigen::MatrixXd numeric_matrix(const Dataset& ds, bool include_income);

/// Lexical features of each cleaned essay over its first max_len tokens,
/// unstandardized, in spec order.
Eigen::MatrixXd lexical_matrix(const std::vector<std::string>& cleaned, const CleanConfig& cfg,
                               const LexiconSet& lex, const FeatureSpec& spec);

/// Fits vocabularies and standardizers on the training split.
FeatureArtifacts fit_artifacts(const Dataset& train, Target target, const Eigen::MatrixXd& numeric_raw,
                               const Eigen::MatrixXd& lexical_raw, const FeatureSpec& spec,
                               bool include_income, std::size_t emb_dim);

/// Throws DataError listing every id missing from the store.
void require_embeddings(const Dataset& ds, const EmbeddingStore& store);

FeatureTable assemble(const Dataset& ds, const EmbeddingStore& store, const FeatureArtifacts& art,
                      const Eigen::MatrixXd& numeric_raw, const Eigen::MatrixXd& lexical_raw);

/// Tab-separated: id, four category indices, standardized numeric and
/// lexical columns, then empathy, distress, empathy_bin, distress_bin,
/// emotion (empty cells when unlabeled). Values use the shortest exact
/// decimal form. Essay vectors are stored separately in EMB1.
std::string features_to_tsv(const FeatureTable& table, const FeatureArtifacts& art);
FeatureTable features_from_tsv(const std::filesystem::path& path, const EmbeddingStore& store,
                               const FeatureArtifacts& art);

std::string artifacts_to_json(const FeatureArtifacts& art);
FeatureArtifacts artifacts_from_json(const std::string& text);

}  // namespace emtk
