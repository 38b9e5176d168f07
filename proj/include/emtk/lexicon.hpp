#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace emtk {

/// Word -> real intensity for one dimension (an NRC emotion or a VAD axis).
struct IntensityLexicon {
  std::string name;
  std::unordered_map<std::string, double> scores;

  double lookup(std::string_view word) const;
};

/// Named word set (Empath style category).
struct CategoryLexicon {
  std::string name;
  std::unordered_set<std::string> words;

  bool contains(std::string_view word) const { return words.contains(std::string(word)); }
};

/// Ordered lexical feature names for one model. The order is the column order
/// of the lexical input block and is stored in checkpoints.
struct FeatureSpec {
  std::vector<std::string> nrc;
  std::vector<std::string> empath;

  /// Selected distress features: 4 emotion-intensity dimensions plus arousal
  /// and dominance, and 15 categories.
  static FeatureSpec distress_default();

  std::size_t width() const { return nrc.size() + empath.size(); }
  bool empty() const { return nrc.empty() && empath.empty(); }
  friend bool operator==(const FeatureSpec&, const FeatureSpec&) = default;
};

/// Sum of lexicon scores over tokens; absent words contribute 0.
double nrc_score(std::span<const std::string> tokens, const IntensityLexicon& lex);

/// Percentage of tokens that belong to the category, relative to the number
/// of tokens passed (the attention length). 0 for an empty sequence.
double empath_score(std::span<const std::string> tokens, const CategoryLexicon& lex);

/// All lexicons a FeatureSpec refers to, keyed by dimension/category name.
struct LexiconSet {
  std::map<std::string, IntensityLexicon> intensity;
  std::map<std::string, CategoryLexicon> categories;

  /// Throws ConfigError naming the first dimension or category the set lacks.
  void require(const FeatureSpec& spec) const;
  /// Feature vector in spec order: NRC sums first, then Empath percentages.
  Eigen::VectorXd features(std::span<const std::string> tokens, const FeatureSpec& spec) const;
};

/// NRC emotion-intensity file: word<TAB>emotion<TAB>score. One lexicon per
/// emotion found in the file.
std::map<std::string, IntensityLexicon> load_nrc_eil(const std::filesystem::path& path);
/// NRC VAD file: word<TAB>valence<TAB>arousal<TAB>dominance. A first line whose
/// numeric fields do not parse is treated as a header.
std::map<std::string, IntensityLexicon> load_nrc_vad(const std::filesystem::path& path);
/// One file per category, one word per line. The file stem is the category
/// name; files ending in .txt or with no extension are read.
std::map<std::string, CategoryLexicon> load_category_dir(const std::filesystem::path& dir);

/// Per-column z-scoring with population (1/N) standard deviation.
struct Standardizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd std;
  /// Columns whose variance was zero; their std is stored as 1.
  std::vector<std::size_t> zero_variance;

  std::size_t size() const { return static_cast<std::size_t>(mean.size()); }
  Eigen::VectorXd transform(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd transform(const Eigen::MatrixXd& rows) const;
  Eigen::VectorXd inverse_transform(const Eigen::VectorXd& z) const;
};

/// Rows are samples. Requires at least 2 rows.
Standardizer fit_standardizer(const Eigen::MatrixXd& train);

struct RankedFeature {
  std::string name;
  double r = 0.0;
  bool degenerate = false;  ///< constant column; r reported as 0
};

/// Columns sorted by descending Pearson r against labels. Ties keep column
/// order.
std::vector<RankedFeature> rank_features(const Eigen::MatrixXd& candidates,
                                         const std::vector<std::string>& names,
                                         const Eigen::VectorXd& labels);

}  // namespace emtk
