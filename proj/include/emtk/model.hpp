#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "emtk/data.hpp"
#include "emtk/lexicon.hpp"
#include "emtk/nn/layers.hpp"

namespace emtk {

using Mat = nn::Tensor2<double>;
using Dense = nn::DenseLayer<double>;
using Table = nn::EmbeddingTable<double>;

enum class Target { Empathy, Distress };
std::string_view to_string(Target t);
Target target_from_string(std::string_view s);

/// per_score: one 1->score_units layer per score. per_group: one layer for
/// the personality block and one for the IRI block (plus one for income).
enum class NumericGrouping { PerScore, PerGroup };
std::string_view to_string(NumericGrouping g);
NumericGrouping grouping_from_string(std::string_view s);

/// Layer names that carry the kernel regularizer by default.
std::vector<std::string> default_regularized_layers();

struct ModelConfig {
  Target mode = Target::Empathy;
  std::size_t emb_dim = 768;
  std::size_t shared_units = 128;
  std::size_t task_units = 16;
  std::size_t entity_dim = 3;
  std::size_t cat_units1 = 32;
  std::size_t cat_units2 = 16;
  std::size_t score_units = 8;
  std::size_t numeric_units = 32;
  std::size_t nrc_units = 8;
  std::size_t empath_units = 16;
  std::size_t lexical_units = 48;
  std::size_t fusion_units = 16;
  std::size_t emotion_classes = 7;
  double dropout = 0.2;
  double l2 = 5e-4;
  std::vector<std::string> regularized = default_regularized_layers();
  NumericGrouping grouping = NumericGrouping::PerScore;
  bool include_income = false;
  /// Vocabulary sizes (UNKNOWN included) for gender, education, race, age.
  std::array<std::size_t, kCategoricalCount> cat_vocab = {1, 1, 1, 1};
  /// Lexical feature order; must be empty in empathy mode.
  FeatureSpec lexical;

  /// 9 psychological scores, plus income when enabled.
  std::size_t numeric_count() const { return kPersonalityCount + kIriCount + (include_income ? 1 : 0); }
  /// Width of the fusion concat [T1; T2; C; N] plus L in distress mode.
  std::size_t fusion_width() const;
  /// Throws ConfigError on inconsistent settings.
  void validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// Default sizes for a mode and fitted vocabularies.
ModelConfig default_config(Target mode, const CategoricalVocab& vocab, std::size_t emotion_classes);

/// One batch of network inputs; rows are samples.
struct Batch {
  Mat essay;                                                ///< n x emb_dim
  std::array<std::vector<std::size_t>, kCategoricalCount> cats;  ///< n indices each
  Mat numeric;                                              ///< n x numeric_count, standardized
  Mat lexical;                                              ///< n x lexical width (0 cols for empathy)

  std::size_t size() const { return static_cast<std::size_t>(essay.rows()); }
  /// Rows in the given order.
  Batch select(const std::vector<std::size_t>& rows) const;
};

struct Targets {
  Mat score;                       ///< n x 1
  Mat bin;                         ///< n x 1, 0 or 1
  std::vector<std::size_t> emotion;  ///< class index per row

  std::size_t size() const { return static_cast<std::size_t>(score.rows()); }
  Targets select(const std::vector<std::size_t>& rows) const;
};

struct Outputs {
  Mat score;    ///< n x 1, linear
  Mat bin;      ///< n x 1, sigmoid
  Mat emotion;  ///< n x E, softmax rows
};

struct NamedTensor {
  std::string name;
  Mat* value;
};
struct ConstNamedTensor {
  std::string name;
  const Mat* value;
};

/// All trainable tensors of one network.
struct NetworkParams {
  ModelConfig config;

  Dense text_shared, text_empathy, text_emotion;
  Dense head_bin, head_emotion;
  std::array<Table, kCategoricalCount> cat_embed;
  Dense cat_dense1, cat_dense2;
  std::vector<Dense> num_in;  ///< per score or per group
  Dense num_merge;
  Dense lex_nrc, lex_empath, lex_merge;  ///< distress only
  Dense fusion_hidden, fusion_out;

  /// Dense layers with their names, canonical order.
  std::vector<std::pair<std::string, Dense*>> layers();
  std::vector<std::pair<std::string, const Dense*>> layers() const;
  /// Every trainable tensor ("<layer>.W", "<layer>.b", "<table>.E"),
  /// canonical order.
  std::vector<NamedTensor> tensors();
  std::vector<ConstNamedTensor> tensors() const;

  std::size_t param_count() const;
  /// sum over layers of l2 * ||W||^2, canonical order.
  double l2_penalty() const;
  /// Same structure, every tensor zero.
  NetworkParams zeros_like() const;
  /// Rounds every value to float32 and back.
  void round_to_storage();
};

/// Builds the network with Glorot-uniform kernels, zero biases and
/// U(-0.05, 0.05) entity embeddings drawn from seed.
NetworkParams build(const ModelConfig& config, std::uint64_t seed);

/// Intermediate values kept for backward.
struct ForwardCache {
  Mat dropout_mask;
  nn::DenseCache<double> text_shared, text_empathy, text_emotion, head_bin, head_emotion;
  nn::DenseCache<double> cat_dense1, cat_dense2;
  std::vector<nn::DenseCache<double>> num_in;
  nn::DenseCache<double> num_merge;
  nn::DenseCache<double> lex_nrc, lex_empath, lex_merge;
  nn::DenseCache<double> fusion_hidden, fusion_out;
  std::array<std::vector<std::size_t>, kCategoricalCount> cats;
};

/// train == true applies dropout drawn from rng (required then). Eval mode
/// is deterministic and ignores rng.
Outputs forward(const NetworkParams& params, const Batch& batch, bool train, nn::Rng* rng,
                ForwardCache* cache = nullptr);

/// Gradients of an arbitrary scalar given its gradients w.r.t. the three head
/// outputs; each dense layer adds its own L2 term. Returns zeros_like-shaped
/// gradients.
NetworkParams backward(const NetworkParams& params, const ForwardCache& cache, const Mat& d_score,
                       const Mat& d_bin, const Mat& d_emotion);

struct MultiTaskLoss {
  double reg_mse = 0.0;
  double bin_bce = 0.0;
  double emo_ce = 0.0;
  double l2_penalty = 0.0;
  double total = 0.0;
};

/// total = ((reg_mse + bin_bce) + emo_ce) + l2_penalty.
MultiTaskLoss compute_loss(const NetworkParams& params, const Outputs& out, const Targets& targets);

struct LossAndGrads {
  MultiTaskLoss loss;
  NetworkParams grads;
};

LossAndGrads loss_and_grads(const NetworkParams& params, const Batch& batch,
                            const Targets& targets, bool train, nn::Rng* rng);

}  // namespace emtk
