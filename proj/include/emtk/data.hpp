#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace emtk {

inline constexpr double kBinThreshold = 4.0;
inline constexpr std::size_t kPersonalityCount = 5;
inline constexpr std::size_t kIriCount = 4;

/// Gold labels of one essay. Absent for prediction-only input.
struct Labels {
  double empathy = 0.0;
  double distress = 0.0;
  int empathy_bin = 0;
  int distress_bin = 0;
  std::string emotion;
};

/// Personality order: conscientiousness, openness, extraversion, agreeableness,
/// stability. IRI order: fantasy, perspective_taking, empathic_concern,
/// personal_distress.
struct EssayRecord {
  std::string id;
  std::string essay;
  std::string gender;
  std::string education;
  std::string race;
  int age = 0;
  double income = 0.0;
  std::array<double, kPersonalityCount> personality{};
  std::array<double, kIriCount> iri{};
  std::optional<Labels> labels;
};

enum class Split { Train, Dev, Test };

std::string_view to_string(Split split);
Split split_from_string(std::string_view name);

/// Maps logical fields to TSV header names. Defaults follow the shared-task
/// release files.
struct ColumnMapping {
  std::string id = "message_id";
  std::string essay = "essay";
  std::string gender = "gender";
  std::string education = "education";
  std::string race = "race";
  std::string age = "age";
  std::string income = "income";
  std::array<std::string, kPersonalityCount> personality = {
      "personality_conscientiousness", "personality_openess", "personality_extraversion",
      "personality_agreeableness", "personality_stability"};
  std::array<std::string, kIriCount> iri = {"iri_fantasy", "iri_perspective_taking",
                                            "iri_empathatic_concern", "iri_personal_distress"};
  std::string empathy = "empathy";
  std::string distress = "distress";
  std::string empathy_bin = "empathy_bin";
  std::string distress_bin = "distress_bin";
  std::string emotion = "emotion";
};

struct Dataset {
  std::vector<EssayRecord> records;
  Split split = Split::Train;
  ColumnMapping mapping;
  /// Non-fatal findings from loading, e.g. a bin label that disagrees with
  /// its score.
  std::vector<std::string> warnings;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }
  bool labeled() const;
};

/// Reads a tab-separated file with a header row. Label columns are optional:
/// when the score or emotion columns are missing every record is unlabeled.
/// A missing bin column is derived from the score.
Dataset load_tsv(const std::filesystem::path& path, const ColumnMapping& mapping, Split split);

enum class AgeBucket { Le25, From26To40, From41To60, Ge61 };

inline constexpr std::array<std::string_view, 4> kAgeBucketTokens = {"AGE_LE25", "AGE_26_40",
                                                                     "AGE_41_60", "AGE_GE61"};

/// Age 25 belongs to the lowest bucket so that every integer age has one.
AgeBucket bucket_age(int age);
std::string_view age_token(AgeBucket bucket);
/// Inclusive lower bound of a bucket, in years.
int bucket_lower_bound(AgeBucket bucket);

/// Dense index over observed category tokens; index 0 is reserved for
/// tokens never seen during fitting.
class Vocab {
 public:
  static constexpr std::size_t kUnknown = 0;
  static constexpr std::string_view kUnknownToken = "<UNK>";

  Vocab();
  explicit Vocab(const std::vector<std::string>& tokens_in_order);

  /// First-occurrence order; no-op for tokens already present.
  void add(const std::string& token);
  std::size_t encode(std::string_view token) const;
  const std::string& decode(std::size_t index) const;
  /// Includes the UNKNOWN slot.
  std::size_t size() const { return tokens_.size(); }
  /// Tokens after UNKNOWN, in index order.
  std::vector<std::string> known_tokens() const;

  friend bool operator==(const Vocab& a, const Vocab& b) { return a.tokens_ == b.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
};

inline constexpr std::size_t kCategoricalCount = 4;
inline constexpr std::array<std::string_view, kCategoricalCount> kCategoricalNames = {
    "gender", "education", "race", "age"};

struct CategoricalVocab {
  std::array<Vocab, kCategoricalCount> features;

  std::array<std::size_t, kCategoricalCount> encode(const EssayRecord& record) const;
  std::array<std::size_t, kCategoricalCount> sizes() const;

  friend bool operator==(const CategoricalVocab&, const CategoricalVocab&) = default;
};

CategoricalVocab fit_vocab(const Dataset& train);

/// Target vocabulary for the emotion head: no UNKNOWN slot, first-occurrence
/// order. Encoding a label never seen in training is a data error.
class LabelVocab {
 public:
  LabelVocab() = default;
  explicit LabelVocab(std::vector<std::string> labels);

  std::size_t encode(std::string_view label) const;
  const std::string& decode(std::size_t index) const;
  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }

  friend bool operator==(const LabelVocab& a, const LabelVocab& b) { return a.labels_ == b.labels_; }

 private:
  std::vector<std::string> labels_;
};

LabelVocab fit_emotion_vocab(const Dataset& train);

}  // namespace emtk
