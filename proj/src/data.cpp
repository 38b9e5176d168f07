#include "emtk/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "emtk/error.hpp"
#include "text_util.hpp"

namespace emtk {

std::string_view to_string(Split split) {
  switch (split) {
    case Split::Train: return "train";
    case Split::Dev: return "dev";
    case Split::Test: return "test";
  }
  return "train";
}

Split split_from_string(std::string_view name) {
  if (name == "train") return Split::Train;
  if (name == "dev") return Split::Dev;
  if (name == "test") return Split::Test;
  throw ConfigError("unknown split '" + std::string(name) + "' (expected train, dev or test)");
}

bool Dataset::labeled() const {
  for (const auto& r : records) {
    if (!r.labels) return false;
  }
  return true;
}

namespace {

class RowReader {
 public:
  RowReader(const std::vector<std::string>& cells, std::size_t row, const std::filesystem::path& path)
      : cells_(cells), row_(row), path_(path) {}

  const std::string& text(std::size_t col) const { return cells_.at(col); }

  double number(std::size_t col, std::string_view field) const {
    const auto cell = detail::trim(cells_.at(col));
    double value = 0.0;
    const auto* end = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(cell.data(), end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value)) fail(field, cell);
    return value;
  }

  int integer(std::size_t col, std::string_view field) const {
    const double value = number(col, field);
    if (value != std::floor(value)) fail(field, cells_.at(col));
    return static_cast<int>(value);
  }

 private:
  [[noreturn]] void fail(std::string_view field, std::string_view cell) const {
    std::ostringstream os;
    os << path_.string() << ": data row " << row_ << ", column '" << field
       << "': cannot parse '" << cell << "' as a finite number";
    throw DataError(os.str());
  }

  const std::vector<std::string>& cells_;
  std::size_t row_;
  const std::filesystem::path& path_;
};

}  // namespace

Dataset load_tsv(const std::filesystem::path& path, const ColumnMapping& mapping, Split split) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());

  Dataset ds;
  ds.split = split;
  ds.mapping = mapping;

  std::string line;
  if (!std::getline(in, line)) throw DataError(path.string() + ": missing header row");
  detail::strip_cr(line);
  if (line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
  const auto header = detail::split_tabs(line);
  std::unordered_map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col.emplace(std::string(detail::trim(header[i])), i);

  auto required = [&](const std::string& name) {
    auto it = col.find(name);
    if (it == col.end()) {
      throw ConfigError(path.string() + ": mapped column '" + name + "' not found in header");
    }
    return it->second;
  };
  auto optional = [&](const std::string& name) -> std::optional<std::size_t> {
    auto it = col.find(name);
    if (it == col.end()) return std::nullopt;
    return it->second;
  };

  const std::size_t c_id = required(mapping.id);
  const std::size_t c_essay = required(mapping.essay);
  const std::size_t c_gender = required(mapping.gender);
  const std::size_t c_education = required(mapping.education);
  const std::size_t c_race = required(mapping.race);
  const std::size_t c_age = required(mapping.age);
  const std::size_t c_income = required(mapping.income);
  std::array<std::size_t, kPersonalityCount> c_pers{};
  for (std::size_t i = 0; i < kPersonalityCount; ++i) c_pers[i] = required(mapping.personality[i]);
  std::array<std::size_t, kIriCount> c_iri{};
  for (std::size_t i = 0; i < kIriCount; ++i) c_iri[i] = required(mapping.iri[i]);

  const auto c_emp = optional(mapping.empathy);
  const auto c_dis = optional(mapping.distress);
  const auto c_emo = optional(mapping.emotion);
  const auto c_emp_bin = optional(mapping.empathy_bin);
  const auto c_dis_bin = optional(mapping.distress_bin);
  const bool has_labels = c_emp && c_dis && c_emo;

  std::size_t row = 0;
  while (std::getline(in, line)) {
    detail::strip_cr(line);
    if (line.empty()) continue;
    ++row;
    auto cells = detail::split_tabs(line);
    if (cells.size() < header.size()) {
      throw DataError(path.string() + ": data row " + std::to_string(row) + " has " +
                      std::to_string(cells.size()) + " cells, header has " +
                      std::to_string(header.size()));
    }
    RowReader r(cells, row, path);

    EssayRecord rec;
    rec.id = std::string(detail::trim(r.text(c_id)));
    rec.essay = r.text(c_essay);
    rec.gender = std::string(detail::trim(r.text(c_gender)));
    rec.education = std::string(detail::trim(r.text(c_education)));
    rec.race = std::string(detail::trim(r.text(c_race)));
    rec.age = r.integer(c_age, mapping.age);
    if (rec.age < 0) {
      throw DataError(path.string() + ": data row " + std::to_string(row) + ": negative age");
    }
    rec.income = r.number(c_income, mapping.income);
    for (std::size_t i = 0; i < kPersonalityCount; ++i) {
      rec.personality[i] = r.number(c_pers[i], mapping.personality[i]);
    }
    for (std::size_t i = 0; i < kIriCount; ++i) rec.iri[i] = r.number(c_iri[i], mapping.iri[i]);

    if (has_labels) {
      Labels lab;
      lab.empathy = r.number(*c_emp, mapping.empathy);
      lab.distress = r.number(*c_dis, mapping.distress);
      lab.emotion = std::string(detail::trim(r.text(*c_emo)));
      const int emp_derived = lab.empathy >= kBinThreshold ? 1 : 0;
      const int dis_derived = lab.distress >= kBinThreshold ? 1 : 0;
      lab.empathy_bin = c_emp_bin ? r.integer(*c_emp_bin, mapping.empathy_bin) : emp_derived;
      lab.distress_bin = c_dis_bin ? r.integer(*c_dis_bin, mapping.distress_bin) : dis_derived;
      for (auto [bin, name] : {std::pair{lab.empathy_bin, &mapping.empathy_bin},
                               std::pair{lab.distress_bin, &mapping.distress_bin}}) {
        if (bin != 0 && bin != 1) {
          throw DataError(path.string() + ": data row " + std::to_string(row) + ", column '" +
                          *name + "': bin label must be 0 or 1");
        }
      }
      if (lab.empathy_bin != emp_derived) {
        ds.warnings.push_back("row " + std::to_string(row) + " (id " + rec.id +
                              "): empathy_bin disagrees with empathy >= 4.0; stored value kept");
      }
      if (lab.distress_bin != dis_derived) {
        ds.warnings.push_back("row " + std::to_string(row) + " (id " + rec.id +
                              "): distress_bin disagrees with distress >= 4.0; stored value kept");
      }
      rec.labels = std::move(lab);
    }
    ds.records.push_back(std::move(rec));
  }
  return ds;
}

AgeBucket bucket_age(int age) {
  if (age < 0) throw DomainError("age must be non-negative, got " + std::to_string(age));
  if (age <= 25) return AgeBucket::Le25;
  if (age <= 40) return AgeBucket::From26To40;
  if (age <= 60) return AgeBucket::From41To60;
  return AgeBucket::Ge61;
}

std::string_view age_token(AgeBucket bucket) {
  return kAgeBucketTokens[static_cast<std::size_t>(bucket)];
}

int bucket_lower_bound(AgeBucket bucket) {
  switch (bucket) {
    case AgeBucket::Le25: return 0;
    case AgeBucket::From26To40: return 26;
    case AgeBucket::From41To60: return 41;
    case AgeBucket::Ge61: return 61;
  }
  return 0;
}

Vocab::Vocab() : tokens_{std::string(kUnknownToken)} {}

Vocab::Vocab(const std::vector<std::string>& tokens_in_order) : Vocab() {
  for (const auto& t : tokens_in_order) add(t);
}

void Vocab::add(const std::string& token) {
  if (index_.contains(token)) return;
  index_.emplace(token, tokens_.size());
  tokens_.push_back(token);
}

std::size_t Vocab::encode(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnknown : it->second;
}

const std::string& Vocab::decode(std::size_t index) const {
  if (index >= tokens_.size()) {
    throw DomainError("vocab index " + std::to_string(index) + " out of range");
  }
  return tokens_[index];
}

std::vector<std::string> Vocab::known_tokens() const {
  return {tokens_.begin() + 1, tokens_.end()};
}

std::array<std::size_t, kCategoricalCount> CategoricalVocab::encode(const EssayRecord& record) const {
  return {features[0].encode(record.gender), features[1].encode(record.education),
          features[2].encode(record.race), features[3].encode(age_token(bucket_age(record.age)))};
}

std::array<std::size_t, kCategoricalCount> CategoricalVocab::sizes() const {
  std::array<std::size_t, kCategoricalCount> out{};
  for (std::size_t i = 0; i < kCategoricalCount; ++i) out[i] = features[i].size();
  return out;
}

CategoricalVocab fit_vocab(const Dataset& train) {
  if (train.empty()) throw DataError("cannot fit categorical vocabularies on an empty dataset");
  CategoricalVocab v;
  for (const auto& r : train.records) {
    v.features[0].add(r.gender);
    v.features[1].add(r.education);
    v.features[2].add(r.race);
    v.features[3].add(std::string(age_token(bucket_age(r.age))));
  }
  return v;
}

LabelVocab::LabelVocab(std::vector<std::string> labels) : labels_(std::move(labels)) {}

std::size_t LabelVocab::encode(std::string_view label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) return i;
  }
  throw DataError("emotion label '" + std::string(label) + "' was not seen in training data");
}

const std::string& LabelVocab::decode(std::size_t index) const {
  if (index >= labels_.size()) {
    throw DomainError("emotion index " + std::to_string(index) + " out of range");
  }
  return labels_[index];
}

LabelVocab fit_emotion_vocab(const Dataset& train) {
  std::vector<std::string> labels;
  for (const auto& r : train.records) {
    if (!r.labels) throw DataError("cannot fit emotion vocabulary on unlabeled data");
    if (std::find(labels.begin(), labels.end(), r.labels->emotion) == labels.end()) {
      labels.push_back(r.labels->emotion);
    }
  }
  return LabelVocab(std::move(labels));
}

}  // namespace emtk
