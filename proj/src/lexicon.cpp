#include "emtk/lexicon.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>

#include "emtk/error.hpp"
#include "emtk/metrics.hpp"
#include "text_util.hpp"

namespace emtk {
namespace {

bool parse_double(std::string_view s, double& out) {
  s = detail::trim(s);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open lexicon " + path.string());
  return in;
}

std::string where(const std::filesystem::path& path, std::size_t lineno) {
  return path.string() + ":" + std::to_string(lineno);
}

}  // namespace

double IntensityLexicon::lookup(std::string_view word) const {
  auto it = scores.find(std::string(word));
  return it == scores.end() ? 0.0 : it->second;
}

FeatureSpec FeatureSpec::distress_default() {
  return {{"fear", "sadness", "disgust", "arousal", "anger", "dominance"},
          {"suffering", "death", "torment", "hate", "negative_emotion", "sadness", "aggression",
           "fight", "help", "pain", "kill", "horror", "violence", "war", "ugliness"}};
}

double nrc_score(std::span<const std::string> tokens, const IntensityLexicon& lex) {
  double sum = 0.0;
  for (const auto& t : tokens) sum += lex.lookup(t);
  return sum;
}

double empath_score(std::span<const std::string> tokens, const CategoryLexicon& lex) {
  if (tokens.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& t : tokens) hits += lex.contains(t) ? 1 : 0;
  return 100.0 * static_cast<double>(hits) / static_cast<double>(tokens.size());
}

void LexiconSet::require(const FeatureSpec& spec) const {
  for (const auto& n : spec.nrc) {
    if (!intensity.contains(n)) throw ConfigError("no intensity lexicon for dimension '" + n + "'");
  }
  for (const auto& n : spec.empath) {
    if (!categories.contains(n)) throw ConfigError("no category lexicon named '" + n + "'");
  }
}

Eigen::VectorXd LexiconSet::features(std::span<const std::string> tokens,
                                     const FeatureSpec& spec) const {
  require(spec);
  Eigen::VectorXd out(static_cast<Eigen::Index>(spec.width()));
  Eigen::Index k = 0;
  for (const auto& n : spec.nrc) out(k++) = nrc_score(tokens, intensity.at(n));
  for (const auto& n : spec.empath) out(k++) = empath_score(tokens, categories.at(n));
  return out;
}

std::map<std::string, IntensityLexicon> load_nrc_eil(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  std::map<std::string, IntensityLexicon> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    detail::strip_cr(line);
    if (detail::trim(line).empty() || line.front() == '#') continue;
    const auto cells = detail::split_tabs(line);
    double score = 0.0;
    if (cells.size() != 3 || !parse_double(cells[2], score)) {
      if (lineno == 1) continue;  // header
      throw DataError(where(path, lineno) + ": expected word<TAB>emotion<TAB>score");
    }
    const std::string emotion(detail::trim(cells[1]));
    auto& lex = out[emotion];
    lex.name = emotion;
    lex.scores[std::string(detail::trim(cells[0]))] = score;
  }
  return out;
}

std::map<std::string, IntensityLexicon> load_nrc_vad(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  std::map<std::string, IntensityLexicon> out;
  const std::array<std::string, 3> dims = {"valence", "arousal", "dominance"};
  for (const auto& d : dims) out[d].name = d;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    detail::strip_cr(line);
    if (detail::trim(line).empty() || line.front() == '#') continue;
    const auto cells = detail::split_tabs(line);
    std::array<double, 3> v{};
    bool ok = cells.size() == 4;
    for (std::size_t i = 0; ok && i < 3; ++i) ok = parse_double(cells[i + 1], v[i]);
    if (!ok) {
      if (lineno == 1) continue;
      throw DataError(where(path, lineno) + ": expected word<TAB>valence<TAB>arousal<TAB>dominance");
    }
    const std::string word(detail::trim(cells[0]));
    for (std::size_t i = 0; i < 3; ++i) out[dims[i]].scores[word] = v[i];
  }
  return out;
}

std::map<std::string, CategoryLexicon> load_category_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw ConfigError("category lexicon directory not found: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const auto ext = e.path().extension();
    if (ext == ".txt" || ext.empty()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::map<std::string, CategoryLexicon> out;
  for (const auto& f : files) {
    auto in = open_or_throw(f);
    CategoryLexicon lex;
    lex.name = f.stem().string();
    std::string line;
    while (std::getline(in, line)) {
      detail::strip_cr(line);
      const auto w = detail::trim(line);
      if (w.empty() || w.front() == '#') continue;
      lex.words.emplace(w);
    }
    if (lex.words.empty()) throw DataError("category lexicon " + f.string() + " is empty");
    out.emplace(lex.name, std::move(lex));
  }
  return out;
}

Eigen::VectorXd Standardizer::transform(const Eigen::VectorXd& x) const {
  if (x.size() != mean.size()) throw ShapeError("standardizer width mismatch");
  return ((x - mean).array() / std.array()).matrix();
}

Eigen::MatrixXd Standardizer::transform(const Eigen::MatrixXd& rows) const {
  if (rows.cols() != mean.size()) throw ShapeError("standardizer width mismatch");
  return ((rows.rowwise() - mean.transpose()).array().rowwise() / std.transpose().array()).matrix();
}

Eigen::VectorXd Standardizer::inverse_transform(const Eigen::VectorXd& z) const {
  if (z.size() != mean.size()) throw ShapeError("standardizer width mismatch");
  return (z.array() * std.array() + mean.array()).matrix();
}

Standardizer fit_standardizer(const Eigen::MatrixXd& train) {
  if (train.rows() < 2) throw DataError("standardizer needs at least 2 training rows");
  Standardizer s;
  const double n = static_cast<double>(train.rows());
  s.mean = train.colwise().mean().transpose();
  s.std.resize(train.cols());
  for (Eigen::Index j = 0; j < train.cols(); ++j) {
    const double var = (train.col(j).array() - s.mean(j)).square().sum() / n;
    if (var > 0.0) {
      s.std(j) = std::sqrt(var);
    } else {
      s.std(j) = 1.0;
      s.zero_variance.push_back(static_cast<std::size_t>(j));
    }
  }
  return s;
}

std::vector<RankedFeature> rank_features(const Eigen::MatrixXd& candidates,
                                         const std::vector<std::string>& names,
                                         const Eigen::VectorXd& labels) {
  if (candidates.rows() != labels.size()) throw ShapeError("rank_features: row count mismatch");
  if (static_cast<std::size_t>(candidates.cols()) != names.size()) {
    throw ShapeError("rank_features: name count mismatch");
  }
  std::vector<RankedFeature> out;
  const std::vector<double> y(labels.data(), labels.data() + labels.size());
  for (Eigen::Index j = 0; j < candidates.cols(); ++j) {
    const Eigen::VectorXd col = candidates.col(j);
    const std::vector<double> x(col.data(), col.data() + col.size());
    RankedFeature f{names[static_cast<std::size_t>(j)], 0.0, false};
    try {
      f.r = pearson_r(x, y);
    } catch (const DegenerateInput&) {
      if (col.size() < 3) throw;
      f.degenerate = true;
    }
    out.push_back(std::move(f));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const RankedFeature& a, const RankedFeature& b) { return a.r > b.r; });
  return out;
}

}  // namespace emtk
