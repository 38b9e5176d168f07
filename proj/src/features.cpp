#include "emtk/features.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "binary_io.hpp"
#include "emtk/error.hpp"
#include "json_io.hpp"
#include "text_util.hpp"

namespace emtk {

bool operator==(const FeatureArtifacts& a, const FeatureArtifacts& b) {
  auto same = [](const Standardizer& x, const Standardizer& y) {
    return x.mean.size() == y.mean.size() && x.mean == y.mean && x.std == y.std &&
           x.zero_variance == y.zero_variance;
  };
  return a.target == b.target && a.vocab == b.vocab && a.emotions == b.emotions &&
         same(a.numeric, b.numeric) && same(a.lexical, b.lexical) && a.spec == b.spec &&
         a.include_income == b.include_income && a.emb_dim == b.emb_dim;
}

std::vector<std::string> clean_all(const Dataset& ds, const CleanConfig& cfg) {
  std::vector<std::string> out;
  out.reserve(ds.size());
  for (const auto& r : ds.records) out.push_back(clean_text(r.essay, cfg));
  return out;
}

Eigen::MatrixXd numeric_matrix(const Dataset& ds, bool include_income) {
  const Eigen::Index cols = static_cast<Eigen::Index>(kPersonalityCount + kIriCount + (include_income ? 1 : 0));
  Eigen::MatrixXd m(static_cast<Eigen::Index>(ds.size()), cols);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& r = ds.records[i];
    const auto row = static_cast<Eigen::Index>(i);
    Eigen::Index j = 0;
    for (double v : r.personality) m(row, j++) = v;
    for (double v : r.iri) m(row, j++) = v;
    if (include_income) m(row, j++) = r.income;
  }
  return m;
}

Eigen::MatrixXd lexical_matrix(const std::vector<std::string>& cleaned, const CleanConfig& cfg,
                               const LexiconSet& lex, const FeatureSpec& spec) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(cleaned.size()), static_cast<Eigen::Index>(spec.width()));
  if (spec.empty()) return m;
  lex.require(spec);
  for (std::size_t i = 0; i < cleaned.size(); ++i) {
    const TokenSeq seq = tokenize_and_pad(cleaned[i], cfg);
    m.row(static_cast<Eigen::Index>(i)) = lex.features(seq.real_tokens(), spec).transpose();
  }
  return m;
}

FeatureArtifacts fit_artifacts(const Dataset& train, Target target, const Eigen::MatrixXd& numeric_raw,
                               const Eigen::MatrixXd& lexical_raw, const FeatureSpec& spec,
                               bool include_income, std::size_t emb_dim) {
  FeatureArtifacts a;
  a.target = target;
  a.vocab = fit_vocab(train);
  a.emotions = fit_emotion_vocab(train);
  a.numeric = fit_standardizer(numeric_raw);
  if (target == Target::Distress) {
    a.spec = spec;
    a.lexical = fit_standardizer(lexical_raw);
  }
  a.include_income = include_income;
  a.emb_dim = emb_dim;
  return a;
}

void require_embeddings(const Dataset& ds, const EmbeddingStore& store) {
  std::vector<std::string> missing;
  for (const auto& r : ds.records) {
    if (!store.contains(r.id)) missing.push_back(r.id);
  }
  if (missing.empty()) return;
  std::string msg = std::to_string(missing.size()) + " essay id(s) have no embedding:";
  for (std::size_t i = 0; i < missing.size() && i < 20; ++i) msg += " " + missing[i];
  if (missing.size() > 20) msg += " ...";
  throw DataError(msg);
}

FeatureTable assemble(const Dataset& ds, const EmbeddingStore& store, const FeatureArtifacts& art,
                      const Eigen::MatrixXd& numeric_raw, const Eigen::MatrixXd& lexical_raw) {
  require_embeddings(ds, store);
  if (store.dim() != art.emb_dim) {
    throw DataError("embedding dim " + std::to_string(store.dim()) + " differs from fitted dim " +
                    std::to_string(art.emb_dim));
  }
  const auto n = static_cast<Eigen::Index>(ds.size());
  FeatureTable t;
  t.inputs.essay.resize(n, static_cast<Eigen::Index>(art.emb_dim));
  t.inputs.numeric = art.numeric.transform(numeric_raw);
  t.inputs.lexical = art.target == Target::Distress ? Mat(art.lexical.transform(lexical_raw)) : Mat(n, 0);
  const bool labeled = ds.labeled() && n > 0;
  Targets targets;
  if (labeled) {
    targets.score.resize(n, 1);
    targets.bin.resize(n, 1);
  }
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& r = ds.records[i];
    const auto row = static_cast<Eigen::Index>(i);
    t.ids.push_back(r.id);
    t.inputs.essay.row(row) = store.at(r.id).cast<double>().transpose();
    const auto idx = art.vocab.encode(r);
    for (std::size_t k = 0; k < kCategoricalCount; ++k) t.inputs.cats[k].push_back(idx[k]);
    if (labeled) {
      const auto& l = *r.labels;
      const bool emp = art.target == Target::Empathy;
      targets.score(row, 0) = emp ? l.empathy : l.distress;
      targets.bin(row, 0) = emp ? l.empathy_bin : l.distress_bin;
      targets.emotion.push_back(art.emotions.encode(l.emotion));
    }
  }
  if (labeled) t.targets = std::move(targets);
  return t;
}

namespace {

void put(std::string& out, double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

std::vector<std::string> numeric_names(const FeatureArtifacts& art) {
  ColumnMapping defaults;
  std::vector<std::string> names(defaults.personality.begin(), defaults.personality.end());
  names.insert(names.end(), defaults.iri.begin(), defaults.iri.end());
  if (art.include_income) names.push_back("income");
  return names;
}

}  // namespace

std::string features_to_tsv(const FeatureTable& table, const FeatureArtifacts& art) {
  std::string out = "id";
  for (auto name : kCategoricalNames) out += "\t" + std::string(name) + "_idx";
  for (const auto& n : numeric_names(art)) out += "\tnum_" + n;
  for (const auto& n : art.spec.nrc) out += "\tnrc_" + n;
  for (const auto& n : art.spec.empath) out += "\tempath_" + n;
  out += "\tscore\tbin\temotion\n";
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    out += table.ids[i];
    for (std::size_t k = 0; k < kCategoricalCount; ++k) out += "\t" + std::to_string(table.inputs.cats[k][i]);
    for (Eigen::Index j = 0; j < table.inputs.numeric.cols(); ++j) {
      out += '\t';
      put(out, table.inputs.numeric(row, j));
    }
    for (Eigen::Index j = 0; j < table.inputs.lexical.cols(); ++j) {
      out += '\t';
      put(out, table.inputs.lexical(row, j));
    }
    if (table.targets) {
      out += '\t';
      put(out, table.targets->score(row, 0));
      out += '\t';
      put(out, table.targets->bin(row, 0));
      out += "\t" + art.emotions.decode(table.targets->emotion[i]);
    } else {
      out += "\t\t\t";
    }
    out += '\n';
  }
  return out;
}

FeatureTable features_from_tsv(const std::filesystem::path& path, const EmbeddingStore& store,
                               const FeatureArtifacts& art) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string() + " (run featurize first)");
  const std::size_t n_num = kPersonalityCount + kIriCount + (art.include_income ? 1 : 0);
  const std::size_t n_lex = art.spec.width();
  const std::size_t expected = 1 + kCategoricalCount + n_num + n_lex + 3;

  std::string line;
  if (!std::getline(in, line)) throw DataError(path.string() + ": missing header");
  if (detail::split_tabs(line).size() != expected) {
    throw DataError(path.string() + ": column count does not match the fitted feature layout");
  }
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    rows.push_back(detail::split_tabs(line));
    if (rows.back().size() != expected) {
      throw DataError(path.string() + ": row " + std::to_string(rows.size()) + " has " +
                      std::to_string(rows.back().size()) + " cells, expected " + std::to_string(expected));
    }
  }
  auto num = [&](const std::string& cell, std::size_t row) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
      throw DataError(path.string() + ": row " + std::to_string(row + 1) + ": bad number '" + cell + "'");
    }
    return v;
  };

  const auto n = static_cast<Eigen::Index>(rows.size());
  FeatureTable t;
  t.inputs.essay.resize(n, static_cast<Eigen::Index>(art.emb_dim));
  t.inputs.numeric.resize(n, static_cast<Eigen::Index>(n_num));
  t.inputs.lexical.resize(n, static_cast<Eigen::Index>(n_lex));
  const bool labeled = n > 0 && !rows.front()[expected - 1].empty();
  Targets targets;
  targets.score.resize(labeled ? n : 0, 1);
  targets.bin.resize(labeled ? n : 0, 1);
  const auto sizes = art.vocab.sizes();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& c = rows[i];
    const auto row = static_cast<Eigen::Index>(i);
    t.ids.push_back(c[0]);
    const auto& vec = store.at(c[0]);
    if (static_cast<std::size_t>(vec.size()) != art.emb_dim) throw DataError("embedding dim mismatch for " + c[0]);
    t.inputs.essay.row(row) = vec.cast<double>().transpose();
    std::size_t at = 1;
    for (std::size_t k = 0; k < kCategoricalCount; ++k, ++at) {
      const double v = num(c[at], i);
      if (v < 0 || v != std::floor(v) || static_cast<std::size_t>(v) >= sizes[k]) {
        throw DataError(path.string() + ": row " + std::to_string(i + 1) + ": category index out of range");
      }
      t.inputs.cats[k].push_back(static_cast<std::size_t>(v));
    }
    for (std::size_t j = 0; j < n_num; ++j, ++at) t.inputs.numeric(row, static_cast<Eigen::Index>(j)) = num(c[at], i);
    for (std::size_t j = 0; j < n_lex; ++j, ++at) t.inputs.lexical(row, static_cast<Eigen::Index>(j)) = num(c[at], i);
    if (labeled != !c[expected - 1].empty()) {
      throw DataError(path.string() + ": row " + std::to_string(i + 1) + ": labels present on some rows only");
    }
    if (labeled) {
      targets.score(row, 0) = num(c[at], i);
      targets.bin(row, 0) = num(c[at + 1], i);
      targets.emotion.push_back(art.emotions.encode(c[at + 2]));
    }
  }
  if (labeled) t.targets = std::move(targets);
  return t;
}

std::string artifacts_to_json(const FeatureArtifacts& a) {
  const detail::json j = {{"target", to_string(a.target)},
                          {"vocab", detail::to_json(a.vocab)},
                          {"emotions", a.emotions.labels()},
                          {"numeric", detail::to_json(a.numeric)},
                          {"lexical", detail::to_json(a.lexical)},
                          {"spec", detail::to_json(a.spec)},
                          {"include_income", a.include_income},
                          {"emb_dim", a.emb_dim}};
  return j.dump(2) + "\n";
}

FeatureArtifacts artifacts_from_json(const std::string& text) {
  try {
    const auto j = detail::json::parse(text);
    FeatureArtifacts a;
    a.target = target_from_string(j.at("target").get<std::string>());
    a.vocab = detail::categorical_vocab_from_json(j.at("vocab"));
    a.emotions = LabelVocab(j.at("emotions").get<std::vector<std::string>>());
    a.numeric = detail::standardizer_from_json(j.at("numeric"));
    a.lexical = detail::standardizer_from_json(j.at("lexical"));
    a.spec = detail::feature_spec_from_json(j.at("spec"));
    a.include_income = j.at("include_income").get<bool>();
    a.emb_dim = j.at("emb_dim").get<std::size_t>();
    return a;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw DataError(std::string("malformed feature artifacts: ") + e.what());
  }
}

}  // namespace emtk
