#include "emtk/pipeline.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>

#include <nlohmann/json.hpp>

#include "binary_io.hpp"
#include "emtk/checkpoint.hpp"
#include "emtk/error.hpp"
#include "emtk/features.hpp"
#include "text_util.hpp"

namespace emtk {

namespace fs = std::filesystem;

namespace {

constexpr std::array<Split, 3> kSplits = {Split::Train, Split::Dev, Split::Test};

const std::string& split_path(const RunConfig& cfg, Split s) {
  switch (s) {
    case Split::Train: return cfg.paths.train;
    case Split::Dev: return cfg.paths.dev;
    case Split::Test: return cfg.paths.test;
  }
  return cfg.paths.train;
}

const std::string& embedding_path(const RunConfig& cfg, Split s) {
  switch (s) {
    case Split::Train: return cfg.embeddings.train;
    case Split::Dev: return cfg.embeddings.dev;
    case Split::Test: return cfg.embeddings.test;
  }
  return cfg.embeddings.train;
}

void require_file(const std::string& path, const std::string& key) {
  if (path.empty()) throw ConfigError(key + " is not set");
  if (!fs::exists(path)) throw ConfigError(key + " does not exist: " + path);
}

fs::path out_path(const RunConfig& cfg, const std::string& name) { return fs::path(cfg.paths.out_dir) / name; }

std::string split_file(Split s, const char* suffix) { return std::string(to_string(s)) + suffix; }

CleanConfig make_clean_config(const RunConfig& cfg) {
  const fs::path data_dir = EMTK_DATA_DIR;
  const fs::path contractions = cfg.paths.contractions.empty() ? data_dir / "contractions.tsv"
                                                               : fs::path(cfg.paths.contractions);
  const fs::path acronyms =
      cfg.paths.acronyms.empty() ? data_dir / "acronyms.tsv" : fs::path(cfg.paths.acronyms);
  return CleanConfig(load_expansion_map(contractions), load_expansion_map(acronyms), cfg.max_len);
}

LexiconSet load_lexicons(const RunConfig& cfg) {
  LexiconSet lex;
  if (!cfg.paths.nrc_eil.empty()) lex.intensity = load_nrc_eil(cfg.paths.nrc_eil);
  if (!cfg.paths.nrc_vad.empty()) {
    for (auto& [name, l] : load_nrc_vad(cfg.paths.nrc_vad)) lex.intensity[name] = std::move(l);
  }
  lex.categories = load_category_dir(cfg.paths.empath_dir);
  return lex;
}

void put(std::string& out, double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

FeatureArtifacts read_artifacts(const RunConfig& cfg) {
  const auto path = out_path(cfg, "featurize.json");
  if (!fs::exists(path)) throw ConfigError("missing " + path.string() + " (run featurize first)");
  auto art = artifacts_from_json(detail::read_file(path.string()));
  if (art.target != cfg.target) {
    throw ConfigError("features in " + cfg.paths.out_dir + " were built for target " +
                      std::string(to_string(art.target)) + ", config asks for " +
                      std::string(to_string(cfg.target)));
  }
  return art;
}

FeatureTable read_split(const RunConfig& cfg, const FeatureArtifacts& art, Split s) {
  const auto emb = out_path(cfg, split_file(s, ".emb"));
  if (!fs::exists(emb)) throw ConfigError("missing " + emb.string() + " (run featurize first)");
  return features_from_tsv(out_path(cfg, split_file(s, ".features.tsv")), read_store(emb), art);
}

LabeledSet labeled(FeatureTable t, Split s) {
  if (!t.targets) throw DataError(std::string(to_string(s)) + " split has no labels");
  return {std::move(t.inputs), std::move(*t.targets)};
}

}  // namespace

void cmd_featurize(const RunConfig& cfg, std::ostream& log) {
  require_file(cfg.paths.train, "paths.train");
  require_file(cfg.paths.dev, "paths.dev");
  if (!cfg.paths.test.empty()) require_file(cfg.paths.test, "paths.test");
  const bool distress = cfg.target == Target::Distress;
  if (distress) {
    if (cfg.paths.nrc_eil.empty() && cfg.paths.nrc_vad.empty()) {
      throw ConfigError("distress target needs paths.nrc_eil and/or paths.nrc_vad");
    }
    if (!cfg.paths.nrc_eil.empty()) require_file(cfg.paths.nrc_eil, "paths.nrc_eil");
    if (!cfg.paths.nrc_vad.empty()) require_file(cfg.paths.nrc_vad, "paths.nrc_vad");
    require_file(cfg.paths.empath_dir, "paths.empath_dir");
  }
  if (!cfg.embeddings.pseudo) {
    for (Split s : kSplits) {
      if (split_path(cfg, s).empty()) continue;
      require_file(embedding_path(cfg, s), "embeddings." + std::string(to_string(s)));
    }
  }

  const CleanConfig clean = make_clean_config(cfg);
  const LexiconSet lex = distress ? load_lexicons(cfg) : LexiconSet{};
  const FeatureSpec spec = distress ? cfg.lexical : FeatureSpec{};
  if (distress) lex.require(spec);

  struct SplitData {
    Split split;
    Dataset ds;
    std::vector<std::string> cleaned;
    Eigen::MatrixXd numeric;
    Eigen::MatrixXd lexical;
    EmbeddingStore store;
  };
  std::vector<SplitData> splits;
  for (Split s : kSplits) {
    if (split_path(cfg, s).empty()) continue;
    SplitData d{s, load_tsv(split_path(cfg, s), cfg.columns, s), {}, {}, {}, {}};
    for (const auto& w : d.ds.warnings) log << "warning: " << to_string(s) << ": " << w << "\n";
    d.cleaned = clean_all(d.ds, clean);
    d.numeric = numeric_matrix(d.ds, cfg.model.include_income);
    d.lexical = lexical_matrix(d.cleaned, clean, lex, spec);
    EmbeddingStore full;
    if (cfg.embeddings.pseudo) {
      full = EmbeddingStore(cfg.embeddings.dim, EmbeddingSource::Pseudo);
      for (std::size_t i = 0; i < d.ds.size(); ++i) {
        if (!full.contains(d.ds.records[i].id)) {
          full.add(d.ds.records[i].id, pseudo_embed(d.cleaned[i], cfg.embeddings.dim, cfg.seed));
        }
      }
    } else {
      full = read_store(embedding_path(cfg, s));
    }
    require_embeddings(d.ds, full);
    d.store = EmbeddingStore(full.dim(), full.source());
    for (const auto& r : d.ds.records) {
      if (!d.store.contains(r.id)) d.store.add(r.id, full.at(r.id));
    }
    if (d.store.size() != d.ds.size()) throw DataError(std::string(to_string(s)) + " split has duplicate ids");
    splits.push_back(std::move(d));
  }
  const auto& tr = splits.front();
  if (!tr.ds.labeled()) throw DataError("train split must carry labels");
  const FeatureArtifacts art = fit_artifacts(tr.ds, cfg.target, tr.numeric, tr.lexical, spec,
                                             cfg.model.include_income, tr.store.dim());
  for (auto i : art.numeric.zero_variance) log << "warning: numeric column " << i << " has zero variance\n";
  for (auto i : art.lexical.zero_variance) log << "warning: lexical column " << i << " has zero variance\n";

  fs::create_directories(cfg.paths.out_dir);
  for (const auto& d : splits) {
    if (d.store.dim() != art.emb_dim) throw DataError("embedding dims differ between splits");
    const FeatureTable t = assemble(d.ds, d.store, art, d.numeric, d.lexical);
    detail::write_file(out_path(cfg, split_file(d.split, ".features.tsv")).string(), features_to_tsv(t, art));
    write_store(d.store, out_path(cfg, split_file(d.split, ".emb")));
    std::string cleaned = "id\tcleaned\n";
    for (std::size_t i = 0; i < d.ds.size(); ++i) cleaned += d.ds.records[i].id + "\t" + d.cleaned[i] + "\n";
    detail::write_file(out_path(cfg, split_file(d.split, ".cleaned.tsv")).string(), cleaned);
    log << to_string(d.split) << ": " << t.size() << " feature rows\n";
  }
  detail::write_file(out_path(cfg, "featurize.json").string(), artifacts_to_json(art));
  log << "embeddings: " << (cfg.embeddings.pseudo ? "pseudo" : "encoder") << ", dim " << art.emb_dim << "\n";
}

void cmd_train(const RunConfig& cfg, std::ostream& log) {
  const FeatureArtifacts art = read_artifacts(cfg);
  const LabeledSet train_set = labeled(read_split(cfg, art, Split::Train), Split::Train);
  const LabeledSet dev_set = labeled(read_split(cfg, art, Split::Dev), Split::Dev);

  ModelConfig mc = cfg.model;
  mc.mode = cfg.target;
  mc.emb_dim = art.emb_dim;
  mc.cat_vocab = art.vocab.sizes();
  mc.emotion_classes = art.emotions.size();
  mc.include_income = art.include_income;
  mc.lexical = art.spec;
  NetworkParams params = build(mc, cfg.seed);
  log << "model: " << to_string(mc.mode) << ", " << params.param_count() << " parameters, fusion width "
      << mc.fusion_width() << "\n";

  TrainConfig tc = cfg.train;
  tc.seed = cfg.seed;
  const TrainResult result = train(std::move(params), train_set, dev_set, tc);
  fs::create_directories(cfg.paths.out_dir);
  save_checkpoint({result.best, art.vocab, art.emotions, art.numeric, art.lexical},
                  out_path(cfg, "model.emtk"));
  result.history.write_csv(out_path(cfg, "history.csv"));
  log << "trained " << result.history.epochs.size() << " epochs"
      << (result.history.early_stopped ? " (early stop)" : "") << ", best epoch "
      << result.history.best_epoch << ", dev loss " << result.history.best_dev_loss << "\n";
}

void cmd_predict(const RunConfig& cfg, std::ostream& log) {
  const Split split = split_from_string(cfg.predict_split);
  const auto model = out_path(cfg, "model.emtk");
  if (!fs::exists(model)) throw ConfigError("missing " + model.string() + " (run train first)");
  const ModelBundle bundle = load_checkpoint(model, cfg.target);
  const FeatureArtifacts art = read_artifacts(cfg);
  FeatureArtifacts from_model = art;
  from_model.vocab = bundle.vocab;
  from_model.emotions = bundle.emotions;
  from_model.numeric = bundle.numeric;
  from_model.lexical = bundle.lexical;
  if (!(from_model == art) || bundle.params.config.emb_dim != art.emb_dim) {
    throw ConfigError("model.emtk was trained on features from a different featurize run");
  }
  const FeatureTable table = read_split(cfg, art, split);
  const auto preds = predict(bundle.params, table.inputs);
  std::string out = "id\tscore\tbin_prob\temotion\n";
  for (std::size_t i = 0; i < preds.size(); ++i) {
    out += table.ids[i] + "\t";
    put(out, preds[i].score);
    out += "\t";
    put(out, preds[i].bin_prob);
    out += "\t" + bundle.emotions.decode(preds[i].emotion) + "\n";
  }
  const auto path = out_path(cfg, "predictions." + std::string(to_string(split)) + ".tsv");
  detail::write_file(path.string(), out);
  log << "wrote " << preds.size() << " predictions to " << path.string() << "\n";
}

namespace {

struct PredictionRow {
  double score = 0.0;
  std::optional<double> bin_prob;
  std::optional<std::string> emotion;
};

std::map<std::string, PredictionRow> read_predictions(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open predictions " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty prediction file");
  detail::strip_cr(line);
  const auto header = detail::split_tabs(line);
  if (header.size() < 2 || header[0] != "id" || header[1] != "score") {
    throw DataError(path + ": header must start with id<TAB>score");
  }
  const bool full = header.size() >= 4 && header[2] == "bin_prob" && header[3] == "emotion";
  std::map<std::string, PredictionRow> rows;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    detail::strip_cr(line);
    if (line.empty()) continue;
    ++n;
    const auto c = detail::split_tabs(line);
    auto num = [&](const std::string& s) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw DataError(path + ": row " + std::to_string(n) + ": bad number '" + s + "'");
      }
      return v;
    };
    if (c.size() != header.size()) throw DataError(path + ": row " + std::to_string(n) + " has wrong cell count");
    PredictionRow r;
    r.score = num(c[1]);
    if (full) {
      r.bin_prob = num(c[2]);
      r.emotion = c[3];
    }
    if (!rows.emplace(c[0], r).second) throw DataError(path + ": duplicate id " + c[0]);
  }
  return rows;
}

}  // namespace

CorrelationReport cmd_evaluate(const RunConfig& cfg, std::ostream& log) {
  const Split split = split_from_string(cfg.evaluate_split);
  const std::string& gold_path = split_path(cfg, split);
  require_file(gold_path, "paths." + std::string(to_string(split)));
  const Dataset gold = load_tsv(gold_path, cfg.columns, split);
  if (!gold.labeled()) throw DataError(gold_path + " has no gold labels");

  const std::string derived = out_path(cfg, "predictions." + std::string(to_string(split)) + ".tsv").string();
  std::string emp_file = cfg.evaluate_empathy;
  std::string dis_file = cfg.evaluate_distress;
  if (emp_file.empty() && dis_file.empty()) {
    (cfg.target == Target::Empathy ? emp_file : dis_file) = derived;
  }

  CorrelationReport report;
  report.n = gold.size();
  nlohmann::json j = {{"split", to_string(split)}, {"n", gold.size()}};

  auto score = [&](const std::string& file, Target t) -> std::optional<double> {
    if (file.empty()) return std::nullopt;
    const auto preds = read_predictions(file);
    std::vector<double> x, y;
    std::vector<double> bin_prob;
    std::vector<int> bin_gold;
    std::vector<std::string> emo_pred, emo_gold;
    for (const auto& r : gold.records) {
      auto it = preds.find(r.id);
      if (it == preds.end()) throw DataError(file + ": no prediction for id " + r.id);
      const bool emp = t == Target::Empathy;
      x.push_back(it->second.score);
      y.push_back(emp ? r.labels->empathy : r.labels->distress);
      if (it->second.bin_prob) {
        bin_prob.push_back(*it->second.bin_prob);
        bin_gold.push_back(emp ? r.labels->empathy_bin : r.labels->distress_bin);
        emo_pred.push_back(*it->second.emotion);
        emo_gold.push_back(r.labels->emotion);
      }
    }
    const double r = pearson_r(x, y);
    const std::string name(to_string(t));
    nlohmann::json entry = {{"r", r}, {"predictions", file}};
    std::optional<double> p;
    if (x.size() >= 4) {
      p = p_value(r, x.size());
      entry["p"] = *p;
    }
    if (!bin_prob.empty()) {
      std::vector<std::string> labels = emo_gold;
      labels.insert(labels.end(), emo_pred.begin(), emo_pred.end());
      std::sort(labels.begin(), labels.end());
      labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
      auto index = [&](const std::string& s) {
        return static_cast<std::size_t>(std::lower_bound(labels.begin(), labels.end(), s) - labels.begin());
      };
      std::vector<std::size_t> ep, eg;
      for (std::size_t i = 0; i < emo_pred.size(); ++i) {
        ep.push_back(index(emo_pred[i]));
        eg.push_back(index(emo_gold[i]));
      }
      const AuxMetrics aux = aux_metrics(bin_prob, bin_gold, ep, eg, labels.size());
      std::vector<std::string> absent;
      for (auto c : aux.emotion.absent_classes) absent.push_back(labels[c]);
      entry["bin"] = {{"accuracy", aux.bin.accuracy}, {"macro_f1", aux.bin.macro_f1}};
      entry["emotion"] = {{"accuracy", aux.emotion.accuracy},
                          {"macro_f1", aux.emotion.macro_f1},
                          {"absent_classes", absent}};
      log << std::left << std::setw(10) << name << " bin acc " << std::fixed << std::setprecision(4)
          << aux.bin.accuracy << "  bin F1 " << aux.bin.macro_f1 << "  emotion acc "
          << aux.emotion.accuracy << "  emotion F1 " << aux.emotion.macro_f1 << "\n";
    }
    j[name] = entry;
    log << std::left << std::setw(10) << name << " r " << std::fixed << std::setprecision(4) << r;
    if (p) log << "  p " << std::scientific << std::setprecision(3) << *p;
    log << "  n " << x.size() << "\n" << std::defaultfloat;
    if (t == Target::Empathy) {
      report.p_empathy = p;
    } else {
      report.p_distress = p;
    }
    return r;
  };

  report.r_empathy = score(emp_file, Target::Empathy);
  report.r_distress = score(dis_file, Target::Distress);
  if (report.r_empathy && report.r_distress) {
    report.r_average = (*report.r_empathy + *report.r_distress) / 2.0;
    j["r_average"] = *report.r_average;
    log << "average    r " << std::fixed << std::setprecision(4) << *report.r_average << "\n"
        << std::defaultfloat;
  }
  fs::create_directories(cfg.paths.out_dir);
  detail::write_file(out_path(cfg, "evaluation.json").string(), j.dump(2) + "\n");
  return report;
}

}  // namespace emtk
