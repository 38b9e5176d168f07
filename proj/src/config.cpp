#include "emtk/config.hpp"

#include <functional>

#include <nlohmann/json.hpp>

#include "emtk/error.hpp"

namespace emtk {

using nlohmann::json;

namespace {

json columns_to_json(const ColumnMapping& m) {
  return {{"id", m.id},
          {"essay", m.essay},
          {"gender", m.gender},
          {"education", m.education},
          {"race", m.race},
          {"age", m.age},
          {"income", m.income},
          {"personality", m.personality},
          {"iri", m.iri},
          {"empathy", m.empathy},
          {"distress", m.distress},
          {"empathy_bin", m.empathy_bin},
          {"distress_bin", m.distress_bin},
          {"emotion", m.emotion}};
}

json to_json(const RunConfig& c) {
  const auto& m = c.model;
  return {
      {"target", to_string(c.target)},
      {"seed", c.seed},
      {"paths",
       {{"train", c.paths.train},
        {"dev", c.paths.dev},
        {"test", c.paths.test},
        {"out_dir", c.paths.out_dir},
        {"contractions", c.paths.contractions},
        {"acronyms", c.paths.acronyms},
        {"nrc_eil", c.paths.nrc_eil},
        {"nrc_vad", c.paths.nrc_vad},
        {"empath_dir", c.paths.empath_dir}}},
      {"embeddings",
       {{"pseudo", c.embeddings.pseudo},
        {"dim", c.embeddings.dim},
        {"train", c.embeddings.train},
        {"dev", c.embeddings.dev},
        {"test", c.embeddings.test}}},
      {"columns", columns_to_json(c.columns)},
      {"text", {{"max_len", c.max_len}}},
      {"model",
       {{"shared_units", m.shared_units},
        {"task_units", m.task_units},
        {"entity_dim", m.entity_dim},
        {"cat_units1", m.cat_units1},
        {"cat_units2", m.cat_units2},
        {"score_units", m.score_units},
        {"numeric_units", m.numeric_units},
        {"nrc_units", m.nrc_units},
        {"empath_units", m.empath_units},
        {"lexical_units", m.lexical_units},
        {"fusion_units", m.fusion_units},
        {"dropout", m.dropout},
        {"l2", m.l2},
        {"regularized", m.regularized},
        {"numeric_grouping", to_string(m.grouping)},
        {"include_income", m.include_income}}},
      {"lexical", {{"nrc", c.lexical.nrc}, {"empath", c.lexical.empath}}},
      {"train",
       {{"epochs", c.train.epochs},
        {"batch_size", c.train.batch_size},
        {"lr", c.train.lr},
        {"es_patience", c.train.es_patience},
        {"plateau_patience", c.train.plateau_patience},
        {"plateau_factor", c.train.plateau_factor},
        {"shuffle", c.train.shuffle}}},
      {"predict", {{"split", c.predict_split}}},
      {"evaluate",
       {{"split", c.evaluate_split},
        {"empathy_predictions", c.evaluate_empathy},
        {"distress_predictions", c.evaluate_distress}}}};
}

RunConfig from_json(const json& j) {
  RunConfig c;
  c.target = target_from_string(j.at("target").get<std::string>());
  c.seed = j.at("seed").get<std::uint64_t>();
  const auto& p = j.at("paths");
  c.paths = {p.at("train"),        p.at("dev"),      p.at("test"),    p.at("out_dir"),
             p.at("contractions"), p.at("acronyms"), p.at("nrc_eil"), p.at("nrc_vad"),
             p.at("empath_dir")};
  const auto& e = j.at("embeddings");
  c.embeddings = {e.at("pseudo"), e.at("dim"), e.at("train"), e.at("dev"), e.at("test")};
  const auto& col = j.at("columns");
  auto& cm = c.columns;
  cm.id = col.at("id");
  cm.essay = col.at("essay");
  cm.gender = col.at("gender");
  cm.education = col.at("education");
  cm.race = col.at("race");
  cm.age = col.at("age");
  cm.income = col.at("income");
  cm.personality = col.at("personality");
  cm.iri = col.at("iri");
  cm.empathy = col.at("empathy");
  cm.distress = col.at("distress");
  cm.empathy_bin = col.at("empathy_bin");
  cm.distress_bin = col.at("distress_bin");
  cm.emotion = col.at("emotion");
  c.max_len = j.at("text").at("max_len");
  const auto& m = j.at("model");
  auto& mc = c.model;
  mc.shared_units = m.at("shared_units");
  mc.task_units = m.at("task_units");
  mc.entity_dim = m.at("entity_dim");
  mc.cat_units1 = m.at("cat_units1");
  mc.cat_units2 = m.at("cat_units2");
  mc.score_units = m.at("score_units");
  mc.numeric_units = m.at("numeric_units");
  mc.nrc_units = m.at("nrc_units");
  mc.empath_units = m.at("empath_units");
  mc.lexical_units = m.at("lexical_units");
  mc.fusion_units = m.at("fusion_units");
  mc.dropout = m.at("dropout");
  mc.l2 = m.at("l2");
  mc.regularized = m.at("regularized").get<std::vector<std::string>>();
  mc.grouping = grouping_from_string(m.at("numeric_grouping").get<std::string>());
  mc.include_income = m.at("include_income");
  c.lexical.nrc = j.at("lexical").at("nrc").get<std::vector<std::string>>();
  c.lexical.empath = j.at("lexical").at("empath").get<std::vector<std::string>>();
  const auto& t = j.at("train");
  c.train.epochs = t.at("epochs");
  c.train.batch_size = t.at("batch_size");
  c.train.lr = t.at("lr");
  c.train.es_patience = t.at("es_patience");
  c.train.plateau_patience = t.at("plateau_patience");
  c.train.plateau_factor = t.at("plateau_factor");
  c.train.shuffle = t.at("shuffle");
  c.train.seed = c.seed;
  c.predict_split = j.at("predict").at("split");
  c.evaluate_split = j.at("evaluate").at("split");
  c.evaluate_empathy = j.at("evaluate").at("empathy_predictions");
  c.evaluate_distress = j.at("evaluate").at("distress_predictions");
  return c;
}

void flatten(const json& j, const std::string& prefix,
             std::vector<std::pair<std::string, const json*>>& out) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (it->is_object()) {
      flatten(*it, key, out);
    } else {
      out.emplace_back(key, &*it);
    }
  }
}

// Copies every leaf of src into dst, rejecting keys dst does not have and
// values of a different JSON kind.
void merge_checked(json& dst, const json& src, const std::string& prefix) {
  if (!src.is_object()) throw ConfigError("config must be a JSON object at '" + prefix + "'");
  for (auto it = src.begin(); it != src.end(); ++it) {
    const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!dst.contains(it.key())) throw ConfigError("unknown config key '" + key + "'");
    json& d = dst[it.key()];
    if (d.is_object()) {
      merge_checked(d, *it, key);
      continue;
    }
    const bool same_kind = (d.is_number() && it->is_number()) || d.type() == it->type();
    if (!same_kind) throw ConfigError("config key '" + key + "' has the wrong type");
    if (d.is_number_unsigned() && it->is_number_integer() && it->get<long long>() < 0) {
      throw ConfigError("config key '" + key + "' must be non-negative");
    }
    if (d.is_number_integer() && it->is_number_float()) {
      throw ConfigError("config key '" + key + "' must be an integer");
    }
    d = *it;
  }
}

json* find_leaf(json& root, const std::string& dotted) {
  json* node = &root;
  std::size_t start = 0;
  while (true) {
    const auto dot = dotted.find('.', start);
    const std::string part = dotted.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (!node->is_object() || !node->contains(part)) return nullptr;
    node = &(*node)[part];
    if (dot == std::string::npos) return node->is_object() ? nullptr : node;
    start = dot + 1;
  }
}

}  // namespace

std::vector<std::pair<std::string, std::string>> config_keys() {
  const json defaults = to_json(RunConfig{});
  std::vector<std::pair<std::string, const json*>> leaves;
  flatten(defaults, "", leaves);
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [k, v] : leaves) out.emplace_back(k, v->dump());
  return out;
}

RunConfig parse_run_config(const std::string& json_text,
                           const std::vector<std::pair<std::string, std::string>>& overrides) {
  json cfg = to_json(RunConfig{});
  if (!json_text.empty()) {
    json file;
    try {
      file = json::parse(json_text);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    merge_checked(cfg, file, "");
  }
  for (const auto& [key, raw] : overrides) {
    json* leaf = find_leaf(cfg, key);
    if (!leaf) throw ConfigError("unknown config key '" + key + "'");
    json value;
    if (leaf->is_string()) {
      value = raw;
    } else {
      try {
        value = json::parse(raw);
      } catch (const json::parse_error&) {
        throw ConfigError("cannot parse value '" + raw + "' for '" + key + "'");
      }
    }
    // Route through merge_checked for the type checks.
    json patch = value;
    std::string rest = key;
    while (true) {
      const auto dot = rest.rfind('.');
      const std::string part = dot == std::string::npos ? rest : rest.substr(dot + 1);
      patch = json{{part, patch}};
      if (dot == std::string::npos) break;
      rest = rest.substr(0, dot);
    }
    merge_checked(cfg, patch, "");
  }
  try {
    RunConfig c = from_json(cfg);
    c.train.validate();
    if (c.max_len == 0) throw ConfigError("text.max_len must be at least 1");
    if (c.embeddings.dim == 0) throw ConfigError("embeddings.dim must be at least 1");
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
}

std::string dump_run_config(const RunConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

}  // namespace emtk
