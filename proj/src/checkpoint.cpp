#include "emtk/checkpoint.hpp"

#include "binary_io.hpp"
#include "emtk/error.hpp"
#include "json_io.hpp"

namespace emtk {

namespace detail {

json to_json(const ModelConfig& c) {
  return {{"mode", to_string(c.mode)},
          {"emb_dim", c.emb_dim},
          {"shared_units", c.shared_units},
          {"task_units", c.task_units},
          {"entity_dim", c.entity_dim},
          {"cat_units1", c.cat_units1},
          {"cat_units2", c.cat_units2},
          {"score_units", c.score_units},
          {"numeric_units", c.numeric_units},
          {"nrc_units", c.nrc_units},
          {"empath_units", c.empath_units},
          {"lexical_units", c.lexical_units},
          {"fusion_units", c.fusion_units},
          {"emotion_classes", c.emotion_classes},
          {"dropout", c.dropout},
          {"l2", c.l2},
          {"regularized", c.regularized},
          {"numeric_grouping", to_string(c.grouping)},
          {"include_income", c.include_income},
          {"cat_vocab", c.cat_vocab},
          {"lexical", to_json(c.lexical)}};
}

ModelConfig model_config_from_json(const json& j) {
  ModelConfig c;
  c.mode = target_from_string(get_field<std::string>(j, "mode"));
  c.emb_dim = get_field<std::size_t>(j, "emb_dim");
  c.shared_units = get_field<std::size_t>(j, "shared_units");
  c.task_units = get_field<std::size_t>(j, "task_units");
  c.entity_dim = get_field<std::size_t>(j, "entity_dim");
  c.cat_units1 = get_field<std::size_t>(j, "cat_units1");
  c.cat_units2 = get_field<std::size_t>(j, "cat_units2");
  c.score_units = get_field<std::size_t>(j, "score_units");
  c.numeric_units = get_field<std::size_t>(j, "numeric_units");
  c.nrc_units = get_field<std::size_t>(j, "nrc_units");
  c.empath_units = get_field<std::size_t>(j, "empath_units");
  c.lexical_units = get_field<std::size_t>(j, "lexical_units");
  c.fusion_units = get_field<std::size_t>(j, "fusion_units");
  c.emotion_classes = get_field<std::size_t>(j, "emotion_classes");
  c.dropout = get_field<double>(j, "dropout");
  c.l2 = get_field<double>(j, "l2");
  c.regularized = get_field<std::vector<std::string>>(j, "regularized");
  c.grouping = grouping_from_string(get_field<std::string>(j, "numeric_grouping"));
  c.include_income = get_field<bool>(j, "include_income");
  c.cat_vocab = get_field<std::array<std::size_t, kCategoricalCount>>(j, "cat_vocab");
  c.lexical = feature_spec_from_json(j.at("lexical"));
  return c;
}

json to_json(const CategoricalVocab& v) {
  json j = json::object();
  for (std::size_t k = 0; k < kCategoricalCount; ++k) {
    j[std::string(kCategoricalNames[k])] = v.features[k].known_tokens();
  }
  return j;
}

CategoricalVocab categorical_vocab_from_json(const json& j) {
  CategoricalVocab v;
  for (std::size_t k = 0; k < kCategoricalCount; ++k) {
    v.features[k] = Vocab(get_field<std::vector<std::string>>(j, std::string(kCategoricalNames[k]).c_str()));
  }
  return v;
}

json to_json(const Standardizer& s) {
  return {{"mean", std::vector<double>(s.mean.data(), s.mean.data() + s.mean.size())},
          {"std", std::vector<double>(s.std.data(), s.std.data() + s.std.size())},
          {"zero_variance", s.zero_variance}};
}

Standardizer standardizer_from_json(const json& j) {
  Standardizer s;
  const auto mean = get_field<std::vector<double>>(j, "mean");
  const auto std = get_field<std::vector<double>>(j, "std");
  if (mean.size() != std.size()) throw std::out_of_range("standardizer mean/std length mismatch");
  s.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(mean.size()));
  s.std = Eigen::Map<const Eigen::VectorXd>(std.data(), static_cast<Eigen::Index>(std.size()));
  s.zero_variance = get_field<std::vector<std::size_t>>(j, "zero_variance");
  return s;
}

json to_json(const FeatureSpec& s) { return {{"nrc", s.nrc}, {"empath", s.empath}}; }

FeatureSpec feature_spec_from_json(const json& j) {
  return {get_field<std::vector<std::string>>(j, "nrc"),
          get_field<std::vector<std::string>>(j, "empath")};
}

}  // namespace detail

std::string serialize_checkpoint(const ModelBundle& b) {
  using detail::json;
  json manifest = json::array();
  for (const auto& t : b.params.tensors()) {
    manifest.push_back({{"name", t.name}, {"shape", {t.value->rows(), t.value->cols()}}});
  }
  const json header = {{"config", detail::to_json(b.params.config)},
                       {"vocab", detail::to_json(b.vocab)},
                       {"emotions", b.emotions.labels()},
                       {"standardizers",
                        {{"numeric", detail::to_json(b.numeric)},
                         {"lexical", detail::to_json(b.lexical)}}},
                       {"tensors", manifest}};
  const std::string text = header.dump();
  std::string out = "EMTK";
  detail::put_u32(out, kCheckpointVersion);
  detail::put_u32(out, static_cast<std::uint32_t>(text.size()));
  out += text;
  for (const auto& t : b.params.tensors()) {
    const Mat& m = *t.value;
    for (Eigen::Index i = 0; i < m.size(); ++i) detail::put_f32(out, static_cast<float>(m.data()[i]));
  }
  return out;
}

void save_checkpoint(const ModelBundle& bundle, const std::filesystem::path& path) {
  detail::write_file(path.string(), serialize_checkpoint(bundle));
}

ModelBundle parse_checkpoint(std::string_view bytes, std::optional<Target> expected_mode) {
  detail::Reader r(bytes, "EMTK1");
  if (r.take(4, "magic") != "EMTK") r.fail("bad magic", 0);
  const auto version = r.u32("version");
  if (version != kCheckpointVersion) r.fail("unsupported version " + std::to_string(version), 4);
  const auto len = r.u32("header length");
  const std::size_t header_at = r.offset();
  const auto text = r.take(len, "header");

  ModelBundle b;
  detail::json manifest;
  try {
    const auto header = detail::json::parse(text);
    const ModelConfig config = detail::model_config_from_json(header.at("config"));
    if (expected_mode && config.mode != *expected_mode) {
      throw ConfigError("checkpoint was trained for " + std::string(to_string(config.mode)) +
                        ", requested " + std::string(to_string(*expected_mode)));
    }
    b.params = build(config, 0);
    b.vocab = detail::categorical_vocab_from_json(header.at("vocab"));
    b.emotions = LabelVocab(header.at("emotions").get<std::vector<std::string>>());
    b.numeric = detail::standardizer_from_json(header.at("standardizers").at("numeric"));
    b.lexical = detail::standardizer_from_json(header.at("standardizers").at("lexical"));
    manifest = header.at("tensors");
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    r.fail(std::string("invalid header: ") + e.what(), header_at);
  }

  if (b.vocab.sizes() != b.params.config.cat_vocab) r.fail("vocabulary sizes disagree with config", header_at);
  if (b.emotions.size() != b.params.config.emotion_classes) {
    r.fail("emotion label count disagrees with config", header_at);
  }
  auto tensors = b.params.tensors();
  if (!manifest.is_array() || manifest.size() != tensors.size()) {
    r.fail("tensor manifest does not match the model layout", header_at);
  }
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    const auto& entry = manifest[i];
    Mat& m = *tensors[i].value;
    if (entry.value("name", "") != tensors[i].name ||
        entry.value("shape", std::vector<Eigen::Index>{}) != std::vector<Eigen::Index>{m.rows(), m.cols()}) {
      r.fail("tensor " + std::to_string(i) + " (" + tensors[i].name + ") has unexpected name or shape",
             header_at);
    }
  }
  for (auto& t : tensors) {
    Mat& m = *t.value;
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<double>(r.f32(t.name.c_str()));
  }
  if (r.remaining() != 0) r.fail("trailing bytes after last tensor", r.offset());
  return b;
}

ModelBundle load_checkpoint(const std::filesystem::path& path, std::optional<Target> expected_mode) {
  return parse_checkpoint(detail::read_file(path.string()), expected_mode);
}

}  // namespace emtk
