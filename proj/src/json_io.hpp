#pragma once

#include <nlohmann/json.hpp>

#include "emtk/data.hpp"
#include "emtk/lexicon.hpp"
#include "emtk/model.hpp"

namespace emtk::detail {

using nlohmann::json;

json to_json(const ModelConfig& c);
ModelConfig model_config_from_json(const json& j);

json to_json(const CategoricalVocab& v);
CategoricalVocab categorical_vocab_from_json(const json& j);

json to_json(const Standardizer& s);
Standardizer standardizer_from_json(const json& j);

json to_json(const FeatureSpec& s);
FeatureSpec feature_spec_from_json(const json& j);

/// Wraps nlohmann access errors as ConfigError/FormatError-friendly text.
template <typename T>
T get_field(const json& j, const char* key) {
  if (!j.contains(key)) throw std::out_of_range(std::string("missing key '") + key + "'");
  return j.at(key).get<T>();
}

}  // namespace emtk::detail
