#pragma once

#include <filesystem>
#include <ostream>
#include <string>

#include "emtk/config.hpp"
#include "emtk/metrics.hpp"

namespace emtk {

/// Loads the three splits, cleans essays, computes lexical and numeric
/// features, fits vocabularies and standardizers on train, and writes under
/// paths.out_dir: featurize.json, <split>.features.tsv, <split>.emb and
/// <split>.cleaned.tsv (id and cleaned essay).
void cmd_featurize(const RunConfig& cfg, std::ostream& log);

/// Trains on the featurized train split with dev-loss model selection.
/// Writes model.emtk and history.csv.
void cmd_train(const RunConfig& cfg, std::ostream& log);

/// Writes predictions.<split>.tsv with columns id, score, bin_prob, emotion.
void cmd_predict(const RunConfig& cfg, std::ostream& log);

/// Scores prediction files against the gold TSV of evaluate.split, prints a
/// table and writes evaluation.json.
CorrelationReport cmd_evaluate(const RunConfig& cfg, std::ostream& log);

}  // namespace emtk
