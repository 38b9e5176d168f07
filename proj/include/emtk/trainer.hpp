#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "emtk/model.hpp"

namespace emtk {

struct TrainConfig {
  std::size_t epochs = 200;
  std::size_t batch_size = 32;
  double lr = 1e-3;
  std::size_t es_patience = 20;
  std::size_t plateau_patience = 10;
  double plateau_factor = 0.2;
  std::uint64_t seed = 13;
  bool shuffle = true;

  void validate() const;
};

/// Early-stopping and reduce-on-plateau bookkeeping over the dev loss.
/// Improvement means strictly less than the best loss so far; it resets both
/// counters. An LR cut also restarts the plateau window.
class PlateauMonitor {
 public:
  struct Decision {
    bool improved = false;
    bool lr_reduced = false;
    bool stop = false;
  };

  explicit PlateauMonitor(const TrainConfig& config);

  /// Feeds the dev loss of the epoch that just finished (1-based epochs).
  Decision observe(double dev_loss);

  double lr() const { return lr_; }
  std::size_t epoch() const { return epoch_; }
  std::size_t best_epoch() const { return best_epoch_; }
  double best_loss() const { return best_; }

 private:
  TrainConfig config_;
  double lr_;
  double best_ = std::numeric_limits<double>::infinity();
  std::size_t epoch_ = 0;
  std::size_t best_epoch_ = 0;
  std::size_t since_best_ = 0;
  std::size_t since_cut_ = 0;
};

struct EpochRecord {
  std::size_t epoch = 0;
  MultiTaskLoss train;
  MultiTaskLoss dev;
  double lr = 0.0;  ///< rate in effect during the epoch
};

struct TrainingHistory {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;
  double best_dev_loss = std::numeric_limits<double>::infinity();
  bool early_stopped = false;

  std::string to_csv() const;
  void write_csv(const std::filesystem::path& path) const;
};

struct LabeledSet {
  Batch inputs;
  Targets targets;

  std::size_t size() const { return inputs.size(); }
};

struct TrainResult {
  /// Parameters of the best dev epoch, rounded to float32 storage precision.
  NetworkParams best;
  TrainingHistory history;
};

/// Minibatch Adam on the summed loss. Dev loss is computed in eval mode over
/// the whole dev set after every epoch. The last partial batch is kept.
TrainResult train(NetworkParams params, const LabeledSet& train_set, const LabeledSet& dev_set,
                  const TrainConfig& config);

/// Eval-mode loss over a whole set.
MultiTaskLoss evaluate_loss(const NetworkParams& params, const LabeledSet& set);

struct Prediction {
  double score = 0.0;  ///< clamped to [1, 7]
  double bin_prob = 0.0;
  std::vector<double> emotion_probs;
  std::size_t emotion = 0;  ///< argmax
};

std::vector<Prediction> predict(const NetworkParams& params, const Batch& inputs,
                                std::size_t batch_size = 256);

}  // namespace emtk
