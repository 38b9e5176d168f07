#include "emtk/trainer.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>

#include "binary_io.hpp"
#include "emtk/error.hpp"
#include "emtk/nn/adam.hpp"

namespace emtk {

void TrainConfig::validate() const {
  if (epochs == 0) throw ConfigError("train.epochs must be positive");
  if (batch_size == 0) throw ConfigError("train.batch_size must be positive");
  if (!(lr > 0.0)) throw ConfigError("train.lr must be positive");
  if (plateau_patience == 0) throw ConfigError("train.plateau_patience must be positive");
  if (plateau_patience >= es_patience) {
    throw ConfigError("train.plateau_patience must be smaller than train.es_patience");
  }
  if (!(plateau_factor > 0.0 && plateau_factor < 1.0)) {
    throw ConfigError("train.plateau_factor must be in (0, 1)");
  }
}

PlateauMonitor::PlateauMonitor(const TrainConfig& config) : config_(config), lr_(config.lr) {
  config_.validate();
}

PlateauMonitor::Decision PlateauMonitor::observe(double dev_loss) {
  ++epoch_;
  Decision d;
  if (dev_loss < best_) {
    best_ = dev_loss;
    best_epoch_ = epoch_;
    since_best_ = 0;
    since_cut_ = 0;
    d.improved = true;
    return d;
  }
  ++since_best_;
  ++since_cut_;
  if (since_cut_ >= config_.plateau_patience) {
    lr_ *= config_.plateau_factor;
    since_cut_ = 0;
    d.lr_reduced = true;
  }
  d.stop = since_best_ >= config_.es_patience;
  return d;
}

namespace {

void append_double(std::string& out, double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

void append_loss(std::string& out, const MultiTaskLoss& l) {
  for (double v : {l.total, l.reg_mse, l.bin_bce, l.emo_ce, l.l2_penalty}) {
    out.push_back(',');
    append_double(out, v);
  }
}

MultiTaskLoss weighted(const MultiTaskLoss& l, double w) {
  return {l.reg_mse * w, l.bin_bce * w, l.emo_ce * w, l.l2_penalty * w, l.total * w};
}

void accumulate(MultiTaskLoss& acc, const MultiTaskLoss& l) {
  acc.reg_mse += l.reg_mse;
  acc.bin_bce += l.bin_bce;
  acc.emo_ce += l.emo_ce;
  acc.l2_penalty += l.l2_penalty;
  acc.total += l.total;
}

}  // namespace

std::string TrainingHistory::to_csv() const {
  std::string out =
      "epoch,train_total,train_reg_mse,train_bin_bce,train_emo_ce,train_l2,"
      "dev_total,dev_reg_mse,dev_bin_bce,dev_emo_ce,dev_l2,lr\n";
  for (const auto& e : epochs) {
    out += std::to_string(e.epoch);
    append_loss(out, e.train);
    append_loss(out, e.dev);
    out.push_back(',');
    append_double(out, e.lr);
    out.push_back('\n');
  }
  return out;
}

void TrainingHistory::write_csv(const std::filesystem::path& path) const {
  detail::write_file(path.string(), to_csv());
}

MultiTaskLoss evaluate_loss(const NetworkParams& params, const LabeledSet& set) {
  return compute_loss(params, forward(params, set.inputs, false, nullptr), set.targets);
}

TrainResult train(NetworkParams params, const LabeledSet& train_set, const LabeledSet& dev_set,
                  const TrainConfig& config) {
  config.validate();
  if (train_set.size() == 0) throw DataError("training set is empty");
  if (dev_set.size() == 0) throw DataError("dev set is empty");

  nn::Rng rng(config.seed ^ 0x5DEECE66DULL);
  nn::AdamState<double> adam;
  adam.lr = config.lr;
  PlateauMonitor monitor(config);
  TrainResult result;
  result.best = params;
  result.best.round_to_storage();

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const double n = static_cast<double>(train_set.size());

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    if (config.shuffle) std::shuffle(order.begin(), order.end(), rng);
    const double lr = monitor.lr();
    adam.lr = lr;
    MultiTaskLoss train_loss;
    std::size_t batch_no = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size, ++batch_no) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const std::vector<std::size_t> rows(order.begin() + static_cast<std::ptrdiff_t>(start),
                                          order.begin() + static_cast<std::ptrdiff_t>(end));
      LossAndGrads lg;
      try {
        lg = loss_and_grads(params, train_set.inputs.select(rows), train_set.targets.select(rows),
                            true, &rng);
        std::vector<Mat*> p;
        std::vector<const Mat*> g;
        for (auto& t : params.tensors()) p.push_back(t.value);
        for (const auto& t : std::as_const(lg.grads).tensors()) {
          nn::check_finite(*t.value, "gradient of " + t.name);
          g.push_back(t.value);
        }
        nn::adam_step(adam, p, g);
      } catch (const NumericFault& e) {
        throw NumericFault(std::string(e.what()) + " (epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(batch_no + 1) + ")");
      }
      accumulate(train_loss, weighted(lg.loss, static_cast<double>(rows.size()) / n));
    }

    MultiTaskLoss dev_loss;
    try {
      dev_loss = evaluate_loss(params, dev_set);
    } catch (const NumericFault& e) {
      throw NumericFault(std::string(e.what()) + " (epoch " + std::to_string(epoch) + ", dev pass)");
    }
    result.history.epochs.push_back({epoch, train_loss, dev_loss, lr});
    const auto d = monitor.observe(dev_loss.total);
    if (d.improved) {
      result.best = params;
      result.best.round_to_storage();
      result.history.best_epoch = epoch;
      result.history.best_dev_loss = dev_loss.total;
    }
    if (d.stop) {
      result.history.early_stopped = true;
      break;
    }
  }
  return result;
}

std::vector<Prediction> predict(const NetworkParams& params, const Batch& inputs,
                                std::size_t batch_size) {
  std::vector<Prediction> out;
  out.reserve(inputs.size());
  for (std::size_t start = 0; start < inputs.size(); start += batch_size) {
    const std::size_t end = std::min(inputs.size(), start + batch_size);
    std::vector<std::size_t> rows(end - start);
    std::iota(rows.begin(), rows.end(), start);
    const Outputs o = forward(params, inputs.select(rows), false, nullptr);
    for (Eigen::Index i = 0; i < o.score.rows(); ++i) {
      Prediction p;
      p.score = std::clamp(o.score(i, 0), 1.0, 7.0);
      p.bin_prob = o.bin(i, 0);
      p.emotion_probs.assign(o.emotion.row(i).data(), o.emotion.row(i).data() + o.emotion.cols());
      Eigen::Index arg = 0;
      o.emotion.row(i).maxCoeff(&arg);
      p.emotion = static_cast<std::size_t>(arg);
      out.push_back(std::move(p));
    }
  }
  return out;
}

}  // namespace emtk
