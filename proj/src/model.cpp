#include "emtk/model.hpp"

#include <algorithm>

#include "emtk/error.hpp"
#include "emtk/nn/loss.hpp"

namespace emtk {

using nn::Activation;

std::string_view to_string(Target t) { return t == Target::Empathy ? "empathy" : "distress"; }

Target target_from_string(std::string_view s) {
  if (s == "empathy") return Target::Empathy;
  if (s == "distress") return Target::Distress;
  throw ConfigError("unknown target '" + std::string(s) + "' (expected empathy or distress)");
}

std::string_view to_string(NumericGrouping g) {
  return g == NumericGrouping::PerScore ? "per_score" : "per_group";
}

NumericGrouping grouping_from_string(std::string_view s) {
  if (s == "per_score") return NumericGrouping::PerScore;
  if (s == "per_group") return NumericGrouping::PerGroup;
  throw ConfigError("unknown numeric grouping '" + std::string(s) + "'");
}

std::vector<std::string> default_regularized_layers() {
  return {"text.shared", "text.empathy_task", "text.emotion_task", "cat.dense2",
          "num.merge",   "lex.merge",         "fusion.hidden"};
}

std::size_t ModelConfig::fusion_width() const {
  return 2 * task_units + cat_units2 + numeric_units +
         (mode == Target::Distress ? lexical_units : 0);
}

void ModelConfig::validate() const {
  auto positive = [](std::size_t v, const char* name) {
    if (v == 0) throw ConfigError(std::string("model.") + name + " must be positive");
  };
  positive(emb_dim, "emb_dim");
  positive(shared_units, "shared_units");
  positive(task_units, "task_units");
  positive(entity_dim, "entity_dim");
  positive(cat_units1, "cat_units1");
  positive(cat_units2, "cat_units2");
  positive(score_units, "score_units");
  positive(numeric_units, "numeric_units");
  positive(fusion_units, "fusion_units");
  if (emotion_classes < 2) throw ConfigError("emotion head needs at least 2 classes");
  if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("model.dropout must be in [0, 1)");
  if (l2 < 0.0) throw ConfigError("model.l2 must be non-negative");
  for (auto v : cat_vocab) {
    if (v == 0) throw ConfigError("categorical vocabulary size must be at least 1");
  }
  if (mode == Target::Distress) {
    if (lexical.nrc.empty() || lexical.empath.empty()) {
      throw ConfigError("distress mode needs non-empty NRC and Empath feature lists");
    }
    positive(nrc_units, "nrc_units");
    positive(empath_units, "empath_units");
    positive(lexical_units, "lexical_units");
  } else if (!lexical.empty()) {
    throw ConfigError("empathy mode takes no lexical features");
  }
}

ModelConfig default_config(Target mode, const CategoricalVocab& vocab, std::size_t emotion_classes) {
  ModelConfig c;
  c.mode = mode;
  c.cat_vocab = vocab.sizes();
  c.emotion_classes = emotion_classes;
  if (mode == Target::Distress) c.lexical = FeatureSpec::distress_default();
  return c;
}

Batch Batch::select(const std::vector<std::size_t>& rows) const {
  Batch b;
  const auto n = static_cast<Eigen::Index>(rows.size());
  b.essay.resize(n, essay.cols());
  b.numeric.resize(n, numeric.cols());
  b.lexical.resize(n, lexical.cols());
  for (std::size_t k = 0; k < kCategoricalCount; ++k) b.cats[k].reserve(rows.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto r = rows[static_cast<std::size_t>(i)];
    const auto ri = static_cast<Eigen::Index>(r);
    b.essay.row(i) = essay.row(ri);
    b.numeric.row(i) = numeric.row(ri);
    if (lexical.cols() > 0) b.lexical.row(i) = lexical.row(ri);
    for (std::size_t k = 0; k < kCategoricalCount; ++k) b.cats[k].push_back(cats[k][r]);
  }
  return b;
}

Targets Targets::select(const std::vector<std::size_t>& rows) const {
  Targets t;
  const auto n = static_cast<Eigen::Index>(rows.size());
  t.score.resize(n, 1);
  t.bin.resize(n, 1);
  t.emotion.reserve(rows.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto r = rows[static_cast<std::size_t>(i)];
    t.score(i, 0) = score(static_cast<Eigen::Index>(r), 0);
    t.bin(i, 0) = bin(static_cast<Eigen::Index>(r), 0);
    t.emotion.push_back(emotion[r]);
  }
  return t;
}

namespace {

std::vector<std::string> numeric_input_names(const ModelConfig& c) {
  std::vector<std::string> names;
  if (c.grouping == NumericGrouping::PerScore) {
    for (std::size_t j = 0; j < c.numeric_count(); ++j) names.push_back("num.score" + std::to_string(j));
  } else {
    names = {"num.personality", "num.iri"};
    if (c.include_income) names.push_back("num.income");
  }
  return names;
}

// Column ranges of the numeric block read by each input layer.
std::vector<std::pair<Eigen::Index, Eigen::Index>> numeric_slices(const ModelConfig& c) {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> s;
  if (c.grouping == NumericGrouping::PerScore) {
    for (std::size_t j = 0; j < c.numeric_count(); ++j) s.emplace_back(static_cast<Eigen::Index>(j), 1);
  } else {
    s.emplace_back(0, static_cast<Eigen::Index>(kPersonalityCount));
    s.emplace_back(static_cast<Eigen::Index>(kPersonalityCount), static_cast<Eigen::Index>(kIriCount));
    if (c.include_income) s.emplace_back(static_cast<Eigen::Index>(kPersonalityCount + kIriCount), 1);
  }
  return s;
}

template <typename Self, typename LayerPtr>
std::vector<std::pair<std::string, LayerPtr>> collect_layers(Self& p) {
  std::vector<std::pair<std::string, LayerPtr>> out = {
      {"text.shared", &p.text_shared},   {"text.empathy_task", &p.text_empathy},
      {"text.emotion_task", &p.text_emotion}, {"head.bin", &p.head_bin},
      {"head.emotion", &p.head_emotion}, {"cat.dense1", &p.cat_dense1},
      {"cat.dense2", &p.cat_dense2}};
  const auto names = numeric_input_names(p.config);
  for (std::size_t j = 0; j < p.num_in.size(); ++j) out.emplace_back(names.at(j), &p.num_in[j]);
  out.emplace_back("num.merge", &p.num_merge);
  if (p.config.mode == Target::Distress) {
    out.emplace_back("lex.nrc", &p.lex_nrc);
    out.emplace_back("lex.empath", &p.lex_empath);
    out.emplace_back("lex.merge", &p.lex_merge);
  }
  out.emplace_back("fusion.hidden", &p.fusion_hidden);
  out.emplace_back("fusion.out", &p.fusion_out);
  return out;
}

template <typename Self, typename Entry>
std::vector<Entry> collect_tensors(Self& p) {
  std::vector<Entry> out;
  auto layers = p.layers();
  auto push_layer = [&](std::size_t i) {
    out.push_back({layers[i].first + ".W", &layers[i].second->W});
    out.push_back({layers[i].first + ".b", &layers[i].second->b});
  };
  // Text branch and heads, entity tables, then the remaining dense layers.
  for (std::size_t i = 0; i < 5; ++i) push_layer(i);
  for (std::size_t k = 0; k < kCategoricalCount; ++k) {
    out.push_back({"cat.embed." + std::string(kCategoricalNames[k]) + ".E", &p.cat_embed[k].E});
  }
  for (std::size_t i = 5; i < layers.size(); ++i) push_layer(i);
  return out;
}

Mat hconcat(const std::vector<const Mat*>& parts) {
  Eigen::Index cols = 0;
  for (const auto* m : parts) cols += m->cols();
  Mat out(parts.front()->rows(), cols);
  Eigen::Index at = 0;
  for (const auto* m : parts) {
    out.middleCols(at, m->cols()) = *m;
    at += m->cols();
  }
  return out;
}

}  // namespace

std::vector<std::pair<std::string, Dense*>> NetworkParams::layers() {
  return collect_layers<NetworkParams, Dense*>(*this);
}

std::vector<std::pair<std::string, const Dense*>> NetworkParams::layers() const {
  return collect_layers<const NetworkParams, const Dense*>(*this);
}

std::vector<NamedTensor> NetworkParams::tensors() {
  return collect_tensors<NetworkParams, NamedTensor>(*this);
}

std::vector<ConstNamedTensor> NetworkParams::tensors() const {
  return collect_tensors<const NetworkParams, ConstNamedTensor>(*this);
}

std::size_t NetworkParams::param_count() const {
  std::size_t n = 0;
  for (const auto& t : tensors()) n += static_cast<std::size_t>(t.value->size());
  return n;
}

double NetworkParams::l2_penalty() const {
  double sum = 0.0;
  for (const auto& [name, layer] : layers()) sum += layer->penalty();
  return sum;
}

NetworkParams NetworkParams::zeros_like() const {
  NetworkParams z = *this;
  for (auto& t : z.tensors()) t.value->setZero();
  return z;
}

void NetworkParams::round_to_storage() {
  for (auto& t : tensors()) *t.value = t.value->cast<float>().cast<double>();
}

NetworkParams build(const ModelConfig& c, std::uint64_t seed) {
  c.validate();
  NetworkParams p;
  p.config = c;
  auto reg = [&](const std::string& name) {
    return std::find(c.regularized.begin(), c.regularized.end(), name) != c.regularized.end() ? c.l2
                                                                                              : 0.0;
  };
  auto dense = [&](const std::string& name, std::size_t in, std::size_t out, Activation act) {
    return Dense(static_cast<Eigen::Index>(in), static_cast<Eigen::Index>(out), act, reg(name));
  };
  p.text_shared = dense("text.shared", c.emb_dim, c.shared_units, Activation::Tanh);
  p.text_empathy = dense("text.empathy_task", c.shared_units, c.task_units, Activation::Tanh);
  p.text_emotion = dense("text.emotion_task", c.shared_units, c.task_units, Activation::Tanh);
  p.head_bin = dense("head.bin", c.task_units, 1, Activation::Sigmoid);
  p.head_emotion = dense("head.emotion", c.task_units, c.emotion_classes, Activation::Softmax);
  for (std::size_t k = 0; k < kCategoricalCount; ++k) {
    p.cat_embed[k] = Table(static_cast<Eigen::Index>(c.cat_vocab[k]), static_cast<Eigen::Index>(c.entity_dim));
  }
  p.cat_dense1 = dense("cat.dense1", kCategoricalCount * c.entity_dim, c.cat_units1, Activation::Tanh);
  p.cat_dense2 = dense("cat.dense2", c.cat_units1, c.cat_units2, Activation::Tanh);
  const auto names = numeric_input_names(c);
  const auto slices = numeric_slices(c);
  for (std::size_t j = 0; j < names.size(); ++j) {
    p.num_in.push_back(dense(names[j], static_cast<std::size_t>(slices[j].second), c.score_units,
                             Activation::Tanh));
  }
  p.num_merge = dense("num.merge", names.size() * c.score_units, c.numeric_units, Activation::Tanh);
  if (c.mode == Target::Distress) {
    p.lex_nrc = dense("lex.nrc", c.lexical.nrc.size(), c.nrc_units, Activation::Tanh);
    p.lex_empath = dense("lex.empath", c.lexical.empath.size(), c.empath_units, Activation::Tanh);
    p.lex_merge = dense("lex.merge", c.nrc_units + c.empath_units, c.lexical_units, Activation::Tanh);
  }
  p.fusion_hidden = dense("fusion.hidden", c.fusion_width(), c.fusion_units, Activation::Tanh);
  p.fusion_out = dense("fusion.out", c.fusion_units, 1, Activation::Linear);

  for (const auto& name : c.regularized) {
    bool found = false;
    for (const auto& [n, l] : p.layers()) found = found || n == name;
    if (!found && !(c.mode == Target::Empathy && name.starts_with("lex."))) {
      throw ConfigError("regularized layer '" + name + "' does not exist in this model");
    }
  }

  nn::Rng rng(seed);
  for (auto& [name, layer] : p.layers()) {
    layer->init(rng);
  }
  for (auto& t : p.cat_embed) t.init(rng);
  return p;
}

Outputs forward(const NetworkParams& p, const Batch& batch, bool train, nn::Rng* rng,
                ForwardCache* cache) {
  const auto& c = p.config;
  const auto n = static_cast<Eigen::Index>(batch.size());
  if (batch.essay.cols() != static_cast<Eigen::Index>(c.emb_dim)) {
    throw ShapeError("essay vectors have dim " + std::to_string(batch.essay.cols()) +
                     ", model expects " + std::to_string(c.emb_dim));
  }
  if (batch.numeric.rows() != n || batch.numeric.cols() != static_cast<Eigen::Index>(c.numeric_count())) {
    throw ShapeError("numeric block must be " + std::to_string(n) + "x" + std::to_string(c.numeric_count()));
  }
  const auto lex_width = static_cast<Eigen::Index>(c.lexical.width());
  if (batch.lexical.cols() != lex_width || (lex_width > 0 && batch.lexical.rows() != n)) {
    throw ShapeError("lexical block must have " + std::to_string(lex_width) + " columns");
  }
  for (const auto& idx : batch.cats) {
    if (static_cast<Eigen::Index>(idx.size()) != n) throw ShapeError("categorical index count mismatch");
  }
  nn::check_finite(batch.essay, "essay vectors");
  nn::check_finite(batch.numeric, "numeric inputs");
  nn::check_finite(batch.lexical, "lexical inputs");

  ForwardCache local;
  ForwardCache& k = cache ? *cache : local;

  // Text branch.
  auto [x, mask] = nn::dropout_forward<double>({c.dropout, train}, batch.essay, rng);
  k.dropout_mask = std::move(mask);
  const Mat h = nn::dense_forward(p.text_shared, x, &k.text_shared);
  const Mat t1 = nn::dense_forward(p.text_empathy, h, &k.text_empathy);
  const Mat t2 = nn::dense_forward(p.text_emotion, h, &k.text_emotion);
  Outputs out;
  out.bin = nn::dense_forward(p.head_bin, t1, &k.head_bin);
  out.emotion = nn::dense_forward(p.head_emotion, t2, &k.head_emotion);

  // Categorical branch.
  std::array<Mat, kCategoricalCount> emb;
  for (std::size_t f = 0; f < kCategoricalCount; ++f) emb[f] = p.cat_embed[f].gather(batch.cats[f]);
  k.cats = batch.cats;
  const Mat c0 = hconcat({&emb[0], &emb[1], &emb[2], &emb[3]});
  const Mat c1 = nn::dense_forward(p.cat_dense1, c0, &k.cat_dense1);
  const Mat C = nn::dense_forward(p.cat_dense2, c1, &k.cat_dense2);

  // Numeric branch.
  const auto slices = numeric_slices(c);
  std::vector<Mat> s(slices.size());
  std::vector<const Mat*> sp;
  k.num_in.resize(slices.size());
  for (std::size_t j = 0; j < slices.size(); ++j) {
    const Mat in = batch.numeric.middleCols(slices[j].first, slices[j].second);
    s[j] = nn::dense_forward(p.num_in[j], in, &k.num_in[j]);
    sp.push_back(&s[j]);
  }
  const Mat N = nn::dense_forward(p.num_merge, hconcat(sp), &k.num_merge);

  std::vector<const Mat*> fused = {&t1, &t2, &C, &N};
  Mat L;
  if (c.mode == Target::Distress) {
    const auto nrc_w = static_cast<Eigen::Index>(c.lexical.nrc.size());
    const Mat a = nn::dense_forward(p.lex_nrc, Mat(batch.lexical.leftCols(nrc_w)), &k.lex_nrc);
    const Mat e = nn::dense_forward(p.lex_empath, Mat(batch.lexical.rightCols(lex_width - nrc_w)),
                                    &k.lex_empath);
    L = nn::dense_forward(p.lex_merge, hconcat({&a, &e}), &k.lex_merge);
    fused.push_back(&L);
  }
  const Mat F = hconcat(fused);
  const Mat g = nn::dense_forward(p.fusion_hidden, F, &k.fusion_hidden);
  out.score = nn::dense_forward(p.fusion_out, g, &k.fusion_out);
  return out;
}

NetworkParams backward(const NetworkParams& p, const ForwardCache& k, const Mat& d_score,
                       const Mat& d_bin, const Mat& d_emotion) {
  const auto& c = p.config;
  NetworkParams g = p.zeros_like();

  const Mat d_g = nn::dense_backward(p.fusion_out, k.fusion_out, d_score, g.fusion_out);
  const Mat d_F = nn::dense_backward(p.fusion_hidden, k.fusion_hidden, d_g, g.fusion_hidden);
  const auto tu = static_cast<Eigen::Index>(c.task_units);
  const auto cu = static_cast<Eigen::Index>(c.cat_units2);
  const auto nu = static_cast<Eigen::Index>(c.numeric_units);

  Mat d_t1 = d_F.middleCols(0, tu);
  Mat d_t2 = d_F.middleCols(tu, tu);
  const Mat d_C = d_F.middleCols(2 * tu, cu);
  const Mat d_N = d_F.middleCols(2 * tu + cu, nu);

  d_t1 += nn::dense_backward(p.head_bin, k.head_bin, d_bin, g.head_bin);
  d_t2 += nn::dense_backward(p.head_emotion, k.head_emotion, d_emotion, g.head_emotion);
  Mat d_h = nn::dense_backward(p.text_empathy, k.text_empathy, d_t1, g.text_empathy);
  d_h += nn::dense_backward(p.text_emotion, k.text_emotion, d_t2, g.text_emotion);
  nn::dense_backward(p.text_shared, k.text_shared, d_h, g.text_shared);

  const Mat d_c1 = nn::dense_backward(p.cat_dense2, k.cat_dense2, d_C, g.cat_dense2);
  const Mat d_c0 = nn::dense_backward(p.cat_dense1, k.cat_dense1, d_c1, g.cat_dense1);
  const auto ed = static_cast<Eigen::Index>(c.entity_dim);
  for (std::size_t f = 0; f < kCategoricalCount; ++f) {
    Table::scatter_add(d_c0.middleCols(static_cast<Eigen::Index>(f) * ed, ed), k.cats[f],
                       g.cat_embed[f].E);
  }

  const Mat d_s = nn::dense_backward(p.num_merge, k.num_merge, d_N, g.num_merge);
  const auto su = static_cast<Eigen::Index>(c.score_units);
  for (std::size_t j = 0; j < p.num_in.size(); ++j) {
    nn::dense_backward(p.num_in[j], k.num_in[j], Mat(d_s.middleCols(static_cast<Eigen::Index>(j) * su, su)),
                       g.num_in[j]);
  }

  if (c.mode == Target::Distress) {
    const Mat d_L = d_F.middleCols(2 * tu + cu + nu, static_cast<Eigen::Index>(c.lexical_units));
    const Mat d_ae = nn::dense_backward(p.lex_merge, k.lex_merge, d_L, g.lex_merge);
    const auto au = static_cast<Eigen::Index>(c.nrc_units);
    nn::dense_backward(p.lex_nrc, k.lex_nrc, Mat(d_ae.leftCols(au)), g.lex_nrc);
    nn::dense_backward(p.lex_empath, k.lex_empath, Mat(d_ae.rightCols(d_ae.cols() - au)), g.lex_empath);
  }
  return g;
}

namespace {
void check_targets(const Outputs& out, const Targets& t) {
  if (t.score.rows() != out.score.rows() || t.bin.rows() != out.bin.rows() ||
      static_cast<Eigen::Index>(t.emotion.size()) != out.emotion.rows()) {
    throw DataError("targets must carry score, bin and emotion for every row");
  }
}
}  // namespace

MultiTaskLoss compute_loss(const NetworkParams& params, const Outputs& out, const Targets& targets) {
  check_targets(out, targets);
  MultiTaskLoss l;
  l.reg_mse = nn::mse(out.score, targets.score);
  l.bin_bce = nn::bce(out.bin, targets.bin);
  l.emo_ce = nn::ce(out.emotion, targets.emotion);
  l.l2_penalty = params.l2_penalty();
  l.total = ((l.reg_mse + l.bin_bce) + l.emo_ce) + l.l2_penalty;
  return l;
}

LossAndGrads loss_and_grads(const NetworkParams& params, const Batch& batch,
                            const Targets& targets, bool train, nn::Rng* rng) {
  ForwardCache cache;
  const Outputs out = forward(params, batch, train, rng, &cache);
  LossAndGrads r;
  r.loss = compute_loss(params, out, targets);
  r.grads = backward(params, cache, nn::grad_mse(out.score, targets.score),
                     nn::grad_bce(out.bin, targets.bin), nn::grad_ce(out.emotion, targets.emotion));
  return r;
}

}  // namespace emtk
