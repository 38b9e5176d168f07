#include "fixtures.hpp"

#include <unistd.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace emtk::testing {

namespace fs = std::filesystem;

TempDir::TempDir(const std::string& tag) {
  static int counter = 0;
  path_ = fs::temp_directory_path() /
          ("emtk_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

const std::vector<std::string> kAffect = {"sad",   "fear",  "pain",    "death", "war",    "hate",
                                          "help",  "kill",  "suffer",  "angry", "afraid", "cry",
                                          "hurt",  "grief", "violent", "ugly"};
const std::vector<std::string> kFiller = {"the",    "people", "story",  "news", "family", "today",
                                          "really", "about",  "think",  "world", "article", "read",
                                          "those",  "kids",   "should", "donate"};
const std::vector<std::string> kExtras = {"It's", "can't", "I'm", "USA", "café", "2019", "we're", "a"};
const std::vector<std::string> kEmotions = {"sadness", "fear", "anger", "neutral", "joy"};

}  // namespace

std::string synthetic_corpus_tsv(std::size_t rows, std::uint64_t seed, const std::string& id_prefix) {
  std::mt19937_64 rng(seed);
  auto pick = [&](const std::vector<std::string>& v) { return v[rng() % v.size()]; };
  auto unit = [&]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  std::ostringstream out;
  out << "message_id\tessay\tgender\teducation\trace\tage\tincome\t"
         "personality_conscientiousness\tpersonality_openess\tpersonality_extraversion\t"
         "personality_agreeableness\tpersonality_stability\tiri_fantasy\tiri_perspective_taking\t"
         "iri_empathatic_concern\tiri_personal_distress\tempathy\tdistress\tempathy_bin\t"
         "distress_bin\temotion\n";
  for (std::size_t i = 0; i < rows; ++i) {
    std::string essay;
    const std::size_t words = 12 + rng() % 20;
    std::size_t affect = 0;
    for (std::size_t w = 0; w < words; ++w) {
      const auto roll = rng() % 10;
      std::string tok;
      if (roll < 3) {
        tok = pick(kAffect);
        ++affect;
      } else if (roll < 9) {
        tok = pick(kFiller);
      } else {
        tok = pick(kExtras);
      }
      essay += (w ? " " : "") + tok;
    }
    essay += ".";
    const double empathy = 1.0 + 6.0 * unit();
    const double distress = std::min(7.0, 1.0 + 0.2 * static_cast<double>(affect) + 4.0 * unit());
    // Round to sixths the way survey averages look.
    const double emp = std::round(empathy * 6.0) / 6.0;
    const double dis = std::round(distress * 6.0) / 6.0;
    out << id_prefix << i << "\t" << essay << "\t" << 1 + rng() % 3 << "\t" << 1 + rng() % 7 << "\t"
        << 1 + rng() % 6 << "\t" << 18 + rng() % 60 << "\t" << 10000 + 1000 * (rng() % 90);
    for (int k = 0; k < 9; ++k) out << "\t" << std::round((1.0 + 6.0 * unit()) * 10.0) / 10.0;
    out << "\t" << emp << "\t" << dis << "\t" << (emp >= 4.0 ? 1 : 0) << "\t" << (dis >= 4.0 ? 1 : 0)
        << "\t" << pick(kEmotions) << "\n";
  }
  return out.str();
}

void write_tiny_lexicons(const fs::path& dir) {
  fs::create_directories(dir / "empath");
  write_text(dir / "nrc_eil.tsv",
             "sad\tsadness\t0.844\ncry\tsadness\t0.7\ngrief\tsadness\t0.9\nfear\tfear\t0.95\n"
             "afraid\tfear\t0.8\nwar\tfear\t0.6\nkill\tanger\t0.75\nangry\tanger\t0.88\n"
             "hate\tanger\t0.82\nugly\tdisgust\t0.6\nviolent\tdisgust\t0.4\nhelp\tjoy\t0.3\n");
  write_text(dir / "nrc_vad.tsv",
             "Word\tValence\tArousal\tDominance\nsad\t0.225\t0.333\t0.149\nfear\t0.073\t0.84\t0.293\n"
             "war\t0.06\t0.9\t0.5\nhelp\t0.8\t0.4\t0.6\nkids\t0.9\t0.7\t0.4\npeople\t0.7\t0.3\t0.5\n");
  const std::vector<std::pair<std::string, std::string>> cats = {
      {"suffering", "suffer\npain\nhurt\ncry\n"},
      {"death", "death\nkill\ngrief\n"},
      {"torment", "pain\nhurt\nsuffer\n"},
      {"hate", "hate\nangry\n"},
      {"negative_emotion", "sad\nfear\nangry\nhate\nafraid\n"},
      {"sadness", "sad\ncry\ngrief\n"},
      {"aggression", "angry\nkill\nviolent\n"},
      {"fight", "war\nkill\n"},
      {"help", "help\ndonate\n"},
      {"pain", "pain\nhurt\n"},
      {"kill", "kill\ndeath\n"},
      {"horror", "fear\nafraid\n"},
      {"violence", "violent\nkill\nwar\n"},
      {"war", "war\n"},
      {"ugliness", "ugly\n"}};
  for (const auto& [name, words] : cats) write_text(dir / "empath" / (name + ".txt"), words);
}

std::vector<std::pair<std::string, std::string>> write_run_inputs(const fs::path& dir, Target target) {
  write_text(dir / "train.tsv", synthetic_corpus_tsv(48, 1, "tr"));
  write_text(dir / "dev.tsv", synthetic_corpus_tsv(16, 2, "dv"));
  write_text(dir / "test.tsv", synthetic_corpus_tsv(12, 3, "te"));
  write_tiny_lexicons(dir);
  return {{"target", std::string(to_string(target))},
          {"paths.train", (dir / "train.tsv").string()},
          {"paths.dev", (dir / "dev.tsv").string()},
          {"paths.test", (dir / "test.tsv").string()},
          {"paths.out_dir", (dir / "out").string()},
          {"paths.nrc_eil", (dir / "nrc_eil.tsv").string()},
          {"paths.nrc_vad", (dir / "nrc_vad.tsv").string()},
          {"paths.empath_dir", (dir / "empath").string()},
          {"embeddings.pseudo", "true"},
          {"embeddings.dim", "16"},
          {"train.epochs", "8"},
          {"train.batch_size", "16"}};
}

CategoricalVocab corpus_shaped_vocab() {
  CategoricalVocab v;
  v.features[0] = Vocab({"1", "2", "5"});
  v.features[1] = Vocab({"1", "2", "3", "4", "5", "6", "7"});
  v.features[2] = Vocab({"1", "2", "3", "4", "5", "6"});
  v.features[3] = Vocab({"AGE_LE25", "AGE_26_40", "AGE_41_60", "AGE_GE61"});
  return v;
}

ModelConfig shrunken_config(Target mode) {
  ModelConfig c;
  c.mode = mode;
  c.emb_dim = 8;
  c.shared_units = 6;
  c.task_units = 4;
  c.entity_dim = 3;
  c.cat_units1 = 5;
  c.cat_units2 = 4;
  c.score_units = 2;
  c.numeric_units = 5;
  c.nrc_units = 3;
  c.empath_units = 3;
  c.lexical_units = 4;
  c.fusion_units = 4;
  c.emotion_classes = 4;
  c.cat_vocab = {3, 4, 3, 5};
  if (mode == Target::Distress) c.lexical = FeatureSpec{{"fear", "sadness"}, {"pain", "war", "help"}};
  return c;
}

RandomBatch random_batch(const ModelConfig& c, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto unit = [&]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  const auto rows = static_cast<Eigen::Index>(n);
  RandomBatch r;
  r.batch.essay.resize(rows, static_cast<Eigen::Index>(c.emb_dim));
  r.batch.numeric.resize(rows, static_cast<Eigen::Index>(c.numeric_count()));
  r.batch.lexical.resize(rows, static_cast<Eigen::Index>(c.lexical.width()));
  for (auto* m : {&r.batch.essay, &r.batch.numeric, &r.batch.lexical}) {
    for (Eigen::Index i = 0; i < m->size(); ++i) m->data()[i] = 2.0 * unit() - 1.0;
  }
  for (std::size_t k = 0; k < kCategoricalCount; ++k) {
    for (std::size_t i = 0; i < n; ++i) r.batch.cats[k].push_back(rng() % c.cat_vocab[k]);
  }
  r.targets.score.resize(rows, 1);
  r.targets.bin.resize(rows, 1);
  for (Eigen::Index i = 0; i < rows; ++i) {
    r.targets.score(i, 0) = 1.0 + 6.0 * unit();
    r.targets.bin(i, 0) = r.targets.score(i, 0) >= 4.0 ? 1.0 : 0.0;
    r.targets.emotion.push_back(rng() % c.emotion_classes);
  }
  return r;
}

}  // namespace emtk::testing
