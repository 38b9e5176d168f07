#include "emtk/preprocess.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "emtk/error.hpp"
#include "text_util.hpp"

namespace emtk {
namespace {

bool is_ascii_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Curly apostrophes (U+2018, U+2019) become ASCII so both spellings of a
// contraction share one key.
std::string normalize_apostrophes(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i + 2 < s.size() && s[i] == '\xE2' && s[i + 1] == '\x80' &&
        (s[i + 2] == '\x98' || s[i + 2] == '\x99')) {
      out.push_back('\'');
      i += 2;
    } else {
      out.push_back(s[i]);
    }
  }
  return out;
}

struct TokenParts {
  std::string_view prefix;
  std::string_view core;
  std::string_view suffix;
};

template <typename Keep>
TokenParts split_token(std::string_view token, Keep keep) {
  std::size_t b = 0;
  while (b < token.size() && !keep(token[b])) ++b;
  std::size_t e = token.size();
  while (e > b && !keep(token[e - 1])) --e;
  return {token.substr(0, b), token.substr(b, e - b), token.substr(e)};
}

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (t.empty()) continue;
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

std::string expand_contractions(std::string_view text, const CleanConfig& cfg) {
  auto tokens = detail::split_whitespace(text);
  for (auto& tok : tokens) {
    const std::string norm = normalize_apostrophes(tok);
    const auto parts = split_token(norm, [](char c) { return is_ascii_alnum(c) || c == '\''; });
    if (parts.core.empty()) continue;
    const std::string* exp = cfg.lookup_contraction(parts.core);
    if (!exp) continue;
    std::string replaced(*exp);
    if (!replaced.empty() && std::isupper(static_cast<unsigned char>(parts.core.front()))) {
      replaced[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(replaced[0])));
    }
    tok = std::string(parts.prefix) + replaced + std::string(parts.suffix);
  }
  return join(tokens);
}

std::string expand_acronyms(std::string_view text, const CleanConfig& cfg) {
  auto tokens = detail::split_whitespace(text);
  for (auto& tok : tokens) {
    if (const std::string* exp = cfg.lookup_acronym(tok)) {
      tok = *exp;
      continue;
    }
    const auto parts = split_token(tok, is_ascii_alnum);
    if (parts.core.empty()) continue;
    if (const std::string* exp = cfg.lookup_acronym(parts.core)) {
      tok = std::string(parts.prefix) + *exp + std::string(parts.suffix);
    }
  }
  return join(tokens);
}

// Steps 3 to 7 of the pipeline.
std::vector<std::string> scrub(std::string_view text) {
  std::string folded = fold_accents(text);
  std::string kept;
  kept.reserve(folded.size());
  for (char c : folded) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isdigit(u)) continue;
    kept.push_back(std::isalpha(u) ? c : ' ');
  }
  auto tokens = detail::split_whitespace(kept);
  std::erase_if(tokens, [](const std::string& t) { return t.size() < 2; });
  return tokens;
}

}  // namespace

CleanConfig::CleanConfig(ExpansionMap contractions, ExpansionMap acronyms, std::size_t max_len,
                         std::string pad_token)
    : acronyms_(std::move(acronyms)), max_len_(max_len), pad_token_(std::move(pad_token)) {
  if (max_len_ == 0) throw ConfigError("max_len must be at least 1");
  for (auto& [k, v] : contractions) contractions_[to_lower_ascii(normalize_apostrophes(k))] = v;

  auto check = [&](const std::string& key, const std::string& value) {
    std::vector<std::string> probe = detail::split_whitespace(value);
    for (auto& t : scrub(value)) probe.push_back(std::move(t));
    for (const auto& t : probe) {
      const auto core = split_token(t, [](char c) { return is_ascii_alnum(c) || c == '\''; }).core;
      if (lookup_contraction(t) || lookup_acronym(t) || lookup_contraction(core) ||
          lookup_acronym(core)) {
        throw ConfigError("expansion of '" + key + "' contains the map key '" + t + "'");
      }
    }
  };
  for (const auto& [k, v] : contractions_) check(k, v);
  for (const auto& [k, v] : acronyms_) check(k, v);
}

CleanConfig CleanConfig::defaults(std::size_t max_len) {
  const std::filesystem::path dir = EMTK_DATA_DIR;
  return CleanConfig(load_expansion_map(dir / "contractions.tsv"),
                     load_expansion_map(dir / "acronyms.tsv"), max_len);
}

const std::string* CleanConfig::lookup_contraction(std::string_view token) const {
  auto it = contractions_.find(to_lower_ascii(token));
  return it == contractions_.end() ? nullptr : &it->second;
}

const std::string* CleanConfig::lookup_acronym(std::string_view token) const {
  auto it = acronyms_.find(std::string(token));
  return it == acronyms_.end() ? nullptr : &it->second;
}

ExpansionMap load_expansion_map(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open expansion map " + path.string());
  ExpansionMap map;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    detail::strip_cr(line);
    const auto t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": expected key<TAB>value");
    }
    map[std::string(detail::trim(std::string_view(line).substr(0, tab)))] =
        std::string(detail::trim(std::string_view(line).substr(tab + 1)));
  }
  return map;
}

std::string clean_text(std::string_view raw, const CleanConfig& cfg) {
  std::string text = expand_contractions(raw, cfg);
  text = expand_acronyms(text, cfg);
  auto tokens = scrub(text);

  // Scrubbing can expose a key that was glued to punctuation or digits
  // ("x/USA", "USA2"); expanding it here keeps the function idempotent.
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (auto& t : tokens) {
    const std::string* exp = cfg.lookup_contraction(t);
    if (!exp) exp = cfg.lookup_acronym(t);
    if (!exp) {
      out.push_back(std::move(t));
      continue;
    }
    for (auto& e : scrub(*exp)) out.push_back(std::move(e));
  }
  return join(out);
}

TokenSeq tokenize_and_pad(std::string_view cleaned, const CleanConfig& cfg) {
  TokenSeq seq;
  seq.tokens = detail::split_whitespace(cleaned);
  if (seq.tokens.size() > cfg.max_len()) seq.tokens.resize(cfg.max_len());
  seq.attention_length = seq.tokens.size();
  seq.tokens.resize(cfg.max_len(), cfg.pad_token());
  return seq;
}

}  // namespace emtk
