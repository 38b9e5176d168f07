#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace emtk {

using ExpansionMap = std::map<std::string, std::string>;

/// Text normalization settings. Contraction keys match case-insensitively
/// (an initial capital carries over to the expansion); acronym keys match
/// exactly.
class CleanConfig {
 public:
  static constexpr std::size_t kDefaultMaxLen = 200;

  CleanConfig() = default;
  /// Throws ConfigError when max_len is 0 or an expansion contains a key of
  /// either map.
  CleanConfig(ExpansionMap contractions, ExpansionMap acronyms,
              std::size_t max_len = kDefaultMaxLen, std::string pad_token = "<pad>");

  /// Loads the contraction and acronym lists shipped under data/.
  static CleanConfig defaults(std::size_t max_len = kDefaultMaxLen);

  const ExpansionMap& contractions() const { return contractions_; }
  const ExpansionMap& acronyms() const { return acronyms_; }
  std::size_t max_len() const { return max_len_; }
  const std::string& pad_token() const { return pad_token_; }

  /// Expansion for a token, or nullptr. Contractions are tried first.
  const std::string* lookup_contraction(std::string_view token) const;
  const std::string* lookup_acronym(std::string_view token) const;

 private:
  ExpansionMap contractions_;  // keys lowercased
  ExpansionMap acronyms_;
  std::size_t max_len_ = kDefaultMaxLen;
  std::string pad_token_ = "<pad>";
};

/// Reads key<TAB>value lines; blank lines and '#' comments are skipped.
ExpansionMap load_expansion_map(const std::filesystem::path& path);

/// Steps, in order: contraction expansion, acronym expansion, accent folding
/// to ASCII, punctuation/special characters to spaces, digit removal,
/// single-character token removal, whitespace collapse. Case is preserved.
/// Output contains only ASCII letter tokens of length >= 2 separated by
/// single spaces.
std::string clean_text(std::string_view raw, const CleanConfig& cfg);

/// Replaces accented Latin letters with ASCII equivalents. Invalid UTF-8
/// bytes and code points with no equivalent become a single space.
std::string fold_accents(std::string_view utf8);

struct TokenSeq {
  std::vector<std::string> tokens;  ///< always max_len entries
  std::size_t attention_length = 0;

  std::span<const std::string> real_tokens() const {
    return std::span<const std::string>(tokens).first(attention_length);
  }
};

/// Whitespace tokenization, truncation to max_len, right padding.
TokenSeq tokenize_and_pad(std::string_view cleaned, const CleanConfig& cfg);

}  // namespace emtk
