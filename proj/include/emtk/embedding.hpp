#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace emtk {

/// Elementwise mean of equally sized vectors. Throws DomainError on an empty
/// list or ragged dimensions.
Eigen::VectorXd mean_pool(const std::vector<Eigen::VectorXd>& token_vectors);

enum class EmbeddingSource { Encoder, Pseudo };

/// Essay vectors keyed by id, stored at 32-bit precision.
class EmbeddingStore {
 public:
  static constexpr std::uint32_t kVersion = 1;

  EmbeddingStore() = default;
  explicit EmbeddingStore(std::size_t dim, EmbeddingSource source = EmbeddingSource::Encoder);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return ids_.size(); }
  EmbeddingSource source() const { return source_; }
  void set_source(EmbeddingSource s) { source_ = s; }

  /// Throws DomainError on a duplicate id, wrong length or non-finite value.
  void add(const std::string& id, const Eigen::VectorXf& vec);
  bool contains(std::string_view id) const { return index_.contains(std::string(id)); }
  /// Throws DataError when the id is absent.
  const Eigen::VectorXf& at(std::string_view id) const;
  /// Insertion order.
  const std::vector<std::string>& ids() const { return ids_; }
  const Eigen::VectorXf& row(std::size_t i) const { return rows_[i]; }

 private:
  std::size_t dim_ = 0;
  EmbeddingSource source_ = EmbeddingSource::Encoder;
  std::vector<std::string> ids_;
  std::vector<Eigen::VectorXf> rows_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// EMB1 layout: "EMB1", u32 version, u32 count, u32 dim, u32 JSON byte length,
/// JSON array of ids, then count*dim little-endian float32 in id order.
/// The source tag is not part of the format; read stores report Encoder.
void write_store(const EmbeddingStore& store, const std::filesystem::path& path);
EmbeddingStore read_store(const std::filesystem::path& path);
/// Parses an in-memory EMB1 image (FormatError offsets refer to it).
EmbeddingStore parse_store(std::string_view bytes);
std::string serialize_store(const EmbeddingStore& store);

/// Deterministic stand-in for the frozen encoder: hash of (text, seed) seeds
/// a splitmix64 stream; components lie in [-1, 1].
Eigen::VectorXf pseudo_embed(std::string_view cleaned_text, std::size_t dim, std::uint64_t seed);

}  // namespace emtk
