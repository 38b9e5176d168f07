#include "emtk/embedding.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "binary_io.hpp"
#include "emtk/error.hpp"

namespace emtk {

namespace detail {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ConfigError("write failed for " + path);
}

}  // namespace detail

Eigen::VectorXd mean_pool(const std::vector<Eigen::VectorXd>& token_vectors) {
  if (token_vectors.empty()) throw DomainError("mean_pool: empty token list");
  const auto d = token_vectors.front().size();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(d);
  for (const auto& v : token_vectors) {
    if (v.size() != d) throw DomainError("mean_pool: ragged token vector dimensions");
    sum += v;
  }
  return sum / static_cast<double>(token_vectors.size());
}

EmbeddingStore::EmbeddingStore(std::size_t dim, EmbeddingSource source)
    : dim_(dim), source_(source) {
  if (dim == 0) throw DomainError("embedding dim must be at least 1");
}

void EmbeddingStore::add(const std::string& id, const Eigen::VectorXf& vec) {
  if (static_cast<std::size_t>(vec.size()) != dim_) {
    throw DomainError("embedding for '" + id + "' has dim " + std::to_string(vec.size()) +
                      ", store dim is " + std::to_string(dim_));
  }
  if (!vec.allFinite()) throw DomainError("embedding for '" + id + "' is not finite");
  if (!index_.emplace(id, ids_.size()).second) {
    throw DomainError("duplicate embedding id '" + id + "'");
  }
  ids_.push_back(id);
  rows_.push_back(vec);
}

const Eigen::VectorXf& EmbeddingStore::at(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) throw DataError("no embedding for id '" + std::string(id) + "'");
  return rows_[it->second];
}

std::string serialize_store(const EmbeddingStore& store) {
  std::string out = "EMB1";
  detail::put_u32(out, EmbeddingStore::kVersion);
  detail::put_u32(out, static_cast<std::uint32_t>(store.size()));
  detail::put_u32(out, static_cast<std::uint32_t>(store.dim()));
  const std::string ids = nlohmann::json(store.ids()).dump();
  detail::put_u32(out, static_cast<std::uint32_t>(ids.size()));
  out += ids;
  out.reserve(out.size() + store.size() * store.dim() * 4);
  for (std::size_t i = 0; i < store.size(); ++i) {
    for (float v : store.row(i)) detail::put_f32(out, v);
  }
  return out;
}

void write_store(const EmbeddingStore& store, const std::filesystem::path& path) {
  detail::write_file(path.string(), serialize_store(store));
}

EmbeddingStore parse_store(std::string_view bytes) {
  detail::Reader r(bytes, "EMB1");
  if (r.take(4, "magic") != "EMB1") r.fail("bad magic", 0);
  const auto version = r.u32("version");
  if (version != EmbeddingStore::kVersion) {
    r.fail("unsupported version " + std::to_string(version), 4);
  }
  const auto count = r.u32("count");
  const std::size_t dim_at = r.offset();
  const auto dim = r.u32("dim");
  if (dim == 0) r.fail("dim is 0", dim_at);
  const auto json_len = r.u32("id list length");
  const std::size_t json_at = r.offset();
  const auto json_text = r.take(json_len, "id list");
  nlohmann::json ids;
  try {
    ids = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception&) {
    r.fail("id list is not valid JSON", json_at);
  }
  if (!ids.is_array() || ids.size() != count) {
    r.fail("id list is not an array of " + std::to_string(count) + " entries", json_at);
  }
  EmbeddingStore store(dim);
  Eigen::VectorXf row(dim);
  for (std::size_t i = 0; i < count; ++i) {
    if (!ids[i].is_string()) r.fail("id " + std::to_string(i) + " is not a string", json_at);
    const std::size_t row_at = r.offset();
    for (std::uint32_t j = 0; j < dim; ++j) row(j) = r.f32("vector row");
    try {
      store.add(ids[i].get<std::string>(), row);
    } catch (const DomainError& e) {
      r.fail(e.what(), row_at);
    }
  }
  if (r.remaining() != 0) r.fail("trailing bytes after last row", r.offset());
  return store;
}

EmbeddingStore read_store(const std::filesystem::path& path) {
  return parse_store(detail::read_file(path.string()));
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

Eigen::VectorXf pseudo_embed(std::string_view cleaned_text, std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw DomainError("pseudo_embed: dim must be at least 1");
  std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a
  for (unsigned char c : cleaned_text) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  std::uint64_t state = h ^ splitmix64(seed);
  Eigen::VectorXf out(static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < dim; ++i) {
    const double u = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;  // [0, 1)
    out(static_cast<Eigen::Index>(i)) = static_cast<float>(2.0 * u - 1.0);
  }
  return out;
}

}  // namespace emtk
