#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "novascore/http.hpp"

namespace novascore {

// A unit-norm, finite embedding. Construction normalizes.
class EmbeddingVector {
 public:
  EmbeddingVector() = default;

  // L2-normalizes `raw`. Throws Error(InvalidArgument) for empty, zero or
  // non-finite input.
  static EmbeddingVector normalized(std::vector<double> raw);

  // Adopts already-normalized values without rescaling, so stored vectors
  // reload bit-exact. Throws Error(InvalidArgument) if the norm is off by
  // more than 1e-9.
  static EmbeddingVector from_unit(std::vector<double> values);

  std::span<const double> values() const { return values_; }
  std::size_t dim() const { return values_.size(); }

  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;

 private:
  explicit EmbeddingVector(std::vector<double> values) : values_(std::move(values)) {}

  std::vector<double> values_;
};

// Sequential left-to-right dot product; every similarity in the library
// goes through this so that search results and oracles agree bit-for-bit.
double dot(std::span<const double> a, std::span<const double> b);

// Dot product of unit vectors clamped to [-1, 1]. Throws
// Error(DimensionMismatch).
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

enum class EmbedderKind { remote, deterministic_hash };

struct EmbedderConfig {
  EmbedderKind kind = EmbedderKind::deterministic_hash;
  std::optional<std::string> endpoint;
  std::optional<std::string> model_name;
  std::size_t dim = 256;
  std::size_t batch_size = 32;

  void validate() const;
};

class Embedder {
 public:
  virtual ~Embedder() = default;

  // One unit vector per text, in input order. Throws Error(InvalidArgument)
  // on an empty list or a blank text.
  std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) const;

  // 0 while unknown (remote embedders learn it from the first reply).
  virtual std::size_t dim() const = 0;

 protected:
  virtual std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) const = 0;
  virtual std::size_t batch_size() const = 0;
};

std::uint64_t fnv1a64(std::string_view bytes);

// ASCII-lowercased maximal runs of [0-9a-z] and non-ASCII bytes.
std::vector<std::string> hash_tokens(std::string_view text);

// Feature-hashing bag of words: each token's FNV-1a 64 hash mod dim picks a
// bucket, counts accumulate, the result is L2-normalized.
class HashEmbedder final : public Embedder {
 public:
  explicit HashEmbedder(std::size_t dim = 256, std::size_t batch_size = 32);

  std::size_t dim() const override { return dim_; }

 protected:
  std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) const override;
  std::size_t batch_size() const override { return batch_size_; }

 private:
  std::size_t dim_;
  std::size_t batch_size_;
};

// Client for an embeddings endpoint accepting {"model", "input"} and
// answering {"data": [{"embedding": [...]}, ...]}. Bearer auth comes from
// EMBED_API_KEY when set.
class RemoteEmbedder final : public Embedder {
 public:
  RemoteEmbedder(std::string endpoint, std::string model_name, std::size_t batch_size = 32,
                 HttpRetryPolicy retry = {});

  std::size_t dim() const override;

 protected:
  std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) const override;
  std::size_t batch_size() const override { return batch_size_; }

 private:
  std::string endpoint_;
  std::string model_name_;
  std::size_t batch_size_;
  HttpRetryPolicy retry_;
  mutable std::size_t dim_ = 0;
  mutable std::mutex dim_mu_;
};

std::unique_ptr<Embedder> make_embedder(const EmbedderConfig& cfg);

}  // namespace novascore
