#include "novascore/embedding.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "novascore/error.hpp"

namespace novascore {

namespace {

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

double l2_norm(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

bool is_token_byte(unsigned char c) { return std::isalnum(c) != 0 || c >= 0x80; }

}  // namespace

EmbeddingVector EmbeddingVector::normalized(std::vector<double> raw) {
  if (raw.empty()) throw Error(ErrorCode::InvalidArgument, "embedding has zero dimensions");
  for (double x : raw) {
    if (!std::isfinite(x)) throw Error(ErrorCode::InvalidArgument, "embedding has non-finite entry");
  }
  double norm = l2_norm(raw);
  if (norm == 0.0) throw Error(ErrorCode::InvalidArgument, "cannot normalize an all-zero embedding");
  for (double& x : raw) x /= norm;
  return EmbeddingVector(std::move(raw));
}

EmbeddingVector EmbeddingVector::from_unit(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "embedding has zero dimensions");
  for (double x : values) {
    if (!std::isfinite(x)) throw Error(ErrorCode::InvalidArgument, "embedding has non-finite entry");
  }
  double norm = l2_norm(values);
  if (std::abs(norm - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidArgument, "embedding is not unit-norm (norm " +
                                                std::to_string(norm) + ")");
  }
  return EmbeddingVector(std::move(values));
}

double dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "cosine of dim " + std::to_string(a.dim()) +
                                                  " and dim " + std::to_string(b.dim()));
  }
  return std::clamp(dot(a.values(), b.values()), -1.0, 1.0);
}

void EmbedderConfig::validate() const {
  if (batch_size == 0) throw Error(ErrorCode::InvalidArgument, "embedder batch_size must be >= 1");
  if (kind == EmbedderKind::remote && (!endpoint || endpoint->empty())) {
    throw Error(ErrorCode::InvalidArgument, "remote embedder requires an endpoint");
  }
  if (kind == EmbedderKind::deterministic_hash && dim == 0) {
    throw Error(ErrorCode::InvalidArgument, "deterministic embedder requires dim >= 1");
  }
}

std::vector<EmbeddingVector> Embedder::embed(const std::vector<std::string>& texts) const {
  if (texts.empty()) throw Error(ErrorCode::InvalidArgument, "embed called with no texts");
  for (const auto& t : texts) {
    if (is_blank(t)) throw Error(ErrorCode::InvalidArgument, "cannot embed blank text");
  }
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  const std::size_t step = std::max<std::size_t>(1, batch_size());
  for (std::size_t start = 0; start < texts.size(); start += step) {
    std::size_t end = std::min(texts.size(), start + step);
    std::vector<std::string> batch(texts.begin() + static_cast<std::ptrdiff_t>(start),
                                   texts.begin() + static_cast<std::ptrdiff_t>(end));
    auto vectors = embed_batch(batch);
    if (vectors.size() != batch.size()) {
      throw Error(ErrorCode::BackendUnavailable, "embedder returned " +
                                                     std::to_string(vectors.size()) +
                                                     " vectors for " + std::to_string(batch.size()) +
                                                     " inputs");
    }
    for (auto& v : vectors) out.push_back(std::move(v));
  }
  return out;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

std::vector<std::string> hash_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : text) {
    if (is_token_byte(c)) {
      current.push_back(static_cast<char>(c < 0x80 ? std::tolower(c) : c));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

HashEmbedder::HashEmbedder(std::size_t dim, std::size_t batch_size)
    : dim_(dim), batch_size_(batch_size) {
  if (dim_ == 0) throw Error(ErrorCode::InvalidArgument, "HashEmbedder dim must be >= 1");
  if (batch_size_ == 0) throw Error(ErrorCode::InvalidArgument, "HashEmbedder batch_size must be >= 1");
}

std::vector<EmbeddingVector> HashEmbedder::embed_batch(const std::vector<std::string>& texts) const {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& text : texts) {
    std::vector<double> counts(dim_, 0.0);
    auto tokens = hash_tokens(text);
    if (tokens.empty()) {
      throw Error(ErrorCode::InvalidArgument, "text '" + text + "' has no hashable tokens");
    }
    for (const auto& tok : tokens) counts[fnv1a64(tok) % dim_] += 1.0;
    out.push_back(EmbeddingVector::normalized(std::move(counts)));
  }
  return out;
}

RemoteEmbedder::RemoteEmbedder(std::string endpoint, std::string model_name,
                               std::size_t batch_size, HttpRetryPolicy retry)
    : endpoint_(std::move(endpoint)),
      model_name_(std::move(model_name)),
      batch_size_(batch_size),
      retry_(retry) {
  if (batch_size_ == 0) throw Error(ErrorCode::InvalidArgument, "batch_size must be >= 1");
}

std::size_t RemoteEmbedder::dim() const {
  std::lock_guard lock(dim_mu_);
  return dim_;
}

std::vector<EmbeddingVector> RemoteEmbedder::embed_batch(const std::vector<std::string>& texts) const {
  nlohmann::json body = {{"model", model_name_}, {"input", texts}};
  auto reply = post_json(endpoint_, body, env_secret("EMBED_API_KEY"), retry_, "embedding endpoint");
  if (!reply.contains("data") || !reply["data"].is_array()) {
    throw Error(ErrorCode::BackendUnavailable, "embedding reply lacks a data array");
  }
  std::vector<EmbeddingVector> out;
  for (const auto& item : reply["data"]) {
    if (!item.contains("embedding") || !item["embedding"].is_array()) {
      throw Error(ErrorCode::BackendUnavailable, "embedding reply item lacks an embedding array");
    }
    auto raw = item["embedding"].get<std::vector<double>>();
    {
      std::lock_guard lock(dim_mu_);
      if (dim_ == 0) dim_ = raw.size();
      if (raw.size() != dim_) {
        throw Error(ErrorCode::DimensionMismatch, "embedding endpoint returned dim " +
                                                      std::to_string(raw.size()) + ", expected " +
                                                      std::to_string(dim_));
      }
    }
    out.push_back(EmbeddingVector::normalized(std::move(raw)));
  }
  return out;
}

std::unique_ptr<Embedder> make_embedder(const EmbedderConfig& cfg) {
  cfg.validate();
  if (cfg.kind == EmbedderKind::remote) {
    return std::make_unique<RemoteEmbedder>(*cfg.endpoint, cfg.model_name.value_or(""),
                                            cfg.batch_size);
  }
  return std::make_unique<HashEmbedder>(cfg.dim, cfg.batch_size);
}

}  // namespace novascore
