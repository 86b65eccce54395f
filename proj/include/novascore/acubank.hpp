#pragma once

// Cluster-partitioned store of historical ACUs with exact thresholded
// top-k cosine retrieval over a flat, contiguous vector array.

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "novascore/embedding.hpp"

namespace novascore {

struct AcuRecord {
  std::string acu_id;
  std::string doc_id;
  std::string cluster_id;
  std::string text;
  EmbeddingVector vector;
  std::uint64_t inserted_seq = 0;
};

// A record as handed to insert(); the bank assigns cluster and sequence.
struct NewAcuRecord {
  std::string acu_id;
  std::string doc_id;
  std::string text;
  EmbeddingVector vector;
};

struct RetrievalHit {
  AcuRecord record;
  double similarity = 0.0;
};

struct BankManifest {
  int format_version = 0;
  std::size_t dim = 0;
  std::map<std::string, std::size_t> databases;
};

struct SearchOptions {
  std::size_t k = 5;
  double min_sim = 0.6;
  // Records from this document are never returned.
  std::optional<std::string> exclude_doc_id;
};

class AcuBank {
 public:
  static constexpr int kFormatVersion = 1;
  static constexpr std::string_view kManifestName = "manifest.json";

  // dim == 0 lets the first insert fix the dimension. In strict mode,
  // searching a cluster that was never created throws UnknownCluster; in
  // lenient mode it returns no hits.
  explicit AcuBank(std::size_t dim = 0, bool strict = false);
  AcuBank(AcuBank&& other) noexcept;
  AcuBank& operator=(AcuBank&&) = delete;
  AcuBank(const AcuBank&) = delete;
  AcuBank& operator=(const AcuBank&) = delete;
  ~AcuBank();

  std::size_t dim() const { return dim_.load(); }
  bool strict() const { return strict_; }

  void create_cluster(const std::string& cluster_id);
  bool has_cluster(const std::string& cluster_id) const;
  std::vector<std::string> clusters() const;
  std::size_t size(const std::string& cluster_id) const;
  bool contains_doc(const std::string& cluster_id, const std::string& doc_id) const;

  // Appends records with fresh sequence numbers, creating the cluster if
  // needed. All-or-nothing: throws DimensionMismatch or DuplicateAcuId
  // before anything is written.
  std::size_t insert(const std::string& cluster_id, std::vector<NewAcuRecord> records);

  // Hits with similarity >= min_sim, at most k, by similarity descending and
  // then insertion order ascending.
  std::vector<RetrievalHit> search_top_k(const std::string& cluster_id,
                                         const EmbeddingVector& query,
                                         const SearchOptions& options = {}) const;

  // Every record of a cluster in insertion order.
  std::vector<AcuRecord> records(const std::string& cluster_id) const;

  BankManifest manifest() const;

  // Writes manifest.json plus one <cluster>.acus.jsonl per database.
  BankManifest persist(const std::filesystem::path& dir) const;
  static AcuBank load(const std::filesystem::path& dir, bool strict = false);

 private:
  struct Database;

  Database* find(const std::string& cluster_id) const;
  Database& find_or_create(const std::string& cluster_id);

  mutable std::mutex mu_;
  std::map<std::string, std::unique_ptr<Database>> databases_;
  std::atomic<std::size_t> dim_;
  bool strict_;
};

// File name used for a cluster database; characters outside
// [A-Za-z0-9._-] are percent-encoded.
std::string cluster_file_name(std::string_view cluster_id);

struct BenchRow {
  std::size_t size = 0;
  double mean_seconds = 0.0;
  double p95_seconds = 0.0;
};

// Times search_top_k on seeded synthetic banks of each size (single
// database, k=5, min_sim=0.6) over n_queries warm queries.
std::vector<BenchRow> bench_search(const std::vector<std::size_t>& bank_sizes, std::size_t dim,
                                   std::size_t n_queries, std::uint64_t seed = 42);

}  // namespace novascore
