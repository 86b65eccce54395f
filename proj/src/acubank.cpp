#include "novascore/acubank.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "novascore/error.hpp"

namespace novascore {

namespace fs = std::filesystem;

struct AcuBank::Database {
  struct Meta {
    std::string acu_id;
    std::string doc_id;
    std::string text;
    std::uint64_t seq = 0;
  };

  mutable std::shared_mutex mu;
  std::vector<double> vectors;  // row-major, one row of dim per record
  std::vector<Meta> meta;
  std::unordered_set<std::string> acu_ids;
  std::unordered_map<std::string, std::size_t> doc_counts;
  std::uint64_t next_seq = 0;
};

AcuBank::AcuBank(std::size_t dim, bool strict) : dim_(dim), strict_(strict) {}

AcuBank::AcuBank(AcuBank&& other) noexcept : dim_(other.dim_.load()), strict_(other.strict_) {
  std::lock_guard lock(other.mu_);
  databases_ = std::move(other.databases_);
}

AcuBank::~AcuBank() = default;

AcuBank::Database* AcuBank::find(const std::string& cluster_id) const {
  std::lock_guard lock(mu_);
  auto it = databases_.find(cluster_id);
  return it == databases_.end() ? nullptr : it->second.get();
}

AcuBank::Database& AcuBank::find_or_create(const std::string& cluster_id) {
  std::lock_guard lock(mu_);
  auto& slot = databases_[cluster_id];
  if (!slot) slot = std::make_unique<Database>();
  return *slot;
}

void AcuBank::create_cluster(const std::string& cluster_id) { find_or_create(cluster_id); }

bool AcuBank::has_cluster(const std::string& cluster_id) const { return find(cluster_id) != nullptr; }

std::vector<std::string> AcuBank::clusters() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (const auto& [id, db] : databases_) out.push_back(id);
  return out;
}

std::size_t AcuBank::size(const std::string& cluster_id) const {
  auto* db = find(cluster_id);
  if (db == nullptr) return 0;
  std::shared_lock lock(db->mu);
  return db->meta.size();
}

bool AcuBank::contains_doc(const std::string& cluster_id, const std::string& doc_id) const {
  auto* db = find(cluster_id);
  if (db == nullptr) return false;
  std::shared_lock lock(db->mu);
  return db->doc_counts.count(doc_id) != 0;
}

std::size_t AcuBank::insert(const std::string& cluster_id, std::vector<NewAcuRecord> records) {
  if (records.empty()) {
    create_cluster(cluster_id);
    return 0;
  }
  {
    // Fix the bank dimension on first use.
    std::size_t expected = 0;
    dim_.compare_exchange_strong(expected, records.front().vector.dim());
  }
  const std::size_t d = dim_.load();
  std::unordered_set<std::string> batch_ids;
  for (const auto& r : records) {
    if (r.vector.dim() != d) {
      throw Error(ErrorCode::DimensionMismatch, "record '" + r.acu_id + "' has dim " +
                                                    std::to_string(r.vector.dim()) +
                                                    ", bank dim is " + std::to_string(d));
    }
    if (!batch_ids.insert(r.acu_id).second) {
      throw Error(ErrorCode::DuplicateAcuId, "acu_id '" + r.acu_id + "' repeated in one insert");
    }
  }

  Database& db = find_or_create(cluster_id);
  std::unique_lock lock(db.mu);
  for (const auto& r : records) {
    if (db.acu_ids.count(r.acu_id) != 0) {
      throw Error(ErrorCode::DuplicateAcuId,
                  "acu_id '" + r.acu_id + "' already in cluster '" + cluster_id + "'");
    }
  }
  db.vectors.reserve(db.vectors.size() + records.size() * d);
  for (auto& r : records) {
    auto v = r.vector.values();
    db.vectors.insert(db.vectors.end(), v.begin(), v.end());
    db.acu_ids.insert(r.acu_id);
    ++db.doc_counts[r.doc_id];
    db.meta.push_back({std::move(r.acu_id), std::move(r.doc_id), std::move(r.text), db.next_seq++});
  }
  return records.size();
}

std::vector<RetrievalHit> AcuBank::search_top_k(const std::string& cluster_id,
                                                const EmbeddingVector& query,
                                                const SearchOptions& options) const {
  if (options.k == 0) throw Error(ErrorCode::InvalidArgument, "search k must be >= 1");
  auto* db = find(cluster_id);
  if (db == nullptr) {
    if (strict_) throw Error(ErrorCode::UnknownCluster, "no database for cluster '" + cluster_id + "'");
    return {};
  }
  std::shared_lock lock(db->mu);
  const std::size_t n = db->meta.size();
  if (n == 0) return {};
  const std::size_t d = dim_.load();
  if (query.dim() != d) {
    throw Error(ErrorCode::DimensionMismatch, "query dim " + std::to_string(query.dim()) +
                                                  " vs bank dim " + std::to_string(d));
  }

  struct Candidate {
    std::size_t row;
    double similarity;
  };
  std::vector<Candidate> candidates;
  const auto q = query.values();
  const double* base = db->vectors.data();
  for (std::size_t row = 0; row < n; ++row) {
    double sim = std::clamp(dot(q, std::span<const double>(base + row * d, d)), -1.0, 1.0);
    if (sim < options.min_sim) continue;
    if (options.exclude_doc_id && db->meta[row].doc_id == *options.exclude_doc_id) continue;
    candidates.push_back({row, sim});
  }
  // Rows are stored in sequence order, so row order is the tie-break.
  auto better = [](const Candidate& a, const Candidate& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.row < b.row;
  };
  const std::size_t take = std::min(options.k, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take),
                    candidates.end(), better);

  std::vector<RetrievalHit> hits;
  hits.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    const auto& c = candidates[i];
    const auto& m = db->meta[c.row];
    std::vector<double> values(base + c.row * d, base + (c.row + 1) * d);
    hits.push_back({AcuRecord{m.acu_id, m.doc_id, cluster_id, m.text,
                              EmbeddingVector::from_unit(std::move(values)), m.seq},
                    c.similarity});
  }
  return hits;
}

std::vector<AcuRecord> AcuBank::records(const std::string& cluster_id) const {
  auto* db = find(cluster_id);
  if (db == nullptr) return {};
  std::shared_lock lock(db->mu);
  const std::size_t d = dim_.load();
  std::vector<AcuRecord> out;
  out.reserve(db->meta.size());
  for (std::size_t row = 0; row < db->meta.size(); ++row) {
    const auto& m = db->meta[row];
    std::vector<double> values(db->vectors.begin() + static_cast<std::ptrdiff_t>(row * d),
                               db->vectors.begin() + static_cast<std::ptrdiff_t>((row + 1) * d));
    out.push_back({m.acu_id, m.doc_id, cluster_id, m.text,
                   EmbeddingVector::from_unit(std::move(values)), m.seq});
  }
  return out;
}

BankManifest AcuBank::manifest() const {
  BankManifest m;
  m.format_version = kFormatVersion;
  m.dim = dim_.load();
  std::lock_guard lock(mu_);
  for (const auto& [id, db] : databases_) {
    std::shared_lock db_lock(db->mu);
    m.databases[id] = db->meta.size();
  }
  return m;
}

std::string cluster_file_name(std::string_view cluster_id) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : cluster_id) {
    if (std::isalnum(c) || c == '.' || c == '_' || c == '-') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 0xF]);
    }
  }
  // Keep "." and ".." from naming directories.
  if (out.empty() || out == "." || out == "..") out = "%" + out;
  return out + ".acus.jsonl";
}

namespace {

void write_file_atomically(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw Error(ErrorCode::IoError, "short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot rename " + tmp.string() + ": " + ec.message());
}

[[noreturn]] void corrupt(const fs::path& file, std::size_t line, const std::string& why) {
  throw Error(ErrorCode::CorruptRecord, file.string() + ":" + std::to_string(line) + ": " + why);
}

}  // namespace

BankManifest AcuBank::persist(const fs::path& dir) const {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());

  BankManifest manifest;
  manifest.format_version = kFormatVersion;
  manifest.dim = dim_.load();
  std::lock_guard lock(mu_);
  for (const auto& [id, db] : databases_) {
    std::shared_lock db_lock(db->mu);
    std::ostringstream body;
    const std::size_t d = manifest.dim;
    for (std::size_t row = 0; row < db->meta.size(); ++row) {
      const auto& m = db->meta[row];
      nlohmann::ordered_json line;
      line["acu_id"] = m.acu_id;
      line["doc_id"] = m.doc_id;
      line["text"] = m.text;
      line["seq"] = m.seq;
      line["vector"] = std::vector<double>(
          db->vectors.begin() + static_cast<std::ptrdiff_t>(row * d),
          db->vectors.begin() + static_cast<std::ptrdiff_t>((row + 1) * d));
      body << line.dump() << '\n';
    }
    write_file_atomically(dir / cluster_file_name(id), body.str());
    manifest.databases[id] = db->meta.size();
  }

  nlohmann::ordered_json mj;
  mj["format_version"] = manifest.format_version;
  mj["dim"] = manifest.dim;
  mj["databases"] = nlohmann::ordered_json::object();
  for (const auto& [id, count] : manifest.databases) mj["databases"][id] = count;
  write_file_atomically(dir / kManifestName, mj.dump(2) + "\n");
  return manifest;
}

AcuBank AcuBank::load(const fs::path& dir, bool strict) {
  const fs::path manifest_path = dir / kManifestName;
  std::ifstream mf(manifest_path);
  if (!mf) {
    throw Error(ErrorCode::UnsupportedVersion, "missing manifest " + manifest_path.string());
  }
  nlohmann::json mj;
  try {
    mj = nlohmann::json::parse(mf);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::CorruptRecord, manifest_path.string() + ": " + e.what());
  }
  if (!mj.contains("format_version") || !mj["format_version"].is_number_integer() ||
      mj["format_version"].get<int>() != kFormatVersion) {
    throw Error(ErrorCode::UnsupportedVersion,
                manifest_path.string() + ": unsupported format_version " +
                    (mj.contains("format_version") ? mj["format_version"].dump() : "<absent>"));
  }
  if (!mj.contains("dim") || !mj["dim"].is_number_unsigned() || !mj.contains("databases") ||
      !mj["databases"].is_object()) {
    throw Error(ErrorCode::CorruptRecord, manifest_path.string() + ": missing dim or databases");
  }
  const std::size_t d = mj["dim"].get<std::size_t>();
  AcuBank bank(d, strict);
  for (const auto& [cluster_id, count_json] : mj["databases"].items()) {
    const fs::path file = dir / cluster_file_name(cluster_id);
    std::ifstream in(file);
    if (!in) throw Error(ErrorCode::CorruptRecord, "missing database file " + file.string());
    Database& db = bank.find_or_create(cluster_id);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
      ++line_no;
      if (raw.empty()) continue;
      nlohmann::json rec;
      try {
        rec = nlohmann::json::parse(raw);
      } catch (const nlohmann::json::exception& e) {
        corrupt(file, line_no, e.what());
      }
      for (const char* key : {"acu_id", "doc_id", "text"}) {
        if (!rec.contains(key) || !rec[key].is_string()) {
          corrupt(file, line_no, std::string("field '") + key + "' missing or not a string");
        }
      }
      if (!rec.contains("seq") || !rec["seq"].is_number_unsigned()) {
        corrupt(file, line_no, "field 'seq' missing or not an unsigned integer");
      }
      if (!rec.contains("vector") || !rec["vector"].is_array()) {
        corrupt(file, line_no, "field 'vector' missing or not an array");
      }
      const auto& vec = rec["vector"];
      if (vec.size() != d) {
        corrupt(file, line_no, "vector has " + std::to_string(vec.size()) +
                                   " values, manifest dim is " + std::to_string(d));
      }
      std::vector<double> values;
      values.reserve(d);
      for (const auto& x : vec) {
        if (!x.is_number()) corrupt(file, line_no, "vector holds a non-number");
        values.push_back(x.get<double>());
      }
      try {
        (void)EmbeddingVector::from_unit(values);
      } catch (const Error& e) {
        corrupt(file, line_no, e.what());
      }
      auto seq = rec["seq"].get<std::uint64_t>();
      if (!db.meta.empty() && seq <= db.meta.back().seq) {
        corrupt(file, line_no, "seq is not strictly increasing");
      }
      auto acu_id = rec["acu_id"].get<std::string>();
      if (!db.acu_ids.insert(acu_id).second) corrupt(file, line_no, "duplicate acu_id " + acu_id);
      auto doc_id = rec["doc_id"].get<std::string>();
      ++db.doc_counts[doc_id];
      db.vectors.insert(db.vectors.end(), values.begin(), values.end());
      db.meta.push_back({std::move(acu_id), std::move(doc_id), rec["text"].get<std::string>(), seq});
      db.next_seq = seq + 1;
    }
    if (!count_json.is_number_unsigned() || count_json.get<std::size_t>() != db.meta.size()) {
      throw Error(ErrorCode::CorruptRecord, file.string() + ": manifest lists " + count_json.dump() +
                                                " records, file holds " +
                                                std::to_string(db.meta.size()));
    }
  }
  return bank;
}

std::vector<BenchRow> bench_search(const std::vector<std::size_t>& bank_sizes, std::size_t dim,
                                   std::size_t n_queries, std::uint64_t seed) {
  if (bank_sizes.empty()) return {};
  if (dim == 0 || n_queries == 0) {
    throw Error(ErrorCode::InvalidArgument, "bench_search needs dim >= 1 and n_queries >= 1");
  }
  if (!std::is_sorted(bank_sizes.begin(), bank_sizes.end())) {
    throw Error(ErrorCode::InvalidArgument, "bench_search sizes must be ascending");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto random_unit = [&] {
    std::vector<double> v(dim);
    for (double& x : v) x = gauss(rng);
    return EmbeddingVector::normalized(std::move(v));
  };

  const std::string cluster = "_bench";
  AcuBank bank(dim);
  bank.create_cluster(cluster);
  std::vector<EmbeddingVector> queries;
  for (std::size_t i = 0; i < n_queries; ++i) queries.push_back(random_unit());

  std::vector<BenchRow> rows;
  std::size_t filled = 0;
  for (std::size_t size : bank_sizes) {
    std::vector<NewAcuRecord> batch;
    batch.reserve(size - filled);
    for (; filled < size; ++filled) {
      std::string id = "bench-" + std::to_string(filled);
      batch.push_back({id, id, id, random_unit()});
    }
    bank.insert(cluster, std::move(batch));

    (void)bank.search_top_k(cluster, queries.front());  // warm-up
    std::vector<double> seconds;
    seconds.reserve(n_queries);
    for (const auto& q : queries) {
      auto start = std::chrono::steady_clock::now();
      auto hits = bank.search_top_k(cluster, q);
      auto stop = std::chrono::steady_clock::now();
      seconds.push_back(std::chrono::duration<double>(stop - start).count());
      if (hits.size() > 5) throw Error(ErrorCode::InvalidArgument, "unexpected hit count");
    }
    double mean = 0.0;
    for (double s : seconds) mean += s;
    mean /= static_cast<double>(seconds.size());
    std::sort(seconds.begin(), seconds.end());
    // Nearest-rank 95th percentile.
    auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(seconds.size())));
    double p95 = seconds[std::max<std::size_t>(rank, 1) - 1];
    rows.push_back({size, mean, p95});
  }
  return rows;
}

}  // namespace novascore
