#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <unistd.h>

#include "novascore/acubank.hpp"
#include "novascore/embedding.hpp"

namespace testing {

inline std::vector<double> vec(std::span<const double> s) { return {s.begin(), s.end()}; }

inline std::filesystem::path fixture_dir() { return NOVASCORE_FIXTURE_DIR; }

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("novascore_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << content;
}

inline novascore::EmbeddingVector random_unit(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> v(dim);
  for (auto& x : v) x = g(rng);
  return novascore::EmbeddingVector::normalized(std::move(v));
}

// Hands back fixed vectors keyed by exact text.
class TableEmbedder final : public novascore::Embedder {
 public:
  explicit TableEmbedder(std::vector<std::pair<std::string, std::vector<double>>> table)
      : table_(std::move(table)) {}
  std::size_t dim() const override { return table_.empty() ? 0 : table_.front().second.size(); }

 protected:
  std::vector<novascore::EmbeddingVector> embed_batch(const std::vector<std::string>& texts) const override {
    std::vector<novascore::EmbeddingVector> out;
    for (const auto& t : texts) {
      for (const auto& [key, v] : table_) {
        if (key == t) {
          out.push_back(novascore::EmbeddingVector::from_unit(v));
          break;
        }
      }
    }
    return out;
  }
  std::size_t batch_size() const override { return 64; }

 private:
  std::vector<std::pair<std::string, std::vector<double>>> table_;
};

}  // namespace testing
