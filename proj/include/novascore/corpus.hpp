#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "novascore/core_model.hpp"

namespace novascore {

enum class Layout { clustered, chronological };

std::string_view to_string(Layout layout);
Layout parse_layout(std::string_view text);

// Name of the single bank database used by chronological corpora.
inline constexpr std::string_view kChronologicalDatabase = "_all";

struct Corpus {
  Layout layout = Layout::clustered;
  // Already in processing order.
  std::vector<Document> documents;

  // cluster id -> indices into `documents`, clusters in first-seen order.
  std::vector<std::pair<std::string, std::vector<std::size_t>>> clusters() const;
};

// One JSON document per line:
//   {"id", "cluster", "timestamp"?, "title"?, "text", "role"?, "label"?}
// Errors name the source and line number.
Corpus parse_corpus(std::istream& in, Layout layout, std::string_view source_name = "<corpus>");
Corpus load_corpus(const std::filesystem::path& path, Layout layout);

enum class Action { bank_only, score_then_bank };

std::string_view to_string(Action action);

struct PlanStep {
  std::size_t doc_index = 0;
  Action action = Action::score_then_bank;
  std::string database;
};

std::vector<PlanStep> processing_plan(const Corpus& corpus);

}  // namespace novascore
