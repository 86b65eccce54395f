#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "novascore/core_model.hpp"
#include "novascore/llm_backend.hpp"

namespace novascore {

struct ExtractionResult {
  std::vector<Acu> acus;
  std::string summary;
  std::size_t n_salient = 0;
  std::vector<std::string> warnings;
};

struct ExtractionOptions {
  std::string model_name = "gpt-4o";
  ExtractionExample example = default_extraction_example();
  std::optional<std::size_t> max_acus_per_doc;
};

// Match key for ACU text: NFC, trimmed, whitespace runs collapsed to one
// space, lowercased.
std::string normalize_acu_text(std::string_view text);

// Builds the ACU list from a {"all_acus", "summary", "salient_acus"} payload:
// blank entries and normalized duplicates are dropped (first kept),
// ordinals follow list order, and salience is an exact normalized match.
ExtractionResult parse_extraction_payload(const std::string& doc_id, const nlohmann::json& payload,
                                          std::optional<std::size_t> max_acus = std::nullopt);

// One backend call producing ACUs, summary and salient subset.
ExtractionResult extract(const Document& doc, LlmBackend& backend,
                         const ExtractionOptions& options = {});

}  // namespace novascore
