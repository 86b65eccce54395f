#include "novascore/extraction.hpp"

#include <unordered_set>

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/locid.h>
#include <unicode/unistr.h>

#include "novascore/error.hpp"

namespace novascore {

std::string normalize_acu_text(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  icu::UnicodeString source =
      icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  icu::UnicodeString composed = U_SUCCESS(status) ? nfc->normalize(source, status) : source;
  if (U_FAILURE(status)) composed = source;

  icu::UnicodeString collapsed;
  bool pending_space = false;
  for (int32_t i = 0; i < composed.length();) {
    UChar32 c = composed.char32At(i);
    i += U16_LENGTH(c);
    if (u_isUWhiteSpace(c)) {
      pending_space = !collapsed.isEmpty();
      continue;
    }
    if (pending_space) collapsed.append(static_cast<UChar>(' '));
    pending_space = false;
    collapsed.append(c);
  }
  collapsed.toLower(icu::Locale::getRoot());
  std::string out;
  collapsed.toUTF8String(out);
  return out;
}

ExtractionResult parse_extraction_payload(const std::string& doc_id, const nlohmann::json& payload,
                                          std::optional<std::size_t> max_acus) {
  if (!payload.is_object()) {
    throw Error(ErrorCode::ExtractionParseError, "extraction payload for '" + doc_id + "' is not an object");
  }
  for (const char* key : {"all_acus", "summary", "salient_acus"}) {
    if (!payload.contains(key)) {
      throw Error(ErrorCode::ExtractionParseError,
                  "extraction payload for '" + doc_id + "' lacks '" + key + "'");
    }
  }
  const auto& all = payload["all_acus"];
  const auto& salient = payload["salient_acus"];
  if (!all.is_array() || !salient.is_array() || !payload["summary"].is_string()) {
    throw Error(ErrorCode::ExtractionParseError,
                "extraction payload for '" + doc_id + "' has mistyped fields");
  }

  ExtractionResult result;
  result.summary = payload["summary"].get<std::string>();

  std::unordered_set<std::string> seen;
  std::vector<std::string> keys;
  for (const auto& item : all) {
    if (!item.is_string()) {
      throw Error(ErrorCode::ExtractionParseError,
                  "all_acus for '" + doc_id + "' holds a non-string entry");
    }
    auto text = item.get<std::string>();
    auto key = normalize_acu_text(text);
    if (key.empty()) {
      result.warnings.push_back("dropped blank ACU");
      continue;
    }
    if (!seen.insert(key).second) {
      result.warnings.push_back("dropped duplicate ACU: " + text);
      continue;
    }
    if (max_acus && result.acus.size() >= *max_acus) {
      result.warnings.push_back("max_acus_per_doc reached; dropped: " + text);
      continue;
    }
    Acu acu;
    acu.ordinal = result.acus.size();
    acu.acu_id = make_acu_id(doc_id, acu.ordinal);
    acu.doc_id = doc_id;
    acu.text = std::move(text);
    result.acus.push_back(std::move(acu));
    keys.push_back(std::move(key));
  }
  if (result.acus.empty()) {
    throw Error(ErrorCode::EmptyAcuList, "extraction for '" + doc_id + "' produced no ACUs");
  }

  for (const auto& item : salient) {
    if (!item.is_string()) {
      throw Error(ErrorCode::ExtractionParseError,
                  "salient_acus for '" + doc_id + "' holds a non-string entry");
    }
    auto key = normalize_acu_text(item.get<std::string>());
    bool matched = false;
    for (std::size_t i = 0; i < keys.size(); ++i) {
      if (keys[i] == key) {
        result.acus[i].salient = true;
        matched = true;
      }
    }
    if (!matched) {
      result.warnings.push_back("salient ACU not in all_acus: " + item.get<std::string>());
    }
  }
  for (const auto& acu : result.acus) result.n_salient += acu.salient ? 1 : 0;
  return result;
}

ExtractionResult extract(const Document& doc, LlmBackend& backend, const ExtractionOptions& options) {
  LlmRequest request;
  request.template_id = TemplateId::acu_extract_salience;
  request.model_name = options.model_name;
  request.rendered_prompt = render_extraction_prompt(doc.text, options.example);
  auto response = backend.complete(request);
  nlohmann::json payload;
  try {
    payload = parse_json_payload(response.raw_text);
  } catch (const Error& e) {
    throw Error(ErrorCode::ExtractionParseError,
                "extraction reply for '" + doc.id + "' unparseable: " + e.what());
  }
  return parse_extraction_payload(doc.id, payload, options.max_acus_per_doc);
}

}  // namespace novascore
