#include "novascore/core_model.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>

#include "novascore/error.hpp"

namespace novascore {

namespace {

bool is_blank(std::string_view s) {
  for (unsigned char c : s) {
    if (!std::isspace(c)) return false;
  }
  return true;
}

// Reads exactly `width` digits at `pos`; advances pos.
bool read_digits(std::string_view s, std::size_t& pos, std::size_t width, int& out) {
  if (pos + width > s.size()) return false;
  int value = 0;
  for (std::size_t i = 0; i < width; ++i) {
    char c = s[pos + i];
    if (c < '0' || c > '9') return false;
    value = value * 10 + (c - '0');
  }
  pos += width;
  out = value;
  return true;
}

[[noreturn]] void bad_timestamp(std::string_view text) {
  throw Error(ErrorCode::ParseError, "invalid ISO-8601 timestamp '" + std::string(text) + "'");
}

}  // namespace

Timestamp parse_iso8601(std::string_view text) {
  using namespace std::chrono;
  std::size_t pos = 0;
  int y = 0, mo = 0, d = 0;
  if (!read_digits(text, pos, 4, y) || pos >= text.size() || text[pos++] != '-' ||
      !read_digits(text, pos, 2, mo) || pos >= text.size() || text[pos++] != '-' ||
      !read_digits(text, pos, 2, d)) {
    bad_timestamp(text);
  }
  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) bad_timestamp(text);

  int hh = 0, mm = 0, ss = 0;
  long long micros = 0;
  long long offset_minutes = 0;
  if (pos < text.size()) {
    if (text[pos] != 'T' && text[pos] != 't' && text[pos] != ' ') bad_timestamp(text);
    ++pos;
    if (!read_digits(text, pos, 2, hh) || pos >= text.size() || text[pos++] != ':' ||
        !read_digits(text, pos, 2, mm)) {
      bad_timestamp(text);
    }
    if (pos < text.size() && text[pos] == ':') {
      ++pos;
      if (!read_digits(text, pos, 2, ss)) bad_timestamp(text);
      if (pos < text.size() && text[pos] == '.') {
        ++pos;
        std::size_t ndigits = 0;
        long long scale = 100000;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
          if (ndigits < 6) micros += (text[pos] - '0') * scale;
          scale /= 10;
          ++ndigits;
          ++pos;
        }
        if (ndigits == 0) bad_timestamp(text);
      }
    }
    if (hh > 23 || mm > 59 || ss > 60) bad_timestamp(text);
    if (pos < text.size()) {
      char z = text[pos++];
      if (z == 'Z' || z == 'z') {
        // UTC
      } else if (z == '+' || z == '-') {
        int oh = 0, om = 0;
        if (!read_digits(text, pos, 2, oh)) bad_timestamp(text);
        if (pos < text.size() && text[pos] == ':') ++pos;
        if (!read_digits(text, pos, 2, om)) bad_timestamp(text);
        offset_minutes = (oh * 60 + om) * (z == '+' ? 1 : -1);
      } else {
        bad_timestamp(text);
      }
    }
    if (pos != text.size()) bad_timestamp(text);
  }
  auto tp = sys_days{ymd} + hours{hh} + minutes{mm} + seconds{ss} + microseconds{micros} -
            minutes{offset_minutes};
  return time_point_cast<microseconds>(tp);
}

std::string format_iso8601(Timestamp ts) {
  using namespace std::chrono;
  auto day_point = floor<days>(ts);
  year_month_day ymd{day_point};
  auto rem = ts - day_point;
  auto h = duration_cast<hours>(rem);
  rem -= h;
  auto m = duration_cast<minutes>(rem);
  rem -= m;
  auto s = duration_cast<seconds>(rem);
  rem -= s;
  long long us = rem.count();
  char buf[64];
  if (us == 0) {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(h.count()), static_cast<int>(m.count()),
                  static_cast<int>(s.count()));
  } else {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%06lldZ",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()), static_cast<int>(h.count()),
                  static_cast<int>(m.count()), static_cast<int>(s.count()), us);
  }
  return buf;
}

std::string_view to_string(DocumentRole role) {
  return role == DocumentRole::source ? "source" : "target";
}

std::optional<DocumentRole> parse_document_role(std::string_view text) {
  if (text == "source") return DocumentRole::source;
  if (text == "target") return DocumentRole::target;
  return std::nullopt;
}

std::string_view to_string(GoldLabel label) {
  switch (label) {
    case GoldLabel::novel: return "novel";
    case GoldLabel::non_novel: return "non_novel";
    case GoldLabel::somewhat_redundant: return "somewhat_redundant";
    case GoldLabel::absolute_redundant: return "absolute_redundant";
  }
  return "novel";
}

std::optional<GoldLabel> parse_gold_label(std::string_view text) {
  if (text == "novel") return GoldLabel::novel;
  if (text == "non_novel") return GoldLabel::non_novel;
  if (text == "somewhat_redundant") return GoldLabel::somewhat_redundant;
  if (text == "absolute_redundant") return GoldLabel::absolute_redundant;
  return std::nullopt;
}

double gold_label_numeric(GoldLabel label, LabelMode mode) {
  switch (label) {
    case GoldLabel::novel:
      return 1.0;
    case GoldLabel::somewhat_redundant:
      return mode == LabelMode::graded ? 0.5 : 0.0;
    case GoldLabel::non_novel:
    case GoldLabel::absolute_redundant:
      return 0.0;
  }
  return 0.0;
}

void DocumentRegistry::add(const std::string& id) {
  if (!ids_.insert(id).second) {
    throw Error(ErrorCode::DuplicateId, "document id '" + id + "' already present");
  }
}

Document validate_document(Document doc, DocumentRegistry* registry, bool require_timestamp) {
  if (doc.id.empty()) throw Error(ErrorCode::InvalidArgument, "document id is empty");
  if (is_blank(doc.text)) {
    throw Error(ErrorCode::EmptyText, "document '" + doc.id + "' has empty text");
  }
  if (require_timestamp && !doc.timestamp) {
    throw Error(ErrorCode::MissingTimestamp, "document '" + doc.id + "' has no timestamp");
  }
  if (registry != nullptr) registry->add(doc.id);
  return doc;
}

std::string make_acu_id(std::string_view doc_id, std::size_t ordinal) {
  return std::string(doc_id) + "#" + std::to_string(ordinal);
}

bool AcuAnnotation::valid() const {
  bool judged = correctness == Correctness::correct && redundancy == Redundancy::not_redundant;
  if (!judged) return !novelty && !salience;
  return true;
}

void WeightParams::validate() const {
  if (!std::isfinite(alpha) || !std::isfinite(beta) || !std::isfinite(gamma)) {
    throw Error(ErrorCode::InvalidArgument, "weight parameters must be finite");
  }
  if (alpha < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "alpha must be >= 0 for a monotone weight curve");
  }
}

std::string_view to_string(EvaluatorKind kind) {
  switch (kind) {
    case EvaluatorKind::CosSim: return "CosSim";
    case EvaluatorKind::NLI: return "NLI";
    case EvaluatorKind::QA: return "QA";
  }
  return "CosSim";
}

std::string_view to_string(NliLabel label) {
  switch (label) {
    case NliLabel::entailment: return "entailment";
    case NliLabel::contradiction: return "contradiction";
    case NliLabel::neutral: return "neutral";
  }
  return "neutral";
}

}  // namespace novascore
