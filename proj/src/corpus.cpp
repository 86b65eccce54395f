#include "novascore/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <json.hpp>

#include "novascore/error.hpp"

namespace novascore {

std::string_view to_string(Layout layout) {
  return layout == Layout::clustered ? "clustered" : "chronological";
}

Layout parse_layout(std::string_view text) {
  if (text == "clustered") return Layout::clustered;
  if (text == "chronological") return Layout::chronological;
  throw Error(ErrorCode::InvalidArgument, "unknown layout '" + std::string(text) + "'");
}

std::string_view to_string(Action action) {
  return action == Action::bank_only ? "bank_only" : "score_then_bank";
}

std::vector<std::pair<std::string, std::vector<std::size_t>>> Corpus::clusters() const {
  std::vector<std::pair<std::string, std::vector<std::size_t>>> out;
  std::map<std::string, std::size_t> slot;
  for (std::size_t i = 0; i < documents.size(); ++i) {
    const auto& cid = documents[i].cluster_id;
    auto [it, inserted] = slot.emplace(cid, out.size());
    if (inserted) out.push_back({cid, {}});
    out[it->second].second.push_back(i);
  }
  return out;
}

namespace {

std::optional<std::string> optional_string(const nlohmann::json& obj, const char* key,
                                           const std::string& where) {
  if (!obj.contains(key) || obj[key].is_null()) return std::nullopt;
  if (!obj[key].is_string()) {
    throw Error(ErrorCode::ParseError, where + ": field '" + key + "' must be a string");
  }
  return obj[key].get<std::string>();
}

// Clustered order: clusters by first appearance; within a cluster sources
// in file order, then targets by timestamp when every target has one,
// otherwise in file order.
std::vector<Document> order_clustered(std::vector<Document> docs) {
  std::vector<std::string> cluster_order;
  std::map<std::string, std::vector<Document>> by_cluster;
  for (auto& d : docs) {
    if (by_cluster.find(d.cluster_id) == by_cluster.end()) cluster_order.push_back(d.cluster_id);
    by_cluster[d.cluster_id].push_back(std::move(d));
  }
  std::vector<Document> out;
  for (const auto& cid : cluster_order) {
    auto& members = by_cluster[cid];
    std::vector<Document> sources, targets;
    for (auto& d : members) {
      (d.role == DocumentRole::source ? sources : targets).push_back(std::move(d));
    }
    bool all_timed = std::all_of(targets.begin(), targets.end(),
                                 [](const Document& d) { return d.timestamp.has_value(); });
    if (all_timed) {
      std::stable_sort(targets.begin(), targets.end(), [](const Document& a, const Document& b) {
        return *a.timestamp < *b.timestamp;
      });
    }
    for (auto& d : sources) out.push_back(std::move(d));
    for (auto& d : targets) out.push_back(std::move(d));
  }
  return out;
}

}  // namespace

Corpus parse_corpus(std::istream& in, Layout layout, std::string_view source_name) {
  Corpus corpus;
  corpus.layout = layout;
  DocumentRegistry registry;
  std::vector<Document> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = std::string(source_name) + ":" + std::to_string(line_no);
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::ParseError, where + ": " + e.what());
    }
    if (!obj.is_object()) throw Error(ErrorCode::ParseError, where + ": expected a JSON object");

    Document doc;
    auto id = optional_string(obj, "id", where);
    auto text = optional_string(obj, "text", where);
    if (!id) throw Error(ErrorCode::ParseError, where + ": missing 'id'");
    if (!text) throw Error(ErrorCode::ParseError, where + ": missing 'text'");
    doc.id = *id;
    doc.text = *text;
    doc.title = optional_string(obj, "title", where);
    auto cluster = optional_string(obj, "cluster", where);
    if (cluster) {
      doc.cluster_id = *cluster;
    } else if (layout == Layout::chronological) {
      doc.cluster_id = std::string(kChronologicalDatabase);
    } else {
      throw Error(ErrorCode::ParseError, where + ": missing 'cluster'");
    }
    if (auto ts = optional_string(obj, "timestamp", where)) {
      try {
        doc.timestamp = parse_iso8601(*ts);
      } catch (const Error& e) {
        throw Error(ErrorCode::ParseError, where + ": " + e.what());
      }
    }
    if (auto role = optional_string(obj, "role", where)) {
      auto parsed = parse_document_role(*role);
      if (!parsed) throw Error(ErrorCode::ParseError, where + ": unknown role '" + *role + "'");
      doc.role = *parsed;
    }
    if (auto label = optional_string(obj, "label", where)) {
      auto parsed = parse_gold_label(*label);
      if (!parsed) throw Error(ErrorCode::UnknownLabel, where + ": unknown label '" + *label + "'");
      doc.gold_label = *parsed;
    }
    try {
      docs.push_back(validate_document(std::move(doc), &registry, layout == Layout::chronological));
    } catch (const Error& e) {
      throw Error(e.code(), where + ": " + e.detail());
    }
  }

  if (layout == Layout::chronological) {
    std::stable_sort(docs.begin(), docs.end(), [](const Document& a, const Document& b) {
      if (*a.timestamp != *b.timestamp) return *a.timestamp < *b.timestamp;
      return a.id < b.id;
    });
    corpus.documents = std::move(docs);
  } else {
    corpus.documents = order_clustered(std::move(docs));
  }
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path, Layout layout) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open corpus " + path.string());
  return parse_corpus(in, layout, path.string());
}

std::vector<PlanStep> processing_plan(const Corpus& corpus) {
  std::vector<PlanStep> plan;
  plan.reserve(corpus.documents.size());
  for (std::size_t i = 0; i < corpus.documents.size(); ++i) {
    const auto& doc = corpus.documents[i];
    PlanStep step;
    step.doc_index = i;
    step.action = doc.role == DocumentRole::source ? Action::bank_only : Action::score_then_bank;
    step.database = corpus.layout == Layout::chronological ? std::string(kChronologicalDatabase)
                                                           : doc.cluster_id;
    plan.push_back(std::move(step));
  }
  return plan;
}

}  // namespace novascore
