#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

namespace novascore {

struct HttpRetryPolicy {
  int attempts = 3;
  std::chrono::milliseconds initial_backoff{1000};
  std::chrono::seconds timeout{120};
};

// POSTs a JSON body and returns the parsed JSON reply. Transport failures
// and 5xx replies are retried with exponential backoff; anything else
// (4xx, unparseable body, exhausted attempts) throws
// Error(BackendUnavailable). `what` names the caller in error messages.
nlohmann::json post_json(const std::string& url, const nlohmann::json& body,
                         const std::optional<std::string>& bearer_token,
                         const HttpRetryPolicy& policy, std::string_view what);

// Reads an environment variable; empty values count as unset.
std::optional<std::string> env_secret(const char* name);

}  // namespace novascore
