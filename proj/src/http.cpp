#include "novascore/http.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "novascore/error.hpp"

namespace novascore {

namespace {

struct SplitUrl {
  std::string origin;
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::InvalidArgument, "endpoint '" + url + "' lacks a scheme");
  }
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

nlohmann::json post_json(const std::string& url, const nlohmann::json& body,
                         const std::optional<std::string>& bearer_token,
                         const HttpRetryPolicy& policy, std::string_view what) {
  auto [origin, path] = split_url(url);
  httplib::Client client(origin);
  client.set_connection_timeout(policy.timeout);
  client.set_read_timeout(policy.timeout);
  client.set_write_timeout(policy.timeout);
  httplib::Headers headers;
  if (bearer_token) headers.emplace("Authorization", "Bearer " + *bearer_token);

  const std::string payload = body.dump();
  std::string last_failure = "no attempts made";
  auto backoff = policy.initial_backoff;
  for (int attempt = 1; attempt <= policy.attempts; ++attempt) {
    auto result = client.Post(path, headers, payload, "application/json");
    if (!result) {
      last_failure = "transport error: " + httplib::to_string(result.error());
    } else if (result->status >= 500) {
      last_failure = "HTTP " + std::to_string(result->status);
    } else if (result->status >= 400 || result->status < 200) {
      throw Error(ErrorCode::BackendUnavailable,
                  std::string(what) + " returned HTTP " + std::to_string(result->status) + ": " +
                      result->body.substr(0, 200));
    } else {
      try {
        return nlohmann::json::parse(result->body);
      } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::BackendUnavailable,
                    std::string(what) + " returned a non-JSON body: " + e.what());
      }
    }
    if (attempt < policy.attempts) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
  throw Error(ErrorCode::BackendUnavailable, std::string(what) + " failed after " +
                                                 std::to_string(policy.attempts) +
                                                 " attempts (" + last_failure + ")");
}

std::optional<std::string> env_secret(const char* name) {
  const char* value = std::getenv(name);
  if (value == nullptr || *value == '\0') return std::nullopt;
  return std::string(value);
}

}  // namespace novascore
