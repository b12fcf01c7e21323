#include "mobgen/backend.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "mobgen/errors.hpp"

namespace mobgen {

namespace {

std::string excerpt(const std::string& text, std::size_t limit = 120) {
  std::string out = text.substr(0, limit);
  for (char& c : out) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  if (text.size() > limit) out += "...";
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Mock
// ---------------------------------------------------------------------------

MockBackend::MockBackend(std::vector<MockRule> rules) : rules_(std::move(rules)) {}

MockBackend MockBackend::from_file(const std::filesystem::path& script_path) {
  std::ifstream in(script_path);
  if (!in) throw ConfigError("cannot open mock script " + script_path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("mock script " + script_path.string() + " is not valid JSON: " + e.what());
  }
  if (!j.is_array()) throw ConfigError("mock script must be a JSON array of rules");
  std::vector<MockRule> rules;
  for (const auto& item : j) {
    if (!item.is_object() || !item.contains("response") || !item["response"].is_string()) {
      throw ConfigError("every mock rule needs a string \"response\"");
    }
    MockRule r;
    r.response = item["response"].get<std::string>();
    if (item.contains("template")) r.match_template = item["template"].get<std::string>();
    if (item.contains("match")) r.match_substring = item["match"].get<std::string>();
    rules.push_back(std::move(r));
  }
  return MockBackend(std::move(rules));
}

std::string MockBackend::complete(const std::string& system_text, const std::string& user_text,
                                  const GenerationParams&, std::string_view template_name) {
  const std::string rendered = system_text + "\n" + user_text;
  for (const auto& rule : rules_) {
    if (!rule.match_template.empty() && rule.match_template != template_name) continue;
    if (!rule.match_substring.empty() && rendered.find(rule.match_substring) == std::string::npos) {
      continue;
    }
    return rule.response;
  }
  throw BackendError("mock script has no rule matching template \"" + std::string(template_name) +
                     "\" (prompt: \"" + excerpt(rendered, 80) + "\")");
}

std::unique_ptr<Backend> make_mock_backend(const std::filesystem::path& script_path) {
  return std::make_unique<MockBackend>(MockBackend::from_file(script_path));
}

// ---------------------------------------------------------------------------
// Remote
// ---------------------------------------------------------------------------

RemoteBackend::RemoteBackend(RemoteConfig config) : config_(std::move(config)) {
  if (config_.endpoint_url.empty()) throw ConfigError("remote backend needs an endpoint URL");
  if (config_.model_name.empty()) throw ConfigError("remote backend needs a model name");
  if (config_.max_inflight < 1) throw ConfigError("max_inflight must be >= 1");

  // Split scheme://host[:port]/path for the HTTP client.
  const std::size_t scheme_end = config_.endpoint_url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("endpoint URL must include a scheme: " + config_.endpoint_url);
  }
  const std::size_t path_start = config_.endpoint_url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    host_base_ = config_.endpoint_url;
    path_ = "/";
  } else {
    host_base_ = config_.endpoint_url.substr(0, path_start);
    path_ = config_.endpoint_url.substr(path_start);
  }

  if (!config_.api_key_env_var.empty()) {
    const char* key = std::getenv(config_.api_key_env_var.c_str());
    if (key == nullptr || *key == '\0') {
      throw ConfigError("environment variable " + config_.api_key_env_var +
                        " is not set (named as the API key source)");
    }
    api_key_ = key;
  }
}

std::string RemoteBackend::complete(const std::string& system_text, const std::string& user_text,
                                    const GenerationParams& params, std::string_view) {
  nlohmann::json body = {
      {"model", config_.model_name},
      {"messages",
       {{{"role", "system"}, {"content", system_text}}, {{"role", "user"}, {"content", user_text}}}},
      {"temperature", params.temperature},
      {"max_tokens", params.max_tokens},
  };
  const std::string payload = body.dump();

  // In-flight cap shared by all agent tasks.
  std::unique_lock lock(mu_);
  slot_free_.wait(lock, [&] { return inflight_ < config_.max_inflight; });
  ++inflight_;
  lock.unlock();
  struct SlotRelease {
    RemoteBackend* self;
    ~SlotRelease() {
      std::lock_guard g(self->mu_);
      --self->inflight_;
      self->slot_free_.notify_one();
    }
  } release{this};

  const int attempts = std::max(1, params.max_retries);
  std::string last_error;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) {
      const double delay_s = config_.backoff_base_s * static_cast<double>(1 << (attempt - 1));
      std::this_thread::sleep_for(std::chrono::duration<double>(delay_s));
    }

    httplib::Client client(host_base_);
    const auto timeout = std::chrono::duration<double>(params.timeout_s);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    auto res = client.Post(path_, headers, payload, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_error = "server error: HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      throw ProtocolError("chat endpoint returned HTTP " + std::to_string(res->status), res->body);
    }
    try {
      const nlohmann::json reply = nlohmann::json::parse(res->body);
      return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw ProtocolError(std::string("cannot parse provider payload: ") + e.what(), res->body);
    }
  }
  throw BackendError("backend unavailable after " + std::to_string(attempts) +
                     " attempts (last: " + last_error + ")");
}

// ---------------------------------------------------------------------------
// JSON block extraction
// ---------------------------------------------------------------------------

namespace {

/// Scans for a balanced {...} starting at `start` (which must index a '{'),
/// honoring double-quoted strings and backslash escapes. Returns one past the
/// closing brace, or npos when the object never balances.
std::size_t balanced_end(const std::string& s, std::size_t start) {
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = start; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      --depth;
      if (depth == 0) return i + 1;
    }
  }
  return std::string::npos;
}

std::string strip_fence_lines(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    const std::size_t end = (eol == std::string::npos) ? text.size() : eol;
    std::size_t first = pos;
    while (first < end && (text[first] == ' ' || text[first] == '\t')) ++first;
    const bool fence = end - first >= 3 && text.compare(first, 3, "```") == 0;
    if (!fence) out.append(text, pos, end - pos + (eol == std::string::npos ? 0 : 1));
    else if (eol != std::string::npos) out.push_back('\n');
    if (eol == std::string::npos) break;
    pos = eol + 1;
  }
  return out;
}

}  // namespace

std::string extract_json_block(const std::string& text) {
  const std::string stripped = strip_fence_lines(text);
  for (std::size_t i = stripped.find('{'); i != std::string::npos; i = stripped.find('{', i + 1)) {
    const std::size_t end = balanced_end(stripped, i);
    if (end != std::string::npos) return stripped.substr(i, end - i);
  }
  throw ExtractError("no balanced JSON object in reply: \"" + excerpt(text) + "\"");
}

}  // namespace mobgen
