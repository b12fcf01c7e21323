#pragma once

#include <condition_variable>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace mobgen {

struct GenerationParams {
  double temperature = 1.0;
  int max_tokens = 1024;
  double timeout_s = 30.0;
  int max_retries = 3;  // total attempts against the remote endpoint
};

/// Text-generation abstraction. Implementations must be callable from many
/// agent tasks at once.
class Backend {
public:
  virtual ~Backend() = default;

  /// Returns the assistant text for a system/user prompt pair.
  /// `template_name` identifies the calling prompt so scripted mocks can key
  /// on it; real backends ignore it.
  virtual std::string complete(const std::string& system_text, const std::string& user_text,
                               const GenerationParams& params, std::string_view template_name) = 0;

  virtual std::string kind() const = 0;
};

/// One scripted reply. `match_template` must equal the calling template's
/// name when set; `match_substring` must occur in the rendered prompt
/// (system + "\n" + user) when set. A rule with neither always matches.
struct MockRule {
  std::string match_template;
  std::string match_substring;
  std::string response;
};

/// Deterministic offline backend: first matching rule wins.
class MockBackend final : public Backend {
public:
  explicit MockBackend(std::vector<MockRule> rules);

  /// Loads a JSON array of {"template"?, "match"?, "response"} rules.
  static MockBackend from_file(const std::filesystem::path& script_path);

  std::string complete(const std::string& system_text, const std::string& user_text,
                       const GenerationParams& params, std::string_view template_name) override;
  std::string kind() const override { return "mock"; }

private:
  std::vector<MockRule> rules_;
};

struct RemoteConfig {
  std::string endpoint_url;     // e.g. https://host:port/v1/chat/completions
  std::string model_name;
  std::string api_key_env_var;  // empty: no Authorization header
  int max_inflight = 8;
  double backoff_base_s = 1.0;  // doubles per retry; tests shrink it
};

/// Chat-completions wire client (messages with system/user roles, JSON over
/// HTTP). Retries transport and 5xx failures with exponential backoff and
/// caps the number of in-flight requests across all agent tasks.
class RemoteBackend final : public Backend {
public:
  explicit RemoteBackend(RemoteConfig config);

  std::string complete(const std::string& system_text, const std::string& user_text,
                       const GenerationParams& params, std::string_view template_name) override;
  std::string kind() const override { return "remote"; }

private:
  RemoteConfig config_;
  std::string host_base_;  // scheme://host[:port]
  std::string path_;
  std::string api_key_;

  std::mutex mu_;
  std::condition_variable slot_free_;
  int inflight_ = 0;
};

std::unique_ptr<Backend> make_mock_backend(const std::filesystem::path& script_path);

/// Extracts the first balanced top-level JSON object from a model reply,
/// after stripping code-fence lines. Scanning is brace-depth based and
/// string-aware; every '{' is tried as a start, so unbalanced braces in
/// surrounding prose do not hide a later object. Throws ExtractError with a
/// short excerpt when nothing balances.
std::string extract_json_block(const std::string& text);

}  // namespace mobgen
