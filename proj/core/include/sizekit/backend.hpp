#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace sizekit::agents {

struct ChatMessage {
  std::string role;  // system | user | assistant
  std::string content;
};

struct ChatParams {
  std::string agent;
  std::size_t round = 1;
  /// Extraction attempt (1-based); scripted fixtures may key responses on it.
  std::size_t attempt = 1;
  std::optional<double> temperature;
  std::uint64_t seed = 0;
};

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual std::string name() const = 0;
  /// Throws BackendError when no reply can be produced.
  virtual std::string chat(const std::vector<ChatMessage>& context, const ChatParams& params) = 0;
};

/// Replays canned replies keyed by (agent, round, attempt).
///
/// Fixture format: sections introduced by a header line
///   === agent: <name> round: <r> [attempt: <a>]
/// followed by the reply text up to the next header. A section without an attempt serves every attempt
/// that has no specific entry. Agent names compare case-insensitively.
class ScriptedBackend final : public ChatBackend {
 public:
  ScriptedBackend() = default;
  static ScriptedBackend parse(std::string_view fixture);
  void add(const std::string& agent, std::size_t round, std::string reply, std::size_t attempt = 0);
  std::string name() const override { return "scripted"; }
  std::string chat(const std::vector<ChatMessage>& context, const ChatParams& params) override;

  /// Every context the backend was asked to answer, in call order.
  struct Call {
    ChatParams params;
    std::vector<ChatMessage> context;
  };
  std::vector<Call> calls() const;

 private:
  std::map<std::tuple<std::string, std::size_t, std::size_t>, std::string> replies_;
  std::unique_ptr<std::mutex> mutex_ = std::make_unique<std::mutex>();
  std::vector<Call> calls_;
};

struct HttpBackendConfig {
  /// OpenAI-compatible base URL, e.g. https://api.example.com/v1; requests go to <base>/chat/completions.
  std::string base_url;
  std::string model;
  /// Environment variable holding the bearer token (empty: no Authorization header).
  std::string api_key_env = "SIZEKIT_API_KEY";
  bool supports_temperature = true;
  std::size_t max_attempts = 3;
  double initial_backoff_seconds = 1.0;
  double timeout_seconds = 120.0;
};

/// Chat-completion client with retry and exponential backoff.
class HttpBackend final : public ChatBackend {
 public:
  explicit HttpBackend(HttpBackendConfig cfg);
  std::string name() const override { return "http:" + cfg_.model; }
  std::string chat(const std::vector<ChatMessage>& context, const ChatParams& params) override;
  /// Request body for `context`; temperature is omitted when the backend does not support it.
  std::string request_body(const std::vector<ChatMessage>& context, const ChatParams& params) const;
  const HttpBackendConfig& config() const { return cfg_; }

 private:
  HttpBackendConfig cfg_;
};

}  // namespace sizekit::agents
