#include "sizekit/backend.hpp"

#include <chrono>
#include <cstdlib>
#include <regex>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>
#include <json.hpp>

#include "sizekit/errors.hpp"
#include "sizekit/text.hpp"

namespace sizekit::agents {

ScriptedBackend ScriptedBackend::parse(std::string_view fixture) {
  static const std::regex header(R"(^===\s*agent:\s*(\S+)\s+round:\s*(\d+)(?:\s+attempt:\s*(\d+))?\s*(?:===)?\s*$)",
                                 std::regex::icase);
  ScriptedBackend b;
  std::optional<std::tuple<std::string, std::size_t, std::size_t>> key;
  std::string body;
  auto flush = [&] {
    if (key) b.add(std::get<0>(*key), std::get<1>(*key), std::string(text::trim(body)), std::get<2>(*key));
    body.clear();
  };
  const auto lines = text::lines(fixture);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string l(lines[i]);
    std::smatch m;
    if (std::regex_match(l, m, header)) {
      flush();
      key = std::make_tuple(m[1].str(), std::stoul(m[2].str()), m[3].matched ? std::stoul(m[3].str()) : 0UL);
      continue;
    }
    if (!key) {
      if (!text::trim(l).empty()) throw ParseError(i + 1, "text before the first '=== agent: ... round: ...' header");
      continue;
    }
    body += l + "\n";
  }
  flush();
  return b;
}

void ScriptedBackend::add(const std::string& agent, std::size_t round, std::string reply, std::size_t attempt) {
  replies_[{text::to_lower(agent), round, attempt}] = std::move(reply);
}

std::string ScriptedBackend::chat(const std::vector<ChatMessage>& context, const ChatParams& params) {
  {
    std::lock_guard lock(*mutex_);
    calls_.push_back({params, context});
  }
  const auto agent = text::to_lower(params.agent);
  auto it = replies_.find({agent, params.round, params.attempt});
  if (it == replies_.end()) it = replies_.find({agent, params.round, 0});
  if (it == replies_.end()) {
    throw BackendError(fmt::format("scripted backend has no reply for agent {} round {} attempt {}", params.agent,
                                   params.round, params.attempt));
  }
  return it->second;
}

std::vector<ScriptedBackend::Call> ScriptedBackend::calls() const {
  std::lock_guard lock(*mutex_);
  return calls_;
}

HttpBackend::HttpBackend(HttpBackendConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.base_url.empty()) throw ConfigError("http backend: base_url is required");
  if (cfg_.model.empty()) throw ConfigError("http backend: model is required");
  if (cfg_.max_attempts < 1) throw ConfigError("http backend: max_attempts must be >= 1");
}

std::string HttpBackend::request_body(const std::vector<ChatMessage>& context, const ChatParams& params) const {
  nlohmann::json body;
  body["model"] = cfg_.model;
  body["messages"] = nlohmann::json::array();
  for (const auto& m : context) body["messages"].push_back({{"role", m.role}, {"content", m.content}});
  if (cfg_.supports_temperature && params.temperature) body["temperature"] = *params.temperature;
  if (params.seed) body["seed"] = params.seed;
  return body.dump();
}

std::string HttpBackend::chat(const std::vector<ChatMessage>& context, const ChatParams& params) {
  static const std::regex url_re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(cfg_.base_url, m, url_re)) throw ConfigError("http backend: bad base_url " + cfg_.base_url);
  std::string prefix = m[2].matched ? m[2].str() : "";
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  const std::string path = prefix + "/chat/completions";

  httplib::Client client(m[1].str());
  const auto secs = static_cast<time_t>(cfg_.timeout_seconds);
  client.set_connection_timeout(secs, 0);
  client.set_read_timeout(secs, 0);
  client.set_write_timeout(secs, 0);
  httplib::Headers headers;
  if (!cfg_.api_key_env.empty()) {
    if (const char* key = std::getenv(cfg_.api_key_env.c_str()); key && *key) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
  }
  const std::string body = request_body(context, params);

  std::string last_error;
  double backoff = cfg_.initial_backoff_seconds;
  for (std::size_t attempt = 1; attempt <= cfg_.max_attempts; ++attempt) {
    auto res = client.Post(path, headers, body, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
    } else if (res->status != 200) {
      last_error = fmt::format("HTTP {}", res->status);
    } else {
      try {
        const auto j = nlohmann::json::parse(res->body);
        return j.at("choices").at(0).at("message").at("content").get<std::string>();
      } catch (const std::exception& e) {
        last_error = std::string("malformed response: ") + e.what();
      }
    }
    if (attempt < cfg_.max_attempts) {
      std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
      backoff *= 2.0;
    }
  }
  throw BackendError(fmt::format("chat request failed after {} attempts: {}", cfg_.max_attempts, last_error));
}

}  // namespace sizekit::agents
