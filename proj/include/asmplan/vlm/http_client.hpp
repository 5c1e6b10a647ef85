#pragma once

// Chat-with-images client over HTTP(S). Needs OpenSSL for https URLs.

#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <semaphore>
#include <string>

#include <json.hpp>

#include "asmplan/error.hpp"
#include "asmplan/item_file.hpp"
#include "asmplan/vlm/client.hpp"
#include "asmplan/vlm/hashing.hpp"

// after Eigen: httplib pulls in <resolv.h>, whose _res macro breaks Eigen
#include <httplib.h>

namespace asmplan::vlm {

struct EndpointConfig {
  std::string base_url;                       // scheme://host[:port]
  std::string path = "/v1/chat/completions";
  std::string model;
  std::string api_key_env = "OPENAI_API_KEY";  // name of the variable, never the key
  double temperature = 0.0;
  double timeout_s = 120.0;
  std::size_t max_in_flight = 2;
};

inline EndpointConfig endpoint_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("endpoint config must be a JSON object");
  EndpointConfig c;
  try {
    c.base_url = j.at("base_url").get<std::string>();
    c.model = j.at("model").get<std::string>();
    c.path = j.value("path", c.path);
    c.api_key_env = j.value("api_key_env", c.api_key_env);
    c.temperature = j.value("temperature", c.temperature);
    c.timeout_s = j.value("timeout_s", c.timeout_s);
    c.max_in_flight = j.value("max_in_flight", c.max_in_flight);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("endpoint config: ") + e.what());
  }
  if (c.base_url.empty() || c.model.empty()) throw ConfigError("endpoint config needs base_url and model");
  if (!(c.timeout_s > 0.0)) throw ConfigError("endpoint timeout must be positive");
  if (c.max_in_flight == 0 || c.max_in_flight > 64) throw ConfigError("max_in_flight must lie in 1..64");
  return c;
}

inline EndpointConfig load_endpoint_config(const std::filesystem::path& path) {
  try {
    return endpoint_config_from_json(read_json_file(path));
  } catch (const ParseError& e) {
    throw ConfigError(e.what());
  }
}

inline std::string image_mime_type(const std::filesystem::path& p) {
  std::string ext = p.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  if (ext == ".webp") return "image/webp";
  if (ext == ".gif") return "image/gif";
  return "image/png";
}

/// OpenAI-style chat completion body: one user message, the prompt text
/// followed by the images as base64 data URLs.
inline nlohmann::json chat_request_body(const VlmRequest& req, const std::string& default_model) {
  nlohmann::json content = nlohmann::json::array();
  content.push_back({{"type", "text"}, {"text", req.text}});
  for (const auto& im : req.images)
    content.push_back({{"type", "image_url"},
                       {"image_url", {{"url", "data:" + image_mime_type(im.path) + ";base64," + base64_encode(read_bytes(im.path))}}}});
  return {{"model", req.model.empty() ? default_model : req.model},
          {"temperature", req.temperature},
          {"messages", nlohmann::json::array({{{"role", "user"}, {"content", content}}})}};
}

class HttpClient : public VlmClient {
 public:
  explicit HttpClient(EndpointConfig config) : config_(std::move(config)), slots_(static_cast<std::ptrdiff_t>(config_.max_in_flight)) {
    const char* key = std::getenv(config_.api_key_env.c_str());
    if (!key || !*key) throw ConfigError("environment variable " + config_.api_key_env + " is not set");
    key_ = key;
  }

  VlmResponse complete(const VlmRequest& request) override {
    const std::string body = chat_request_body(request, config_.model).dump();
    slots_.acquire();
    struct Release {
      std::counting_semaphore<64>& s;
      ~Release() { s.release(); }
    } release{slots_};

    httplib::Client cli(config_.base_url);
    const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::duration<double>(config_.timeout_s));
    cli.set_connection_timeout(timeout);
    cli.set_read_timeout(timeout);
    cli.set_write_timeout(timeout);
    cli.set_bearer_token_auth(key_);
    const auto t0 = std::chrono::steady_clock::now();
    auto res = cli.Post(config_.path, body, "application/json");
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (!res) throw ClientError("request failed: " + httplib::to_string(res.error()), true);
    if (res->status == 429 || res->status >= 500)
      throw ClientError("endpoint returned HTTP " + std::to_string(res->status), true);
    if (res->status < 200 || res->status >= 300)
      throw ClientError("endpoint returned HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200), false);
    auto j = nlohmann::json::parse(res->body, nullptr, false);
    if (j.is_discarded()) throw ClientError("endpoint returned non-JSON body", false);
    VlmResponse out;
    try {
      out.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception&) {
      throw ClientError("response has no choices[0].message.content", false);
    }
    out.usage = j.value("usage", nlohmann::json::object());
    out.latency_ms = ms;
    return out;
  }

 private:
  EndpointConfig config_;
  std::string key_;
  std::counting_semaphore<64> slots_;
};

}  // namespace asmplan::vlm
