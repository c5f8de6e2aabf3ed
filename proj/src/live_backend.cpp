#include "shotintel/backend.hpp"

#include <httplib.h>

#include <cstdlib>

namespace shotintel {

using nlohmann::json;

OpenAiBackend::OpenAiBackend(BackendConfig config) : config_(std::move(config)) {
  validate(config_);
}

json OpenAiBackend::request_body(const BackendConfig& config, const std::string& prompt,
                                 const ImagePayload& image) {
  json text_part = {{"type", "text"}, {"text", prompt}};
  json image_part = {
      {"type", "image_url"},
      {"image_url", {{"url", "data:" + image.media_type + ";base64," + image.base64}}}};
  return {{"model", config.model},
          {"temperature", config.temperature},
          {"messages", json::array({{{"role", "user"}, {"content", {text_part, image_part}}}})}};
}

std::string OpenAiBackend::reply_text(const json& response) {
  const auto& choices = response.at("choices");
  if (!choices.is_array() || choices.empty()) return {};
  const auto& content = choices.at(0).at("message").at("content");
  if (content.is_string()) return content.get<std::string>();
  std::string out;
  if (content.is_array())
    for (const auto& part : content)
      if (part.value("type", "") == "text") out += part.value("text", "");
  return out;
}

std::string OpenAiBackend::submit(const std::string& prompt, const ImagePayload& image) {
  const auto& url = config_.endpoint;
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw BackendError(ErrorCode::BackendUnavailable, "endpoint must be an absolute URL", 0, false);
  auto path_start = url.find('/', scheme_end + 3);
  std::string origin = url.substr(0, path_start);
  std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

  httplib::Client client(origin);
  client.set_connection_timeout(config_.timeout_seconds, 0);
  client.set_read_timeout(config_.timeout_seconds, 0);
  client.set_write_timeout(config_.timeout_seconds, 0);
  httplib::Headers headers;
  if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key)
    headers.emplace("Authorization", std::string("Bearer ") + key);

  auto body = request_body(config_, prompt, image).dump();
  auto res = client.Post(path, headers, body, "application/json");
  if (!res)
    throw BackendError(ErrorCode::BackendUnavailable,
                       "transport error: " + httplib::to_string(res.error()), 0, true);
  if (res->status == 429)
    throw BackendError(ErrorCode::RateLimited, "HTTP 429 from " + origin, 429, true);
  if (res->status >= 500)
    throw BackendError(ErrorCode::BackendUnavailable,
                       "HTTP " + std::to_string(res->status) + " from " + origin, res->status, true);
  if (res->status != 200)
    throw BackendError(ErrorCode::BackendUnavailable,
                       "HTTP " + std::to_string(res->status) + ": " + res->body, res->status, false);
  try {
    return reply_text(json::parse(res->body));
  } catch (const json::exception& e) {
    throw BackendError(ErrorCode::BackendUnavailable,
                       std::string("unparseable completion: ") + e.what(), res->status, false);
  }
}

}  // namespace shotintel
