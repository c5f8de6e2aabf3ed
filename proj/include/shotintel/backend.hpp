#pragma once

#include "shotintel/error.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <condition_variable>
#include <deque>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>

namespace shotintel {

enum class PassKind { FullImage, TabStrip };

std::string to_string(PassKind p);
PassKind pass_kind_from_string(std::string_view s);

struct ImagePayload {
  std::string media_type;
  std::string base64;
  std::string source_sha256;  // hash of the original screenshot, not of a crop
  PassKind pass = PassKind::FullImage;
};

/// Raised by backends. `retryable` marks transport errors, HTTP 429 and 5xx.
class BackendError : public Error {
 public:
  BackendError(ErrorCode code, const std::string& message, int http_status, bool retryable)
      : Error(code, message), http_status_(http_status), retryable_(retryable) {}

  int http_status() const noexcept { return http_status_; }
  bool retryable() const noexcept { return retryable_; }

 private:
  int http_status_;
  bool retryable_;
};

/// A vision-LLM endpoint. One prompt and one image in, reply text out.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string submit(const std::string& prompt, const ImagePayload& image) = 0;
};

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds base_backoff{1000};

  /// Delay before attempt `attempt + 1`, given `attempt` failures so far (1-based).
  std::chrono::milliseconds backoff_after(int attempt) const;
};

struct BackendConfig {
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string model = "gpt-4o-mini";
  std::string api_key_env = "VLM_API_KEY";
  int max_in_flight = 4;
  int rpm_cap = 60;
  RetryPolicy retry;
  double temperature = 0.0;
  int timeout_seconds = 120;
};

/// Throws Error(ConfigError) when max_in_flight < 1 or rpm_cap < 1.
void validate(const BackendConfig& config);
nlohmann::json to_json(const BackendConfig& config);
BackendConfig backend_config_from_json(const nlohmann::json& j);

class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::chrono::steady_clock::time_point now() = 0;
  virtual void sleep_for(std::chrono::milliseconds d) = 0;
};

class SystemClock final : public Clock {
 public:
  std::chrono::steady_clock::time_point now() override { return std::chrono::steady_clock::now(); }
  void sleep_for(std::chrono::milliseconds d) override;
};

/// Sliding one-minute window: at most `rpm_cap` acquisitions in any 60 s span.
class RateLimiter {
 public:
  RateLimiter(int rpm_cap, Clock& clock);
  void acquire();

 private:
  int cap_;
  Clock& clock_;
  std::mutex mu_;
  std::deque<std::chrono::steady_clock::time_point> issued_;
};

/// Canned replies from `<dir>/<sha256>.<PassKind>.txt`; full-image passes also
/// accept `<dir>/<sha256>.txt`. A miss is a non-retryable BackendUnavailable.
class FixtureBackend final : public Backend {
 public:
  explicit FixtureBackend(std::filesystem::path dir) : dir_(std::move(dir)) {}
  std::string submit(const std::string& prompt, const ImagePayload& image) override;

 private:
  std::filesystem::path dir_;
};

/// OpenAI-compatible chat completions over HTTP(S). The API key is read from
/// the environment variable named in the config at each request.
class OpenAiBackend final : public Backend {
 public:
  explicit OpenAiBackend(BackendConfig config);
  std::string submit(const std::string& prompt, const ImagePayload& image) override;

  /// Request body for one prompt + one image, exposed for wire-format tests.
  static nlohmann::json request_body(const BackendConfig& config, const std::string& prompt,
                                     const ImagePayload& image);
  /// Extracts choices[0].message.content (string or array of text parts).
  static std::string reply_text(const nlohmann::json& response);

 private:
  BackendConfig config_;
};

/// Applies the in-flight cap, the rate limiter and the retry policy around
/// another backend. Only retryable BackendErrors are retried.
class GatedBackend final : public Backend {
 public:
  GatedBackend(Backend& inner, const BackendConfig& config, Clock& clock);
  std::string submit(const std::string& prompt, const ImagePayload& image) override;

  int max_observed_in_flight() const;

 private:
  Backend& inner_;
  RetryPolicy retry_;
  Clock& clock_;
  RateLimiter limiter_;
  int max_in_flight_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  int in_flight_ = 0;
  int peak_ = 0;
};

}  // namespace shotintel
