#include "shotintel/backend.hpp"

#include "shotintel/codec.hpp"

#include <thread>

namespace shotintel {

std::string to_string(PassKind p) { return p == PassKind::TabStrip ? "TabStrip" : "FullImage"; }

PassKind pass_kind_from_string(std::string_view s) {
  if (s == "TabStrip") return PassKind::TabStrip;
  if (s == "FullImage") return PassKind::FullImage;
  throw Error(ErrorCode::ConfigError, "unknown pass kind '" + std::string(s) + "'");
}

std::chrono::milliseconds RetryPolicy::backoff_after(int attempt) const {
  auto delay = base_backoff;
  for (int i = 1; i < attempt; ++i) delay *= 2;
  return delay;
}

void validate(const BackendConfig& config) {
  if (config.max_in_flight < 1) throw Error(ErrorCode::ConfigError, "max_in_flight must be >= 1");
  if (config.rpm_cap < 1) throw Error(ErrorCode::ConfigError, "rpm_cap must be >= 1");
  if (config.retry.max_attempts < 1)
    throw Error(ErrorCode::ConfigError, "retry.max_attempts must be >= 1");
}

nlohmann::json to_json(const BackendConfig& c) {
  return {{"endpoint", c.endpoint},
          {"model", c.model},
          {"api_key_env", c.api_key_env},
          {"max_in_flight", c.max_in_flight},
          {"rpm_cap", c.rpm_cap},
          {"retry", {{"max_attempts", c.retry.max_attempts},
                     {"base_backoff_ms", c.retry.base_backoff.count()}}},
          {"temperature", c.temperature},
          {"timeout_seconds", c.timeout_seconds}};
}

BackendConfig backend_config_from_json(const nlohmann::json& j) {
  BackendConfig c;
  c.endpoint = j.value("endpoint", c.endpoint);
  c.model = j.value("model", c.model);
  c.api_key_env = j.value("api_key_env", c.api_key_env);
  c.max_in_flight = j.value("max_in_flight", c.max_in_flight);
  c.rpm_cap = j.value("rpm_cap", c.rpm_cap);
  if (auto it = j.find("retry"); it != j.end()) {
    c.retry.max_attempts = it->value("max_attempts", c.retry.max_attempts);
    c.retry.base_backoff =
        std::chrono::milliseconds(it->value("base_backoff_ms", c.retry.base_backoff.count()));
  }
  c.temperature = j.value("temperature", c.temperature);
  c.timeout_seconds = j.value("timeout_seconds", c.timeout_seconds);
  validate(c);
  return c;
}

void SystemClock::sleep_for(std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }

RateLimiter::RateLimiter(int rpm_cap, Clock& clock) : cap_(rpm_cap), clock_(clock) {
  if (cap_ < 1) throw Error(ErrorCode::ConfigError, "rpm_cap must be >= 1");
}

void RateLimiter::acquire() {
  using namespace std::chrono;
  std::lock_guard lock(mu_);
  for (;;) {
    auto now = clock_.now();
    while (!issued_.empty() && now - issued_.front() >= minutes(1)) issued_.pop_front();
    if (static_cast<int>(issued_.size()) < cap_) {
      issued_.push_back(now);
      return;
    }
    auto wait = duration_cast<milliseconds>(issued_.front() + minutes(1) - now) + milliseconds(1);
    clock_.sleep_for(wait);
  }
}

std::string FixtureBackend::submit(const std::string&, const ImagePayload& image) {
  auto specific = dir_ / (image.source_sha256 + "." + to_string(image.pass) + ".txt");
  if (std::filesystem::is_regular_file(specific)) return read_text_file(specific);
  if (image.pass == PassKind::FullImage) {
    auto plain = dir_ / (image.source_sha256 + ".txt");
    if (std::filesystem::is_regular_file(plain)) return read_text_file(plain);
  }
  throw BackendError(ErrorCode::BackendUnavailable,
                     "no canned response for " + image.source_sha256 + " (" +
                         to_string(image.pass) + ")",
                     0, false);
}

GatedBackend::GatedBackend(Backend& inner, const BackendConfig& config, Clock& clock)
    : inner_(inner),
      retry_(config.retry),
      clock_(clock),
      limiter_(config.rpm_cap, clock),
      max_in_flight_(config.max_in_flight) {
  validate(config);
}

int GatedBackend::max_observed_in_flight() const {
  std::lock_guard lock(mu_);
  return peak_;
}

std::string GatedBackend::submit(const std::string& prompt, const ImagePayload& image) {
  {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return in_flight_ < max_in_flight_; });
    ++in_flight_;
    peak_ = std::max(peak_, in_flight_);
  }
  struct Release {
    GatedBackend& self;
    ~Release() {
      {
        std::lock_guard lock(self.mu_);
        --self.in_flight_;
      }
      self.cv_.notify_one();
    }
  } release{*this};

  for (int attempt = 1;; ++attempt) {
    limiter_.acquire();
    try {
      return inner_.submit(prompt, image);
    } catch (const BackendError& e) {
      if (!e.retryable() || attempt >= retry_.max_attempts) throw;
      clock_.sleep_for(retry_.backoff_after(attempt));
    }
  }
}

}  // namespace shotintel
