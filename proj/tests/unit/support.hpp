#pragma once

#include "shotintel/backend.hpp"
#include "shotintel/codec.hpp"
#include "shotintel/corpus.hpp"

#include <atomic>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <string>

namespace testing_support {

namespace fs = std::filesystem;

fs::path fixtures();
fs::path oracles();

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  fs::path path_;
};

// Copies a fixture PNG (16x12) and returns its path; `variant` picks one of
// the reference-corpus images so different variants give different hashes.
fs::path copy_png(const fs::path& dir, const std::string& name, int variant = 0);

void write_text(const fs::path& p, const std::string& text);

// Backend answering from a function; counts calls.
class ScriptedBackend : public shotintel::Backend {
 public:
  explicit ScriptedBackend(std::function<std::string(const shotintel::ImagePayload&)> fn) : fn_(std::move(fn)) {}
  std::string submit(const std::string&, const shotintel::ImagePayload& image) override {
    ++calls;
    return fn_(image);
  }
  std::atomic<int> calls{0};

 private:
  std::function<std::string(const shotintel::ImagePayload&)> fn_;
};

// Manual clock: sleeping advances time instantly.
class FakeClock : public shotintel::Clock {
 public:
  std::chrono::steady_clock::time_point now() override {
    std::lock_guard lk(mu_);
    return t_;
  }
  void sleep_for(std::chrono::milliseconds d) override {
    std::lock_guard lk(mu_);
    t_ += d;
    slept += d;
  }
  std::chrono::milliseconds slept{0};

 private:
  std::mutex mu_;
  std::chrono::steady_clock::time_point t_{};
};

std::string eset_reply();

}  // namespace testing_support
