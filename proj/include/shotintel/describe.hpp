#pragma once

#include "shotintel/backend.hpp"
#include "shotintel/corpus.hpp"
#include "shotintel/prompt.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace shotintel {

struct RawDescription {
  std::string screenshot_id;
  std::string model_id;
  std::string prompt_version;
  PassKind pass_kind = PassKind::FullImage;
  std::string text;
  std::string obtained_at;  // RFC 3339, UTC
  bool from_cache = false;
};

struct CacheKey {
  std::string sha256;
  std::string prompt_version;
  std::string model_id;
  PassKind pass = PassKind::FullImage;
};

/// Content-addressed reply cache:
///   <root>/<sha256>/<prompt_version>/<model_id>/<pass_kind>.txt (+ .meta.json)
/// Writers publish through temp-file + rename, so concurrent writers are safe.
class DescriptionCache {
 public:
  explicit DescriptionCache(std::filesystem::path root) : root_(std::move(root)) {}

  std::filesystem::path entry_path(const CacheKey& key) const;
  std::optional<std::string> get(const CacheKey& key, nlohmann::json* meta = nullptr) const;
  void put(const CacheKey& key, const std::string& reply, const nlohmann::json& meta) const;

  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path root_;
};

struct DescribeOptions {
  std::string model_id = "gpt-4o-mini";
  double temperature = 0.0;
  double tab_strip_fraction = 0.10;
  int workers = 1;  // concurrent describe() calls in describe_all
};

struct DescribeOutcome {
  std::string screenshot_id;
  std::optional<RawDescription> description;
  std::optional<Error> error;
};

class Describer {
 public:
  Describer(Backend& backend, DescriptionCache cache, DescribeOptions options = {});

  /// Cache first; on a miss issues exactly one backend request (the backend may
  /// retry internally). Throws EmptyReply when the model returns only whitespace.
  RawDescription describe(const ScreenshotRecord& record, const PromptTemplate& prompt,
                          PassKind pass = PassKind::FullImage);

  /// Sends rows [0, ceil(fraction * height)) of the image. Throws ImageTooSmall
  /// for images under 10 rows.
  RawDescription describe_tab_strip(const ScreenshotRecord& record, const PromptTemplate& prompt);

  /// Results in input order; failures are captured per screenshot.
  std::vector<DescribeOutcome> describe_all(const std::vector<ScreenshotRecord>& records,
                                            const PromptTemplate& prompt, PassKind pass);

  const DescriptionCache& cache() const { return cache_; }

 private:
  Backend& backend_;
  DescriptionCache cache_;
  DescribeOptions options_;
};

std::string utc_now_rfc3339();

}  // namespace shotintel
