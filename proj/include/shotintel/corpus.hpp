#pragma once

#include "shotintel/timestamp.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace shotintel {

enum class ScreenshotCategory { WebContent, FileSystem, Hybrid };

std::string to_string(ScreenshotCategory c);
std::optional<ScreenshotCategory> category_from_string(std::string_view s);

/// A second manifest entry whose image bytes matched an already stored record.
struct ProvenanceAlias {
  std::string id;
  std::string log_id;
  std::string path;
  friend bool operator==(const ProvenanceAlias&, const ProvenanceAlias&) = default;
};

struct ScreenshotRecord {
  std::string id;
  std::string path;
  std::string sha256;
  std::string family;
  std::string log_id;
  std::optional<Timestamp> captured_at;
  std::optional<std::string> language_hint;
  std::optional<ScreenshotCategory> category;
  bool commercial_watermark = false;
  nlohmann::json extra = nlohmann::json::object();  // unknown manifest keys, verbatim
  std::vector<ProvenanceAlias> aliases;

  friend bool operator==(const ScreenshotRecord& a, const ScreenshotRecord& b);
};

nlohmann::json record_to_json(const ScreenshotRecord& r);
ScreenshotRecord record_from_json(const nlohmann::json& j);

struct ManifestIssue {
  std::size_t line = 0;
  std::string message;
};

struct CorpusSummary {
  std::size_t ingested = 0;
  std::size_t skipped = 0;
  std::size_t duplicates = 0;
  std::vector<ManifestIssue> issues;
};

struct IngestOptions {
  bool allow_missing = false;
};

/// Append-only screenshot store: `records.jsonl` holds one JSON document per
/// line (records and alias entries), `records.idx` maps id to byte offset.
/// Single writer, any number of readers.
class CorpusStore {
 public:
  explicit CorpusStore(std::filesystem::path directory);

  /// Malformed lines are reported in the summary and skipped. A missing image
  /// (without allow_missing) or an id reused for different bytes throws.
  CorpusSummary ingest_manifest(const std::filesystem::path& manifest,
                                const std::filesystem::path& image_root,
                                const IngestOptions& options = {});

  /// Reads the record through the on-disk index. Alias ids resolve to the
  /// record they were merged into.
  std::optional<ScreenshotRecord> load(std::string_view id) const;

  /// All canonical records in append order, aliases merged.
  std::vector<ScreenshotRecord> records() const;

  std::size_t size() const { return order_.size(); }
  const std::filesystem::path& directory() const { return dir_; }

 private:
  void reload();
  void append_line(const std::string& canonical_id, const nlohmann::json& doc);

  std::filesystem::path dir_;
  std::vector<std::string> order_;
  std::map<std::string, ScreenshotRecord, std::less<>> by_id_;
  std::map<std::string, std::string, std::less<>> alias_to_id_;
  std::map<std::string, std::string, std::less<>> sha_to_id_;
  std::map<std::string, std::uint64_t, std::less<>> offsets_;
};

struct EncodedImage {
  std::string media_type;
  std::string base64;
};

EncodedImage encode_image(const ScreenshotRecord& record);

struct FamilyCounts {
  std::string family;
  std::uint64_t n_logs = 0;
  std::uint64_t n_with_screenshot = 0;
  std::uint64_t n_non_commercial = 0;
};

struct FamilyStats {
  std::string family;
  std::uint64_t n_logs = 0;
  std::uint64_t n_with_screenshot = 0;
  std::uint64_t n_non_commercial = 0;
  double pct_non_commercial = 0.0;  // two decimals, 100 * non_commercial / logs
};

struct FamilyTable {
  std::vector<FamilyStats> rows;
  FamilyStats total;
};

/// Throws Error(InconsistentCounts) unless non_commercial <= with_screenshot <= logs.
FamilyTable family_stats(const std::vector<FamilyCounts>& rows);

/// Counts derivable from a stored corpus alone. Every stored log has a
/// screenshot, so n_logs == n_with_screenshot here; a record without log id
/// counts as its own log.
std::vector<FamilyCounts> family_counts(const std::vector<ScreenshotRecord>& records);

}  // namespace shotintel
