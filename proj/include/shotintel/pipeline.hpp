#pragma once

#include "shotintel/backend.hpp"
#include "shotintel/campaigns.hpp"
#include "shotintel/corpus.hpp"
#include "shotintel/describe.hpp"
#include "shotintel/evalkit.hpp"
#include "shotintel/iocs.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace shotintel {

enum class BackendKind { Live, Fixture };

struct PipelineConfig {
  std::filesystem::path corpus_dir;
  std::optional<std::filesystem::path> cache_dir;  // defaults to <corpus_dir>/cache
  BackendKind backend_kind = BackendKind::Fixture;
  std::optional<std::filesystem::path> fixture_dir;
  BackendConfig backend;
  std::string prompt_version = "v1";
  std::filesystem::path lexicon_path;  // empty: bundled
  std::filesystem::path theme_lexicon_path;
  ClusterParams clustering;
  SampleParams sampling;
  std::optional<std::filesystem::path> consensus_scores;  // consensus CSV for the eval section
  std::filesystem::path output_dir = "out";
  bool tab_strip = false;
  double tab_strip_fraction = 0.10;
  int workers = 1;

  static PipelineConfig from_json(const nlohmann::json& j, const std::filesystem::path& base = {});
  static PipelineConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
  /// SHA-256 of the canonical (sorted-key, compact) JSON form.
  std::string hash() const;
  /// Throws Error(ConfigError) for missing paths or invalid parameters.
  void validate(bool needs_backend = true) const;

  std::filesystem::path effective_cache_dir() const;
  std::filesystem::path parsed_dir() const { return output_dir / "parsed"; }
  std::string model_id() const;
};

/// A failure inside one stage, tied to the screenshot it happened on.
class StageError : public Error {
 public:
  StageError(std::string stage, std::string screenshot_id, const Error& cause)
      : Error(cause.code(), stage + " [" + screenshot_id + "]: " + cause.what()),
        stage_(std::move(stage)),
        screenshot_id_(std::move(screenshot_id)) {}
  const std::string& stage() const noexcept { return stage_; }
  const std::string& screenshot_id() const noexcept { return screenshot_id_; }

 private:
  std::string stage_;
  std::string screenshot_id_;
};

/// Owns a backend and whatever it needs to stay alive (clock, gate).
class BackendHandle {
 public:
  static BackendHandle make(const PipelineConfig& config);
  Backend& get() { return *outer_; }

 private:
  std::unique_ptr<Clock> clock_;
  std::unique_ptr<Backend> inner_;
  std::unique_ptr<Backend> outer_owned_;
  Backend* outer_ = nullptr;
};

struct CorpusSection {
  std::uint64_t n_records = 0;
  std::uint64_t n_parsed = 0;
  std::uint64_t n_no_sections = 0;
  std::uint64_t n_low_confidence = 0;
  std::map<ScreenshotCategory, std::uint64_t> categories;
  FamilyTable families;
};

struct CampaignSection {
  CampaignReport report;
  std::map<std::string, double> secondary_correlation;  // term set name -> percent
};

struct EvalSection {
  AggregateTable aggregate;
  FailureBreakdown failures;
};

struct RunReport {
  std::string tool_version;
  std::string config_hash;
  CorpusSection corpus;
  UrlStats urls;
  FileCounts file_counts;
  FilterSummary file_filter;
  std::map<ExtensionClass, std::uint64_t> extensions;
  ThemeHistogram themes;
  std::vector<CampaignSection> campaigns;
  std::optional<std::vector<std::string>> sample;  // absent when the corpus is too small
  std::optional<EvalSection> eval;

  Analysis analysis;  // not serialized; feeds the IoC exports
};

std::string tool_version();

/// Answers nothing: every call fails with BackendUnavailable. Lets a stage
/// run from the description cache alone.
class CacheOnlyBackend final : public Backend {
 public:
  std::string submit(const std::string& prompt, const ImagePayload& image) override;
};

/// Fills the description cache (and the tab-strip pass when enabled) without
/// parsing. Returns the number of replies that came from the backend.
std::size_t describe_corpus(const PipelineConfig& config, const CorpusStore& store, Backend& backend);

/// Describes (cache first) and parses every record, writing parsed/<id>.json.
/// The first failure is rethrown as a StageError once all records were tried.
std::vector<ParsedDescription> describe_and_parse(const PipelineConfig& config, const CorpusStore& store,
                                                  Backend& backend);

/// Reads parsed/<id>.json for every record. Throws Error(CorpusNotParsed).
std::vector<ParsedDescription> load_parsed(const PipelineConfig& config, const CorpusStore& store);

RunReport build_report(const PipelineConfig& config, const std::vector<ScreenshotRecord>& records,
                       std::vector<ParsedDescription> parsed);

/// describe -> parse -> extract -> tag -> cluster -> report. Uses `backend`
/// when given, otherwise one built from the config.
RunReport run_pipeline(const PipelineConfig& config, Backend* backend = nullptr);

nlohmann::json to_json(const RunReport& r);
std::string report_to_markdown(const RunReport& r);
std::string report_to_csv(const RunReport& r);

enum class ReportFormat { Json, Csv, Markdown };

/// Writes report.json / report.csv / report.md into `dir`, plus provenance.json
/// (timestamps live there so report.json stays byte-stable).
std::vector<std::filesystem::path> emit_report(const RunReport& r, const std::set<ReportFormat>& formats,
                                               const std::filesystem::path& dir);

/// urls.csv, files.csv, campaigns.json and reports/campaigns/<label>.md.
std::vector<std::filesystem::path> emit_artifacts(const RunReport& r, const std::filesystem::path& dir);

}  // namespace shotintel
