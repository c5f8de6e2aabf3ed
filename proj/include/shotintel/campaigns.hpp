#pragma once

#include "shotintel/corpus.hpp"
#include "shotintel/descparse.hpp"
#include "shotintel/iocs.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace shotintel {

enum class Theme { CrackedSoftware, GamingMods, Other };
enum class Confidence { Strong, Weak };

std::string to_string(Theme t);
std::string to_string(Confidence c);

struct ThemeLexicon {
  std::vector<std::string> cracked_software;
  std::vector<std::string> gaming_mods;
  std::vector<std::string> distinctive_terms;  // may link screenshots into campaigns
  std::vector<std::string> redirect_hosts;     // landing pages in front of the payload host
  std::map<std::string, std::vector<std::string>> secondary_terms;

  static ThemeLexicon from_json(const nlohmann::json& j);
  static ThemeLexicon load(const std::filesystem::path& path);
  static ThemeLexicon bundled();
};

struct ThemeTag {
  Theme theme = Theme::Other;
  std::vector<std::string> matched_terms;
  Confidence confidence = Confidence::Weak;
  std::vector<std::string> distinctive_terms;  // distinctive terms with a Strong hit

  friend bool operator==(const ThemeTag&, const ThemeTag&) = default;
};

/// Terms hitting retained file names or non-benign URLs are Strong; hits in
/// main content or tab text are Weak. Strong beats Weak, then cracked beats
/// gaming. `files` and `urls` are corpus-wide; only entries sourced from this
/// screenshot are considered.
ThemeTag tag_theme(const ParsedDescription& parsed, const std::vector<FileIoc>& files,
                   const std::vector<UrlIoc>& urls, const ThemeLexicon& lex);

struct ThemeHistogram {
  std::uint64_t total = 0;
  std::map<Theme, std::uint64_t> counts;
  std::map<Theme, double> percent;  // two decimals, over all screenshots
};

ThemeHistogram theme_histogram(const std::vector<ThemeTag>& tags);

/// Everything downstream of parsing, keyed back to the screenshots.
struct Analysis {
  std::vector<ParsedDescription> parsed;
  std::map<std::string, ScreenshotRecord> records;  // optional metadata
  UrlExtraction urls;
  FileExtraction files;
  FilterSummary filter;
  std::map<std::string, ThemeTag> tags;
};

Analysis analyze(std::vector<ParsedDescription> parsed, const std::vector<ScreenshotRecord>& records,
                 const Lexicons& lex, const ThemeLexicon& themes);

enum class IndicatorKind { Domain, FullUrl, FileStem, ThemeTerm };
std::string to_string(IndicatorKind k);

struct Indicator {
  IndicatorKind kind = IndicatorKind::Domain;
  std::string value;
  friend auto operator<=>(const Indicator&, const Indicator&) = default;
};

struct ScreenshotIndicators {
  std::string id;
  std::optional<Timestamp> captured_at;
  std::string language;
  std::set<Indicator> indicators;
};

/// Non-benign URLs give their registered domain, except on shared platforms
/// (video and distribution hosts) where the full URL is used. Retained file
/// stems and Strong distinctive theme terms are added as well.
std::vector<ScreenshotIndicators> build_indicators(const Analysis& analysis, const Lexicons& lex);

struct ClusterParams {
  std::size_t min_cluster_size = 3;
  std::optional<std::int64_t> time_gap_max_seconds;
};

struct CampaignCluster {
  std::string id;
  std::string label;
  std::set<std::string> member_ids;
  std::set<Indicator> shared_indicators;  // held by at least two members
  std::optional<Timestamp> window_start;
  std::optional<Timestamp> window_end;
  std::set<std::string> languages;
  std::size_t size = 0;
};

/// Single-link union-find over shared indicators. Output ordered by size
/// descending, then label.
std::vector<CampaignCluster> cluster_campaigns(const std::vector<ScreenshotIndicators>& screenshots,
                                               const ClusterParams& params = {});

enum class StepKind { SearchLure, VideoOrAd, RedirectPage, DistributionLink, Archive, Executable };
std::string to_string(StepKind k);

struct PlaybookStep {
  StepKind kind = StepKind::SearchLure;
  std::string text;
  std::vector<std::string> evidence;
};

struct CampaignReport {
  CampaignCluster cluster;
  std::vector<PlaybookStep> playbook;
  std::optional<std::int64_t> duration_seconds;
  std::map<Theme, std::uint64_t> themes;
};

CampaignReport campaign_report(const CampaignCluster& cluster, const Analysis& analysis,
                               const ThemeLexicon& themes);

/// Percentage (one decimal) of members whose content mentions any of `terms`.
double minecraft_correlation(const CampaignCluster& cluster, const Analysis& analysis,
                             const std::vector<std::string>& terms);

nlohmann::json to_json(const ThemeTag& t);
nlohmann::json to_json(const ThemeHistogram& h);
nlohmann::json to_json(const CampaignCluster& c);
nlohmann::json to_json(const CampaignReport& r);
std::string to_markdown(const CampaignReport& r);

/// File name for a cluster's Markdown report, derived from its label.
std::string report_file_name(const CampaignCluster& c);

}  // namespace shotintel
