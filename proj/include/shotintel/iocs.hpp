#pragma once

#include "shotintel/descparse.hpp"
#include "shotintel/url.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace shotintel {

enum class UrlCategory { VideoPlatform, FileDistribution, OtherDomain, Benign };
enum class UrlSource { Url, Suspicious, MainContent };
enum class ExtensionClass { Exe, Zip, Rar, Dll, Other, None };
enum class FileRole { Installer, ExplorerFile, ArchiveMember, Download };

std::string to_string(UrlCategory c);
std::string to_string(UrlSource s);
std::string to_string(ExtensionClass e);
std::string to_string(FileRole r);

struct Lexicons {
  std::vector<std::string> benign_hosts;
  std::vector<std::string> video_hosts;
  std::vector<std::string> distribution_hosts;
  std::vector<std::string> generic_name_patterns;  // fnmatch globs, case-insensitive

  /// Throws Error(ConfigError) when the host sets overlap.
  void validate() const;

  static Lexicons from_json(const nlohmann::json& j);
  static Lexicons load(const std::filesystem::path& path);
  static Lexicons bundled();
};

/// True when host equals an entry or is a subdomain of one.
bool host_in(std::string_view host, const std::vector<std::string>& hosts);

UrlCategory categorize_host(std::string_view host, const Lexicons& lex);

struct UrlIoc {
  std::string raw;  // lexicographically first spelling seen
  std::string normalized;
  std::string host;
  std::string registered_domain;
  UrlCategory category = UrlCategory::OtherDomain;
  bool truncated = false;
  std::set<std::string> source_ids;
  std::set<UrlSource> source_sections;
  bool suspicious_corroborated = false;

  friend bool operator==(const UrlIoc&, const UrlIoc&) = default;
};

struct UrlStats {
  std::uint64_t total_unique = 0;
  std::uint64_t benign = 0;
  std::uint64_t truncated = 0;
  std::uint64_t actionable = 0;
  std::uint64_t video = 0;
  std::uint64_t distribution = 0;
  std::uint64_t other = 0;
  std::uint64_t rejected_candidates = 0;  // URL-section lines that never validated

  friend bool operator==(const UrlStats&, const UrlStats&) = default;
};

struct UrlExtraction {
  std::vector<UrlIoc> urls;  // sorted by normalized form
  UrlStats stats;
};

UrlExtraction extract_urls(const std::vector<ParsedDescription>& corpus, const Lexicons& lex);

/// Every URL of one screenshot, validated and normalized.
std::vector<ValidatedUrl> urls_of(const ParsedDescription& parsed);

struct FileIoc {
  std::string name;
  std::string stem;
  ExtensionClass extension_class = ExtensionClass::None;
  std::set<FileRole> roles;
  bool generic = false;
  bool suspicious_corroborated = false;  // matched in the same screenshot's suspicious text
  bool weakly_corroborated = false;      // matched only elsewhere in the corpus
  bool retained = false;
  std::set<std::string> source_ids;
  std::uint64_t occurrences = 0;

  friend bool operator==(const FileIoc&, const FileIoc&) = default;
};

struct FileCounts {
  std::uint64_t installer = 0;
  std::uint64_t other = 0;
  std::uint64_t total() const { return installer + other; }
  friend bool operator==(const FileCounts&, const FileCounts&) = default;
};

struct FileExtraction {
  std::vector<FileIoc> files;  // sorted by name
  FileCounts counts;
};

ExtensionClass extension_class_of(std::string_view name);
std::string file_stem(std::string_view name);
bool is_generic_name(std::string_view name, const std::vector<std::string>& patterns);

FileExtraction extract_files(const std::vector<ParsedDescription>& corpus);

struct FilterSummary {
  std::uint64_t corroborated_names = 0;
  std::uint64_t retained_names = 0;
  std::uint64_t retained_occurrences = 0;
  friend bool operator==(const FilterSummary&, const FilterSummary&) = default;
};

/// Two-stage filter over extract_files output: corroboration against the
/// suspicious sections, then the generic-name patterns.
FilterSummary filter_files(std::vector<FileIoc>& files,
                           const std::vector<ParsedDescription>& corpus, const Lexicons& lex);

/// Counts over unique retained names.
std::map<ExtensionClass, std::uint64_t> extension_breakdown(const std::vector<FileIoc>& files);

std::string urls_to_csv(const std::vector<UrlIoc>& urls);
std::string files_to_csv(const std::vector<FileIoc>& files);

nlohmann::json to_json(const UrlStats& s);
nlohmann::json to_json(const UrlIoc& u);
nlohmann::json to_json(const FileIoc& f);

}  // namespace shotintel
