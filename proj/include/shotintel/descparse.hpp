#pragma once

#include "shotintel/corpus.hpp"
#include "shotintel/describe.hpp"
#include "shotintel/timestamp.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace shotintel {

struct TabEntry {
  std::optional<std::string> logo;
  std::optional<std::string> text;
  std::optional<std::string> context;
  std::string raw;
  friend bool operator==(const TabEntry&, const TabEntry&) = default;
};

enum class SuspiciousKind { Url, File, Video, Program, Other };

struct SuspiciousElement {
  std::string raw;
  std::vector<std::string> embedded_urls;  // normalized, each passed validate_url
  std::optional<SuspiciousKind> kind_hint;
  friend bool operator==(const SuspiciousElement&, const SuspiciousElement&) = default;
};

/// One heading and the verbatim lines under it, kept for auditing.
struct RawSection {
  std::string section;  // canonical name
  std::string heading;  // the heading line as written
  std::string body;
  friend bool operator==(const RawSection&, const RawSection&) = default;
};

struct ParsedDescription {
  std::string screenshot_id;
  std::string main_content;
  std::vector<std::string> installers;
  std::vector<std::string> explorer_files;
  std::vector<std::string> archive_members;  // names listed under an open archive
  std::vector<std::string> url_entries;
  std::vector<TabEntry> tabs;
  std::vector<std::string> unparsed_tab_lines;
  std::vector<SuspiciousElement> suspicious;
  std::string language;
  std::string date_raw;
  std::optional<CalendarDate> date_parsed;
  std::set<std::string> sections_present;
  bool no_sections_found = false;
  std::string preamble;  // text ahead of the first heading
  std::vector<RawSection> raw_sections;

  bool has_files() const {
    return !installers.empty() || !explorer_files.empty() || !archive_members.empty();
  }
  bool has_web() const { return !tabs.empty() || !url_entries.empty(); }

  friend bool operator==(const ParsedDescription&, const ParsedDescription&) = default;
};

/// Total: never throws. A reply without any recognised heading is kept whole
/// as main_content with no_sections_found set.
ParsedDescription parse_description(const RawDescription& raw);
ParsedDescription parse_reply(std::string_view screenshot_id, std::string_view reply);

/// "- [logo: YouTube] [text: ESET crack] (tutorial video)". Returns nullopt for
/// placeholders and lines without a non-empty logo or text field.
std::optional<TabEntry> parse_tab_line(std::string_view line);

/// Day-first and month-first readings of numeric dates; ambiguous disagreeing
/// readings give nullopt.
std::optional<CalendarDate> parse_reported_date(std::string_view raw);

struct CategoryDecision {
  ScreenshotCategory category = ScreenshotCategory::WebContent;
  bool low_confidence = false;
};

CategoryDecision classify_screenshot(const ParsedDescription& parsed);

/// Maps heading text ("URLs", "### Files/Programs:") to a canonical section
/// name, or nullopt for unknown headings.
std::optional<std::string> canonical_section(std::string_view heading);

nlohmann::json to_json(const ParsedDescription& p);
ParsedDescription parsed_from_json(const nlohmann::json& j);

std::string to_string(SuspiciousKind k);

}  // namespace shotintel
