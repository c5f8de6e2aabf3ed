#include "shotintel/descparse.hpp"

#include "shotintel/prompt.hpp"
#include "shotintel/text.hpp"
#include "shotintel/url.hpp"

#include <map>
#include <regex>

namespace shotintel {

using nlohmann::json;

namespace {

const std::map<std::string, std::string, std::less<>> kHeadingAliases = {
    {"main content", "Main Content"},
    {"main contents", "Main Content"},
    {"content", "Main Content"},
    {"files/programs", "Files/Programs"},
    {"files / programs", "Files/Programs"},
    {"files/program", "Files/Programs"},
    {"files and programs", "Files/Programs"},
    {"files", "Files/Programs"},
    {"programs", "Files/Programs"},
    {"url", "URL"},
    {"urls", "URL"},
    {"url(s)", "URL"},
    {"links", "URL"},
    {"browser tabs analysis", "Browser Tabs Analysis"},
    {"browser tab analysis", "Browser Tabs Analysis"},
    {"browser tabs", "Browser Tabs Analysis"},
    {"tabs", "Browser Tabs Analysis"},
    {"suspicious elements", "Suspicious Elements"},
    {"suspicious element", "Suspicious Elements"},
    {"suspicious", "Suspicious Elements"},
    {"language and date", "Language and Date"},
    {"language & date", "Language and Date"},
    {"language/date", "Language and Date"},
};

bool is_placeholder(std::string_view s) {
  auto t = text::trim(s);
  return t == "X" || t == "\"X\"";
}

// Strips "- ", "* ", "• " and "1. " / "1) " list markers.
std::string_view strip_list_marker(std::string_view line) {
  auto s = text::trim(line);
  if (s.substr(0, 3) == "\xE2\x80\xA2") return text::trim(s.substr(3));
  if (!s.empty() && (s[0] == '-' || s[0] == '*') && (s.size() == 1 || text::is_space(s[1])))
    return text::trim(s.substr(1));
  std::size_t i = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  if (i > 0 && i < s.size() && (s[i] == '.' || s[i] == ')') &&
      (i + 1 == s.size() || text::is_space(s[i + 1])))
    return text::trim(s.substr(i + 1));
  return s;
}

bool has_list_marker(std::string_view line) { return strip_list_marker(line) != text::trim(line); }

std::string strip_emphasis(std::string_view s) {
  std::string out;
  for (char c : s)
    if (c != '*') out.push_back(c);
  return std::string(text::trim(out));
}

std::string clean_name(std::string_view s) {
  auto t = text::trim(s);
  while (!t.empty() && (t.front() == '"' || t.front() == '\'' || t.front() == '`'))
    t.remove_prefix(1);
  while (!t.empty() && (t.back() == '"' || t.back() == '\'' || t.back() == '`'))
    t.remove_suffix(1);
  return strip_emphasis(t);
}

void append_names(std::string_view value, std::vector<std::string>& out) {
  if (is_placeholder(value)) return;
  for (auto& part : text::split(value, ',')) {
    auto name = clean_name(part);
    if (name.empty() || name == "X") continue;
    out.push_back(name);
  }
}

bool names_archive(std::string_view prose) {
  auto lower = text::to_lower(prose);
  for (std::string_view needle : {".zip", ".rar", ".7z", "archive"})
    if (lower.find(needle) != std::string::npos) return true;
  return false;
}

struct HeadingMatch {
  std::string section;
  std::string preamble;  // label text ahead of the hashes, e.g. "Content:"
  std::string heading;
};

std::optional<HeadingMatch> match_heading(std::string_view line) {
  auto t = text::trim(line);
  auto hash = t.find('#');
  if (hash == std::string_view::npos) return std::nullopt;
  std::string preamble;
  if (hash > 0) {
    // Only "Label: ### Heading" counts; a '#' deep inside prose does not.
    auto label = text::trim(t.substr(0, hash));
    if (label.empty() || label.back() != ':' || label.size() > 24) return std::nullopt;
    for (char c : label.substr(0, label.size() - 1))
      if (!(std::isalpha(static_cast<unsigned char>(c)) || c == ' ')) return std::nullopt;
    if (t.substr(hash, 2) != "##") return std::nullopt;
    preamble = std::string(label);
  }
  auto heading = t.substr(hash);
  auto name = canonical_section(heading);
  if (!name) return std::nullopt;
  return HeadingMatch{*name, preamble, std::string(heading)};
}

void parse_files(const std::string& body, ParsedDescription& out) {
  enum class Target { None, Installer, Explorer, Archive } target = Target::None;
  for (const auto& raw_line : text::split_lines(body)) {
    auto line = strip_list_marker(raw_line);
    if (line.empty() || is_placeholder(line)) continue;
    auto plain = strip_emphasis(line);
    std::string_view view = plain;
    auto colon = view.find(':');
    if (text::istarts_with(view, "installer") && colon != std::string_view::npos) {
      target = Target::Installer;
      append_names(view.substr(colon + 1), out.installers);
      continue;
    }
    if (text::istarts_with(view, "file explorer") && colon != std::string_view::npos) {
      target = Target::Explorer;
      auto value = text::trim(view.substr(colon + 1));
      auto inner = value.find(':');
      if (inner != std::string_view::npos && inner > 1 && names_archive(value.substr(0, inner)) &&
          value.substr(0, inner).find(',') == std::string_view::npos) {
        append_names(value.substr(inner + 1), out.archive_members);
      } else {
        append_names(value, out.explorer_files);
      }
      continue;
    }
    if (colon != std::string_view::npos && colon > 1 && names_archive(view.substr(0, colon)) &&
        view.substr(0, colon).find(',') == std::string_view::npos) {
      target = Target::Archive;
      append_names(view.substr(colon + 1), out.archive_members);
      continue;
    }
    switch (target) {
      case Target::Installer: append_names(view, out.installers); break;
      case Target::Archive: append_names(view, out.archive_members); break;
      default: append_names(view, out.explorer_files); break;
    }
  }
}

void parse_urls(const std::string& body, ParsedDescription& out) {
  for (const auto& raw_line : text::split_lines(body)) {
    auto entry = strip_list_marker(raw_line);
    if (entry.empty() || is_placeholder(entry)) continue;
    out.url_entries.emplace_back(entry);
  }
}

void parse_tabs(const std::string& body, ParsedDescription& out) {
  for (const auto& raw_line : text::split_lines(body)) {
    auto line = text::trim(raw_line);
    if (line.empty() || is_placeholder(strip_list_marker(line))) continue;
    if (auto tab = parse_tab_line(line))
      out.tabs.push_back(std::move(*tab));
    else
      out.unparsed_tab_lines.emplace_back(line);
  }
}

std::optional<SuspiciousKind> kind_of(const SuspiciousElement& e) {
  if (!e.embedded_urls.empty()) return SuspiciousKind::Url;
  auto lower = text::to_lower(e.raw);
  static const std::regex file_re(R"([\w@\-]+\.(exe|zip|rar|7z|dll|msi|iso|jar|bat|scr)\b)");
  if (std::regex_search(lower, file_re)) return SuspiciousKind::File;
  if (text::contains_word(lower, "video") || text::contains_word(lower, "youtube"))
    return SuspiciousKind::Video;
  for (std::string_view w : {"program", "installer", "software", "application", "executable"})
    if (text::contains_word(lower, w)) return SuspiciousKind::Program;
  return SuspiciousKind::Other;
}

void parse_suspicious(const std::string& body, ParsedDescription& out) {
  std::vector<std::string> items;
  bool after_blank = true;
  for (const auto& raw_line : text::split_lines(body)) {
    auto line = text::trim(raw_line);
    if (line.empty()) {
      after_blank = true;
      continue;
    }
    if (has_list_marker(line) || items.empty() || after_blank) {
      items.emplace_back(strip_list_marker(line));
    } else {
      items.back() += " ";
      items.back() += line;
    }
    after_blank = false;
  }
  for (auto& item : items) {
    if (item.empty() || is_placeholder(item)) continue;
    SuspiciousElement e;
    e.raw = item;
    for (const auto& token : find_url_tokens(item))
      if (auto url = validate_url(token)) e.embedded_urls.push_back(url->normalized);
    e.kind_hint = kind_of(e);
    out.suspicious.push_back(std::move(e));
  }
}

void parse_language_date(const std::string& body, ParsedDescription& out) {
  for (const auto& raw_line : text::split_lines(body)) {
    auto line = strip_emphasis(strip_list_marker(raw_line));
    std::string_view view = line;
    auto colon = view.find(':');
    if (colon == std::string_view::npos) continue;
    auto label = text::to_lower(text::trim(view.substr(0, colon)));
    auto value = std::string(text::trim(view.substr(colon + 1)));
    if (is_placeholder(value)) value.clear();
    if (label == "language")
      out.language = value;
    else if (label == "date")
      out.date_raw = value;
  }
  out.date_parsed = parse_reported_date(out.date_raw);
}

std::string join_trimmed(const std::string& body) {
  auto t = text::trim(body);
  return is_placeholder(t) ? std::string() : std::string(t);
}

}  // namespace

std::optional<std::string> canonical_section(std::string_view heading) {
  auto t = text::trim(heading);
  while (!t.empty() && t.front() == '#') t.remove_prefix(1);
  auto name = strip_emphasis(t);
  std::string_view v = name;
  while (!v.empty() && (v.back() == ':' || text::is_space(v.back()))) v.remove_suffix(1);
  std::string key;
  for (char c : text::to_lower(v)) {
    if (text::is_space(c)) {
      if (!key.empty() && key.back() != ' ') key.push_back(' ');
    } else {
      key.push_back(c);
    }
  }
  auto it = kHeadingAliases.find(key);
  if (it == kHeadingAliases.end()) return std::nullopt;
  return it->second;
}

std::optional<TabEntry> parse_tab_line(std::string_view line) {
  auto s = strip_list_marker(line);
  if (s.empty() || is_placeholder(s)) return std::nullopt;
  TabEntry tab;
  tab.raw = std::string(text::trim(line));
  bool any_field = false;
  std::size_t pos = 0;
  std::size_t last_close = 0;
  auto meaningful = [](std::string_view v) -> std::optional<std::string> {
    auto t = text::trim(v);
    if (t.empty() || t == "?" || t == "X" || text::iequals(t, "n/a") || text::iequals(t, "none"))
      return std::nullopt;
    return std::string(t);
  };
  while ((pos = s.find('[', pos)) != std::string_view::npos) {
    auto close = s.find(']', pos);
    if (close == std::string_view::npos) return std::nullopt;
    auto inner = s.substr(pos + 1, close - pos - 1);
    auto colon = inner.find(':');
    if (colon != std::string_view::npos) {
      auto key = text::to_lower(text::trim(inner.substr(0, colon)));
      auto value = inner.substr(colon + 1);
      if (key == "logo") {
        tab.logo = meaningful(value);
        any_field = true;
      } else if (key == "text") {
        tab.text = meaningful(value);
        any_field = true;
      }
    }
    last_close = close + 1;
    pos = close + 1;
  }
  if (!any_field) return std::nullopt;
  if (!tab.logo && !tab.text) return std::nullopt;
  auto rest = text::trim(s.substr(last_close));
  if (!rest.empty()) {
    if (rest.front() == '(' && rest.back() == ')') rest = text::trim(rest.substr(1, rest.size() - 2));
    if (!rest.empty()) tab.context = std::string(rest);
  }
  return tab;
}

std::optional<CalendarDate> parse_reported_date(std::string_view raw) {
  static const std::regex date_re(R"((\d{1,4})[/.\-](\d{1,2})[/.\-](\d{2,4}))");
  std::cmatch m;
  std::string s(raw);
  if (!std::regex_search(s.c_str(), m, date_re)) return std::nullopt;
  int a = std::stoi(m[1].str()), b = std::stoi(m[2].str()), c = std::stoi(m[3].str());
  if (m[1].length() == 4) {
    if (m[3].length() > 2 || !is_valid_date(a, b, c)) return std::nullopt;
    return CalendarDate{a, b, c};
  }
  if (m[3].length() == 3) return std::nullopt;
  int year = m[3].length() == 2 ? 2000 + c : c;
  std::optional<CalendarDate> day_first, month_first;
  if (is_valid_date(year, b, a)) day_first = CalendarDate{year, b, a};
  if (is_valid_date(year, a, b)) month_first = CalendarDate{year, a, b};
  if (day_first && month_first) {
    if (*day_first == *month_first) return day_first;
    return std::nullopt;
  }
  return day_first ? day_first : month_first;
}

ParsedDescription parse_reply(std::string_view screenshot_id, std::string_view raw_reply) {
  // stored parses are JSON, so they must be valid UTF-8
  const auto clean = text::valid_utf8(raw_reply);
  std::string_view reply = clean;
  ParsedDescription out;
  out.screenshot_id = std::string(screenshot_id);
  std::vector<std::string> preamble_lines;
  RawSection* current = nullptr;
  for (const auto& line : text::split_lines(reply)) {
    if (auto h = match_heading(line)) {
      if (!h->preamble.empty()) preamble_lines.push_back(h->preamble);
      out.raw_sections.push_back({h->section, h->heading, {}});
      current = &out.raw_sections.back();
      out.sections_present.insert(h->section);
      continue;
    }
    if (!current) {
      preamble_lines.push_back(line);
      continue;
    }
    if (!current->body.empty()) current->body += '\n';
    current->body += line;
  }
  for (std::size_t i = 0; i < preamble_lines.size(); ++i) {
    if (i) out.preamble += '\n';
    out.preamble += preamble_lines[i];
  }
  if (out.raw_sections.empty()) {
    out.no_sections_found = true;
    out.main_content = std::string(text::trim(reply));
    return out;
  }
  for (const auto& sec : out.raw_sections) {
    if (sec.section == "Main Content") {
      auto body = join_trimmed(sec.body);
      if (!body.empty()) {
        if (!out.main_content.empty()) out.main_content += '\n';
        out.main_content += body;
      }
    } else if (sec.section == "Files/Programs") {
      parse_files(sec.body, out);
    } else if (sec.section == "URL") {
      parse_urls(sec.body, out);
    } else if (sec.section == "Browser Tabs Analysis") {
      parse_tabs(sec.body, out);
    } else if (sec.section == "Suspicious Elements") {
      parse_suspicious(sec.body, out);
    } else if (sec.section == "Language and Date") {
      parse_language_date(sec.body, out);
    }
  }
  return out;
}

ParsedDescription parse_description(const RawDescription& raw) {
  return parse_reply(raw.screenshot_id, raw.text);
}

CategoryDecision classify_screenshot(const ParsedDescription& p) {
  bool web = p.has_web();
  bool files = p.has_files();
  if (web && files) return {ScreenshotCategory::Hybrid, false};
  if (files) return {ScreenshotCategory::FileSystem, false};
  return {ScreenshotCategory::WebContent, !web};
}

std::string to_string(SuspiciousKind k) {
  switch (k) {
    case SuspiciousKind::Url: return "Url";
    case SuspiciousKind::File: return "File";
    case SuspiciousKind::Video: return "Video";
    case SuspiciousKind::Program: return "Program";
    case SuspiciousKind::Other: return "Other";
  }
  return "Other";
}

namespace {

std::optional<SuspiciousKind> kind_from_string(const std::string& s) {
  for (auto k : {SuspiciousKind::Url, SuspiciousKind::File, SuspiciousKind::Video,
                 SuspiciousKind::Program, SuspiciousKind::Other})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

json optional_json(const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); }

std::optional<std::string> optional_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<std::string>();
}

}  // namespace

json to_json(const ParsedDescription& p) {
  json tabs = json::array();
  for (const auto& t : p.tabs)
    tabs.push_back({{"logo", optional_json(t.logo)},
                    {"text", optional_json(t.text)},
                    {"context", optional_json(t.context)},
                    {"raw", t.raw}});
  json suspicious = json::array();
  for (const auto& s : p.suspicious)
    suspicious.push_back({{"raw", s.raw},
                          {"embedded_urls", s.embedded_urls},
                          {"kind_hint", s.kind_hint ? json(to_string(*s.kind_hint)) : json(nullptr)}});
  json raw_sections = json::array();
  for (const auto& r : p.raw_sections)
    raw_sections.push_back({{"section", r.section}, {"heading", r.heading}, {"body", r.body}});
  return {{"screenshot_id", p.screenshot_id},
          {"main_content", p.main_content},
          {"installers", p.installers},
          {"explorer_files", p.explorer_files},
          {"archive_members", p.archive_members},
          {"url_entries", p.url_entries},
          {"tabs", tabs},
          {"unparsed_tab_lines", p.unparsed_tab_lines},
          {"suspicious", suspicious},
          {"language", p.language},
          {"date_raw", p.date_raw},
          {"date_parsed", p.date_parsed ? json(to_iso(*p.date_parsed)) : json(nullptr)},
          {"sections_present", p.sections_present},
          {"no_sections_found", p.no_sections_found},
          {"preamble", p.preamble},
          {"raw_sections", raw_sections}};
}

ParsedDescription parsed_from_json(const json& j) {
  ParsedDescription p;
  p.screenshot_id = j.at("screenshot_id").get<std::string>();
  p.main_content = j.value("main_content", "");
  p.installers = j.value("installers", std::vector<std::string>{});
  p.explorer_files = j.value("explorer_files", std::vector<std::string>{});
  p.archive_members = j.value("archive_members", std::vector<std::string>{});
  p.url_entries = j.value("url_entries", std::vector<std::string>{});
  for (const auto& t : j.value("tabs", json::array()))
    p.tabs.push_back({optional_string(t, "logo"), optional_string(t, "text"),
                      optional_string(t, "context"), t.value("raw", "")});
  p.unparsed_tab_lines = j.value("unparsed_tab_lines", std::vector<std::string>{});
  for (const auto& s : j.value("suspicious", json::array())) {
    SuspiciousElement e;
    e.raw = s.value("raw", "");
    e.embedded_urls = s.value("embedded_urls", std::vector<std::string>{});
    if (auto k = optional_string(s, "kind_hint")) e.kind_hint = kind_from_string(*k);
    p.suspicious.push_back(std::move(e));
  }
  p.language = j.value("language", "");
  p.date_raw = j.value("date_raw", "");
  if (auto d = optional_string(j, "date_parsed")) p.date_parsed = parse_iso_date(*d);
  p.sections_present = j.value("sections_present", std::set<std::string>{});
  p.no_sections_found = j.value("no_sections_found", false);
  p.preamble = j.value("preamble", "");
  for (const auto& r : j.value("raw_sections", json::array()))
    p.raw_sections.push_back({r.value("section", ""), r.value("heading", ""), r.value("body", "")});
  return p;
}

}  // namespace shotintel
