#include "shotintel/url.hpp"

#include "shotintel/codec.hpp"
#include "shotintel/error.hpp"
#include "shotintel/text.hpp"

#include <array>
#include <cstdlib>

namespace shotintel {
namespace {

constexpr std::string_view kEllipsis = "\xE2\x80\xA6";

// Multi-byte quote marks LLM replies like to wrap links in.
constexpr std::array<std::string_view, 7> kWideQuotes = {
    "\xE2\x80\x9C", "\xE2\x80\x9D", "\xE2\x80\x98", "\xE2\x80\x99",
    "\xC2\xAB",     "\xC2\xBB",     kEllipsis};

const std::unordered_set<std::string> kFileExtensionTlds = {
    "zip", "rar", "exe", "dll", "msi", "mov", "7z",  "apk", "bat", "cmd", "ps1", "js",
    "jar", "iso", "txt", "pdf", "doc", "docx", "xls", "xlsx", "png", "jpg", "gif", "lnk",
    "scr", "vbs", "ini", "log", "dat", "bin", "cab", "sys", "tmp", "mp4", "mp3", "py", "sh"};

bool strip_wide(std::string_view& s, bool front) {
  for (auto q : kWideQuotes) {
    if (front && s.substr(0, q.size()) == q) {
      s.remove_prefix(q.size());
      return true;
    }
    if (!front && text::ends_with(s, q)) {
      s.remove_suffix(q.size());
      return true;
    }
  }
  return false;
}

std::size_t count(std::string_view s, char c) { return std::count(s.begin(), s.end(), c); }

std::string_view strip_punctuation(std::string_view s) {
  constexpr std::string_view kLeading = "\"'([{<,;.:*`";
  constexpr std::string_view kTrailing = "\"',.;:!?*>`";
  for (bool changed = true; changed && !s.empty();) {
    changed = false;
    s = text::trim(s);
    if (s.empty()) break;
    if (kLeading.find(s.front()) != std::string_view::npos) {
      s.remove_prefix(1);
      changed = true;
      continue;
    }
    if (strip_wide(s, true)) {
      changed = true;
      continue;
    }
    char last = s.back();
    if (kTrailing.find(last) != std::string_view::npos) {
      s.remove_suffix(1);
      changed = true;
    } else if ((last == ')' && count(s, ')') > count(s, '(')) ||
               (last == ']' && count(s, ']') > count(s, '[')) ||
               (last == '}' && count(s, '}') > count(s, '{'))) {
      s.remove_suffix(1);
      changed = true;
    } else if (strip_wide(s, false)) {
      changed = true;
    }
  }
  return s;
}

bool is_ipv4(std::string_view host) {
  auto parts = text::split(host, '.');
  if (parts.size() != 4) return false;
  for (const auto& p : parts) {
    if (p.empty() || p.size() > 3) return false;
    for (char c : p)
      if (c < '0' || c > '9') return false;
    if (std::stoi(p) > 255) return false;
  }
  return true;
}

bool valid_label(std::string_view label) {
  if (label.empty() || label.size() > 63) return false;
  if (label.front() == '-' || label.back() == '-') return false;
  for (char c : label)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-')) return false;
  return true;
}

bool alpha_tld(std::string_view label) {
  if (label.size() >= 4 && label.substr(0, 4) == "xn--") return true;
  if (label.size() < 2) return false;
  for (char c : label)
    if (!std::isalpha(static_cast<unsigned char>(c))) return false;
  return true;
}

struct Split {
  std::string scheme;
  std::string authority;
  std::string rest;
};

Split split_url(std::string_view s) {
  Split out;
  auto sep = s.find("://");
  if (sep != std::string_view::npos && sep > 0) {
    bool scheme_ok = std::isalpha(static_cast<unsigned char>(s[0])) != 0;
    for (char c : s.substr(0, sep))
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.'))
        scheme_ok = false;
    if (scheme_ok) {
      out.scheme = text::to_lower(s.substr(0, sep));
      s.remove_prefix(sep + 3);
    }
  }
  auto end = s.find_first_of("/?#");
  out.authority = std::string(s.substr(0, end));
  if (end != std::string_view::npos) out.rest = std::string(s.substr(end));
  return out;
}

}  // namespace

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("SHOTINTEL_DATA_DIR"); env && *env) return env;
  return SHOTINTEL_DATA_DIR;
}

PublicSuffixList PublicSuffixList::from_text(std::string_view text_in) {
  PublicSuffixList psl;
  for (auto& raw : text::split_lines(text_in)) {
    auto line = text::trim(raw);
    if (line.empty() || line.substr(0, 2) == "//") continue;
    auto space = line.find_first_of(" \t");
    if (space != std::string_view::npos) line = line.substr(0, space);
    auto rule = text::to_lower(line);
    if (rule[0] == '!') {
      psl.exceptions_.insert(rule.substr(1));
    } else if (rule.size() > 2 && rule.substr(0, 2) == "*.") {
      psl.wildcards_.insert(rule.substr(2));
    } else {
      psl.rules_.insert(rule);
    }
    auto dot = rule.rfind('.');
    auto tld = dot == std::string::npos ? rule : rule.substr(dot + 1);
    if (!tld.empty() && tld[0] != '!' && tld[0] != '*') psl.tlds_.insert(tld);
  }
  return psl;
}

PublicSuffixList PublicSuffixList::from_file(const std::filesystem::path& path) {
  return from_text(read_text_file(path));
}

const PublicSuffixList& PublicSuffixList::bundled() {
  static const PublicSuffixList instance = from_file(data_dir() / "public_suffix_list.dat");
  return instance;
}

bool PublicSuffixList::is_top_level(std::string_view label) const {
  return tlds_.contains(text::to_lower(label));
}

std::string PublicSuffixList::public_suffix(std::string_view host_in) const {
  auto host = text::to_lower(host_in);
  auto labels = text::split(host, '.');
  const std::size_t n = labels.size();
  // suffix_len = number of trailing labels forming the public suffix.
  std::size_t suffix_len = 1;
  for (std::size_t len = 1; len <= n; ++len) {
    std::string candidate;
    for (std::size_t i = n - len; i < n; ++i) {
      if (!candidate.empty()) candidate += '.';
      candidate += labels[i];
    }
    if (exceptions_.contains(candidate)) {
      suffix_len = len - 1;
      break;
    }
    if (rules_.contains(candidate)) suffix_len = std::max(suffix_len, len);
    if (len < n) {
      // "*.parent" matches one more label to the left of `candidate`.
      if (wildcards_.contains(candidate)) {
        std::string with_child = labels[n - len - 1] + "." + candidate;
        if (!exceptions_.contains(with_child)) suffix_len = std::max(suffix_len, len + 1);
      }
    }
  }
  std::string out;
  for (std::size_t i = n - std::min(suffix_len, n); i < n; ++i) {
    if (!out.empty()) out += '.';
    out += labels[i];
  }
  return out;
}

std::string PublicSuffixList::registered_domain(std::string_view host_in) const {
  auto host = text::to_lower(host_in);
  if (host.find('.') == std::string::npos || is_ipv4(host)) return host;
  auto suffix = public_suffix(host);
  if (suffix.size() >= host.size()) return host;
  auto prefix = std::string_view(host).substr(0, host.size() - suffix.size() - 1);
  auto dot = prefix.rfind('.');
  auto label = dot == std::string_view::npos ? prefix : prefix.substr(dot + 1);
  return std::string(label) + "." + suffix;
}

std::optional<ValidatedUrl> validate_url(std::string_view candidate) {
  auto s = strip_punctuation(candidate);
  while (text::ends_with(s, kEllipsis) || text::ends_with(s, "...")) {
    s.remove_suffix(text::ends_with(s, kEllipsis) ? kEllipsis.size() : 3);
    s = strip_punctuation(s);
  }
  if (s.empty()) return std::nullopt;
  for (char c : s)
    if (text::is_space(c) || static_cast<unsigned char>(c) < 0x20) return std::nullopt;

  auto parts = split_url(s);
  if (!parts.scheme.empty() && parts.scheme != "http" && parts.scheme != "https" &&
      parts.scheme != "ftp")
    return std::nullopt;
  std::string_view authority = parts.authority;
  if (auto at = authority.rfind('@'); at != std::string_view::npos)
    authority.remove_prefix(at + 1);
  std::string port;
  if (auto colon = authority.rfind(':'); colon != std::string_view::npos) {
    auto p = authority.substr(colon + 1);
    if (p.empty() || p.size() > 5 ||
        !std::all_of(p.begin(), p.end(), [](char c) { return c >= '0' && c <= '9'; }))
      return std::nullopt;
    port = std::string(p);
    authority = authority.substr(0, colon);
  }
  auto host = text::to_lower(authority);
  while (!host.empty() && host.back() == '.') host.pop_back();
  if (host.find('.') == std::string::npos) return std::nullopt;

  if (!is_ipv4(host)) {
    auto labels = text::split(host, '.');
    for (const auto& label : labels)
      if (!valid_label(label)) return std::nullopt;
    const auto& tld = labels.back();
    if (!alpha_tld(tld)) return std::nullopt;
    if (parts.scheme.empty()) {
      bool www = host.rfind("www.", 0) == 0;
      if (!PublicSuffixList::bundled().is_top_level(tld)) return std::nullopt;
      if (!www && kFileExtensionTlds.contains(tld)) return std::nullopt;
    }
  } else if (parts.scheme.empty()) {
    return std::nullopt;
  }

  ValidatedUrl out;
  out.scheme = parts.scheme;
  out.host = host;
  out.rest = parts.rest;
  if (!out.scheme.empty()) out.normalized = out.scheme + "://";
  out.normalized += host;
  if (!port.empty()) out.normalized += ":" + port;
  out.normalized += out.rest;
  return out;
}

bool detect_truncation(std::string_view candidate) {
  auto s = text::trim(candidate);
  // Closing wrappers never hide an ellipsis; strip them but keep dots.
  for (bool changed = true; changed && !s.empty();) {
    changed = false;
    char last = s.back();
    if (last == '"' || last == '\'' || last == ')' || last == ']' || last == '>' || last == ',' ||
        last == ';' || last == '`' || last == '*') {
      s.remove_suffix(1);
      changed = true;
    } else if (text::ends_with(s, "\xE2\x80\x9D") || text::ends_with(s, "\xE2\x80\x99")) {
      s.remove_suffix(3);
      changed = true;
    }
    s = text::trim(s);
  }
  if (text::ends_with(s, kEllipsis) || text::ends_with(s, "...")) return true;
  if (!s.empty() && s.back() == '%') return true;
  if (s.size() >= 2 && s[s.size() - 2] == '%' && std::isxdigit(static_cast<unsigned char>(s.back())))
    return true;

  auto parts = split_url(strip_punctuation(s));
  std::string_view authority = parts.authority;
  if (auto at = authority.rfind('@'); at != std::string_view::npos) authority.remove_prefix(at + 1);
  if (auto colon = authority.rfind(':'); colon != std::string_view::npos)
    authority = authority.substr(0, colon);
  auto host = text::to_lower(authority);
  while (!host.empty() && host.back() == '.') host.pop_back();
  if (host.find('.') == std::string::npos) return true;
  if (is_ipv4(host)) return false;
  auto tld = host.substr(host.rfind('.') + 1);
  return !PublicSuffixList::bundled().is_top_level(tld);
}

std::vector<std::string> find_url_tokens(std::string_view s) {
  std::vector<std::string> out;
  auto lower = text::to_lower(s);
  std::size_t pos = 0;
  while (pos < lower.size()) {
    std::size_t best = std::string::npos;
    for (std::string_view marker : {"https://", "http://", "www."}) {
      std::size_t p = pos;
      while ((p = lower.find(marker, p)) != std::string::npos) {
        bool boundary = p == 0 || !(text::is_alnum(lower[p - 1]) || lower[p - 1] == '.' ||
                                    lower[p - 1] == '/' || lower[p - 1] == '-');
        if (boundary) break;
        ++p;
      }
      best = std::min(best, p);
    }
    if (best == std::string::npos) break;
    std::size_t end = best;
    while (end < s.size() && !text::is_space(s[end]) && s[end] != '"' && s[end] != '<' &&
           s[end] != '>' && s[end] != '`')
      ++end;
    out.emplace_back(s.substr(best, end - best));
    pos = end;
  }
  return out;
}

}  // namespace shotintel
