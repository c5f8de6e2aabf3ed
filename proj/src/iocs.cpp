#include "shotintel/iocs.hpp"

#include "shotintel/codec.hpp"
#include "shotintel/csv.hpp"
#include "shotintel/error.hpp"
#include "shotintel/text.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <map>

namespace shotintel {

using nlohmann::json;

std::string to_string(UrlCategory c) {
  switch (c) {
    case UrlCategory::VideoPlatform: return "VideoPlatform";
    case UrlCategory::FileDistribution: return "FileDistribution";
    case UrlCategory::OtherDomain: return "OtherDomain";
    case UrlCategory::Benign: return "Benign";
  }
  return "OtherDomain";
}

std::string to_string(UrlSource s) {
  switch (s) {
    case UrlSource::Url: return "Url";
    case UrlSource::Suspicious: return "Suspicious";
    case UrlSource::MainContent: return "MainContent";
  }
  return "Url";
}

std::string to_string(ExtensionClass e) {
  switch (e) {
    case ExtensionClass::Exe: return "Exe";
    case ExtensionClass::Zip: return "Zip";
    case ExtensionClass::Rar: return "Rar";
    case ExtensionClass::Dll: return "Dll";
    case ExtensionClass::Other: return "Other";
    case ExtensionClass::None: return "None";
  }
  return "None";
}

std::string to_string(FileRole r) {
  switch (r) {
    case FileRole::Installer: return "Installer";
    case FileRole::ExplorerFile: return "ExplorerFile";
    case FileRole::ArchiveMember: return "ArchiveMember";
    case FileRole::Download: return "Download";
  }
  return "ExplorerFile";
}

namespace {

std::vector<std::string> lower_all(std::vector<std::string> v) {
  for (auto& s : v) s = text::to_lower(text::trim(s));
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

bool overlaps(const std::vector<std::string>& a, const std::vector<std::string>& b,
              std::string* which) {
  for (const auto& h : a)
    if (host_in(h, b)) {
      *which = h;
      return true;
    }
  return false;
}

}  // namespace

void Lexicons::validate() const {
  std::string which;
  if (overlaps(benign_hosts, video_hosts, &which) || overlaps(video_hosts, benign_hosts, &which) ||
      overlaps(benign_hosts, distribution_hosts, &which) ||
      overlaps(distribution_hosts, benign_hosts, &which) ||
      overlaps(video_hosts, distribution_hosts, &which) ||
      overlaps(distribution_hosts, video_hosts, &which))
    throw Error(ErrorCode::ConfigError, "lexicon host sets overlap at " + which);
}

Lexicons Lexicons::from_json(const json& j) {
  Lexicons lex;
  try {
    lex.benign_hosts = lower_all(j.value("benign_hosts", std::vector<std::string>{}));
    lex.video_hosts = lower_all(j.value("video_hosts", std::vector<std::string>{}));
    lex.distribution_hosts = lower_all(j.value("distribution_hosts", std::vector<std::string>{}));
    lex.generic_name_patterns = j.value("generic_name_patterns", std::vector<std::string>{});
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("lexicon: ") + e.what());
  }
  lex.validate();
  return lex;
}

Lexicons Lexicons::load(const std::filesystem::path& path) {
  try {
    return from_json(json::parse(read_text_file(path)));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
  }
}

Lexicons Lexicons::bundled() { return load(data_dir() / "lexicons.json"); }

bool host_in(std::string_view host, const std::vector<std::string>& hosts) {
  for (const auto& h : hosts) {
    if (host == h) return true;
    if (host.size() > h.size() && text::ends_with(host, h) && host[host.size() - h.size() - 1] == '.')
      return true;
  }
  return false;
}

UrlCategory categorize_host(std::string_view host_in_, const Lexicons& lex) {
  auto host = text::to_lower(host_in_);
  if (host_in(host, lex.benign_hosts)) return UrlCategory::Benign;
  if (host_in(host, lex.video_hosts)) return UrlCategory::VideoPlatform;
  if (host_in(host, lex.distribution_hosts)) return UrlCategory::FileDistribution;
  return UrlCategory::OtherDomain;
}

namespace {

struct Candidate {
  std::string raw;
  ValidatedUrl url;
  UrlSource source;
};

std::vector<Candidate> candidates_of(const ParsedDescription& p, std::uint64_t* rejected) {
  std::vector<Candidate> out;
  auto add_tokens = [&](std::string_view text_in, UrlSource source) {
    bool any = false;
    for (auto& token : find_url_tokens(text_in))
      if (auto v = validate_url(token)) {
        out.push_back({token, std::move(*v), source});
        any = true;
      }
    return any;
  };
  for (const auto& entry : p.url_entries) {
    if (auto v = validate_url(entry)) {
      out.push_back({std::string(text::trim(entry)), std::move(*v), UrlSource::Url});
      continue;
    }
    if (!add_tokens(entry, UrlSource::Url) && rejected) ++*rejected;
  }
  for (const auto& s : p.suspicious) add_tokens(s.raw, UrlSource::Suspicious);
  add_tokens(p.main_content, UrlSource::MainContent);
  return out;
}

}  // namespace

std::vector<ValidatedUrl> urls_of(const ParsedDescription& parsed) {
  std::vector<ValidatedUrl> out;
  for (auto& c : candidates_of(parsed, nullptr))
    if (std::none_of(out.begin(), out.end(),
                     [&](const ValidatedUrl& u) { return u.normalized == c.url.normalized; }))
      out.push_back(std::move(c.url));
  return out;
}

UrlExtraction extract_urls(const std::vector<ParsedDescription>& corpus, const Lexicons& lex) {
  std::map<std::string, UrlIoc> merged;
  UrlExtraction result;
  for (const auto& p : corpus) {
    for (auto& c : candidates_of(p, &result.stats.rejected_candidates)) {
      auto [it, fresh] = merged.try_emplace(c.url.normalized);
      auto& ioc = it->second;
      if (fresh) {
        ioc.raw = c.raw;
        ioc.normalized = c.url.normalized;
        ioc.host = c.url.host;
        ioc.registered_domain = PublicSuffixList::bundled().registered_domain(c.url.host);
        ioc.category = categorize_host(c.url.host, lex);
      } else if (c.raw < ioc.raw) {
        ioc.raw = c.raw;
      }
      ioc.truncated = ioc.truncated || detect_truncation(c.raw);
      ioc.source_ids.insert(p.screenshot_id);
      ioc.source_sections.insert(c.source);
      if (c.source == UrlSource::Suspicious) ioc.suspicious_corroborated = true;
    }
  }
  auto& st = result.stats;
  for (auto& [key, ioc] : merged) {
    ++st.total_unique;
    if (ioc.truncated) ++st.truncated;
    switch (ioc.category) {
      case UrlCategory::Benign: ++st.benign; break;
      case UrlCategory::VideoPlatform: ++st.video; break;
      case UrlCategory::FileDistribution: ++st.distribution; break;
      case UrlCategory::OtherDomain: ++st.other; break;
    }
    result.urls.push_back(std::move(ioc));
  }
  st.actionable = st.total_unique - st.benign;
  return result;
}

ExtensionClass extension_class_of(std::string_view name) {
  auto dot = name.rfind('.');
  if (dot == std::string_view::npos || dot == 0) return ExtensionClass::None;
  auto ext = name.substr(dot + 1);
  if (ext.empty() || ext.size() > 5) return ExtensionClass::None;
  bool letter = false;
  for (char c : ext) {
    if (!text::is_alnum(c)) return ExtensionClass::None;
    letter = letter || std::isalpha(static_cast<unsigned char>(c));
  }
  // "Minecraft 1.19" has a version number, not an extension
  if (!letter) return ExtensionClass::None;
  auto lower = text::to_lower(ext);
  if (lower == "exe") return ExtensionClass::Exe;
  if (lower == "zip") return ExtensionClass::Zip;
  if (lower == "rar") return ExtensionClass::Rar;
  if (lower == "dll") return ExtensionClass::Dll;
  return ExtensionClass::Other;
}

std::string file_stem(std::string_view name) {
  if (extension_class_of(name) == ExtensionClass::None) return std::string(name);
  return std::string(name.substr(0, name.rfind('.')));
}

bool is_generic_name(std::string_view name, const std::vector<std::string>& patterns) {
  std::string n(text::trim(name));
  for (const auto& pat : patterns)
    if (fnmatch(pat.c_str(), n.c_str(), FNM_CASEFOLD) == 0) return true;
  return false;
}

FileExtraction extract_files(const std::vector<ParsedDescription>& corpus) {
  std::map<std::string, FileIoc> merged;
  FileExtraction result;
  auto add = [&](const std::string& name, FileRole role, const std::string& id) {
    auto [it, fresh] = merged.try_emplace(name);
    auto& f = it->second;
    if (fresh) {
      f.name = name;
      f.stem = file_stem(name);
      f.extension_class = extension_class_of(name);
    }
    f.roles.insert(role);
    f.source_ids.insert(id);
    ++f.occurrences;
  };
  for (const auto& p : corpus) {
    for (const auto& n : p.installers) {
      add(n, FileRole::Installer, p.screenshot_id);
      ++result.counts.installer;
    }
    for (const auto& n : p.explorer_files) {
      add(n, FileRole::ExplorerFile, p.screenshot_id);
      ++result.counts.other;
    }
    for (const auto& n : p.archive_members) {
      add(n, FileRole::ArchiveMember, p.screenshot_id);
      ++result.counts.other;
    }
  }
  for (auto& [name, f] : merged) result.files.push_back(std::move(f));
  return result;
}

namespace {

bool mentioned_in(const FileIoc& f, const std::string& lowered_text) {
  if (lowered_text.empty()) return false;
  auto name = text::to_lower(f.name);
  if (lowered_text.find(name) != std::string::npos) return true;
  auto stem = text::to_lower(text::trim(f.stem));
  // very short stems ("a", "win") would match almost any prose
  return stem.size() >= 4 && lowered_text.find(stem) != std::string::npos;
}

}  // namespace

FilterSummary filter_files(std::vector<FileIoc>& files, const std::vector<ParsedDescription>& corpus,
                           const Lexicons& lex) {
  std::map<std::string, std::string, std::less<>> suspicious_by_id;
  std::string all_suspicious;
  for (const auto& p : corpus) {
    auto& s = suspicious_by_id[p.screenshot_id];
    for (const auto& e : p.suspicious) {
      s += text::to_lower(e.raw);
      s += '\n';
    }
    all_suspicious += s;
  }
  FilterSummary summary;
  for (auto& f : files) {
    f.suspicious_corroborated = false;
    for (const auto& id : f.source_ids) {
      auto it = suspicious_by_id.find(id);
      if (it != suspicious_by_id.end() && mentioned_in(f, it->second)) {
        f.suspicious_corroborated = true;
        break;
      }
    }
    f.weakly_corroborated = !f.suspicious_corroborated && mentioned_in(f, all_suspicious);
    f.generic = is_generic_name(f.name, lex.generic_name_patterns);
    f.retained = f.suspicious_corroborated && !f.generic;
    if (f.suspicious_corroborated) ++summary.corroborated_names;
    if (f.retained) {
      ++summary.retained_names;
      summary.retained_occurrences += f.occurrences;
    }
  }
  return summary;
}

std::map<ExtensionClass, std::uint64_t> extension_breakdown(const std::vector<FileIoc>& files) {
  std::map<ExtensionClass, std::uint64_t> out;
  for (auto e : {ExtensionClass::Exe, ExtensionClass::Zip, ExtensionClass::Rar, ExtensionClass::Dll,
                 ExtensionClass::Other, ExtensionClass::None})
    out[e] = 0;
  for (const auto& f : files)
    if (f.retained) ++out[f.extension_class];
  return out;
}

std::string urls_to_csv(const std::vector<UrlIoc>& urls) {
  std::string out = "normalized,host,category,truncated,n_sources,corroborated\n";
  for (const auto& u : urls)
    out += csv::format_row({u.normalized, u.host, to_string(u.category),
                            u.truncated ? "true" : "false", std::to_string(u.source_ids.size()),
                            u.suspicious_corroborated ? "true" : "false"});
  return out;
}

std::string files_to_csv(const std::vector<FileIoc>& files) {
  std::string out = "name,extension_class,roles,generic,corroborated,retained,n_sources,occurrences\n";
  for (const auto& f : files) {
    std::string roles;
    for (auto r : f.roles) {
      if (!roles.empty()) roles += ';';
      roles += to_string(r);
    }
    out += csv::format_row({f.name, to_string(f.extension_class), roles,
                            f.generic ? "true" : "false",
                            f.suspicious_corroborated ? "true" : "false",
                            f.retained ? "true" : "false", std::to_string(f.source_ids.size()),
                            std::to_string(f.occurrences)});
  }
  return out;
}

json to_json(const UrlStats& s) {
  return {{"total_unique", s.total_unique}, {"benign", s.benign},
          {"truncated", s.truncated},       {"actionable", s.actionable},
          {"video", s.video},               {"distribution", s.distribution},
          {"other", s.other},               {"rejected_candidates", s.rejected_candidates}};
}

json to_json(const UrlIoc& u) {
  json sections = json::array();
  for (auto s : u.source_sections) sections.push_back(to_string(s));
  return {{"raw", u.raw},
          {"normalized", u.normalized},
          {"host", u.host},
          {"registered_domain", u.registered_domain},
          {"category", to_string(u.category)},
          {"truncated", u.truncated},
          {"source_ids", u.source_ids},
          {"source_sections", sections},
          {"suspicious_corroborated", u.suspicious_corroborated}};
}

json to_json(const FileIoc& f) {
  json roles = json::array();
  for (auto r : f.roles) roles.push_back(to_string(r));
  return {{"name", f.name},
          {"stem", f.stem},
          {"extension_class", to_string(f.extension_class)},
          {"roles", roles},
          {"generic", f.generic},
          {"suspicious_corroborated", f.suspicious_corroborated},
          {"weakly_corroborated", f.weakly_corroborated},
          {"retained", f.retained},
          {"source_ids", f.source_ids},
          {"occurrences", f.occurrences}};
}

}  // namespace shotintel
