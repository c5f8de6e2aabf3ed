#include "shotintel/campaigns.hpp"

#include "shotintel/codec.hpp"
#include "shotintel/error.hpp"
#include "shotintel/numeric.hpp"
#include "shotintel/text.hpp"

#include <algorithm>
#include <numeric>

namespace shotintel {

using nlohmann::json;

std::string to_string(Theme t) {
  switch (t) {
    case Theme::CrackedSoftware: return "CrackedSoftware";
    case Theme::GamingMods: return "GamingMods";
    case Theme::Other: return "Other";
  }
  return "Other";
}

std::string to_string(Confidence c) { return c == Confidence::Strong ? "Strong" : "Weak"; }

std::string to_string(IndicatorKind k) {
  switch (k) {
    case IndicatorKind::Domain: return "Domain";
    case IndicatorKind::FullUrl: return "FullUrl";
    case IndicatorKind::FileStem: return "FileStem";
    case IndicatorKind::ThemeTerm: return "ThemeTerm";
  }
  return "Domain";
}

std::string to_string(StepKind k) {
  switch (k) {
    case StepKind::SearchLure: return "SearchLure";
    case StepKind::VideoOrAd: return "VideoOrAd";
    case StepKind::RedirectPage: return "RedirectPage";
    case StepKind::DistributionLink: return "DistributionLink";
    case StepKind::Archive: return "Archive";
    case StepKind::Executable: return "Executable";
  }
  return "SearchLure";
}

namespace {

std::vector<std::string> lowered(const json& j, const char* key) {
  std::vector<std::string> out;
  for (const auto& v : j.value(key, json::array())) out.push_back(text::to_lower(v.get<std::string>()));
  return out;
}

std::vector<std::string> hits(const std::string& lowered_text, const std::vector<std::string>& terms) {
  std::vector<std::string> out;
  for (const auto& t : terms)
    if (text::contains_word(lowered_text, t)) out.push_back(t);
  return out;
}

void merge_into(std::set<std::string>& dst, const std::vector<std::string>& src) {
  dst.insert(src.begin(), src.end());
}

std::string url_text(const UrlIoc& u) {
  auto pos = u.normalized.find("://");
  return text::to_lower(pos == std::string::npos ? u.normalized : u.normalized.substr(pos + 3));
}

std::string tab_text(const TabEntry& t) {
  std::string s;
  for (const auto* f : {&t.logo, &t.text, &t.context})
    if (*f) s += **f + "\n";
  return s;
}

}  // namespace

ThemeLexicon ThemeLexicon::from_json(const json& j) {
  ThemeLexicon lex;
  try {
    lex.cracked_software = lowered(j, "cracked_software");
    lex.gaming_mods = lowered(j, "gaming_mods");
    lex.distinctive_terms = lowered(j, "distinctive_terms");
    lex.redirect_hosts = lowered(j, "redirect_hosts");
    auto secondary = j.value("secondary_terms", json::object());
    for (const auto& [name, terms] : secondary.items()) {
      auto& dst = lex.secondary_terms[name];
      for (const auto& t : terms) dst.push_back(text::to_lower(t.get<std::string>()));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("theme lexicon: ") + e.what());
  }
  return lex;
}

ThemeLexicon ThemeLexicon::load(const std::filesystem::path& path) {
  try {
    return from_json(json::parse(read_text_file(path)));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
  }
}

ThemeLexicon ThemeLexicon::bundled() { return load(data_dir() / "themes.json"); }

ThemeTag tag_theme(const ParsedDescription& p, const std::vector<FileIoc>& files,
                   const std::vector<UrlIoc>& urls, const ThemeLexicon& lex) {
  std::string strong;
  for (const auto& f : files)
    if (f.retained && f.source_ids.contains(p.screenshot_id)) strong += text::to_lower(f.name) + "\n";
  for (const auto& u : urls)
    if (u.category != UrlCategory::Benign && u.source_ids.contains(p.screenshot_id))
      strong += url_text(u) + "\n";
  std::string weak = text::to_lower(p.main_content) + "\n";
  for (const auto& t : p.tabs) weak += text::to_lower(tab_text(t));

  auto cs = hits(strong, lex.cracked_software), gs = hits(strong, lex.gaming_mods);
  auto cw = hits(weak, lex.cracked_software), gw = hits(weak, lex.gaming_mods);

  ThemeTag tag;
  tag.distinctive_terms = hits(strong, lex.distinctive_terms);
  std::set<std::string> terms;
  if (!cs.empty() || !gs.empty()) {
    tag.confidence = Confidence::Strong;
    tag.theme = !cs.empty() ? Theme::CrackedSoftware : Theme::GamingMods;
  } else if (!cw.empty() || !gw.empty()) {
    tag.theme = !cw.empty() ? Theme::CrackedSoftware : Theme::GamingMods;
  }
  if (tag.theme == Theme::CrackedSoftware) {
    merge_into(terms, cs);
    merge_into(terms, cw);
  } else if (tag.theme == Theme::GamingMods) {
    merge_into(terms, gs);
    merge_into(terms, gw);
  }
  tag.matched_terms.assign(terms.begin(), terms.end());
  return tag;
}

ThemeHistogram theme_histogram(const std::vector<ThemeTag>& tags) {
  ThemeHistogram h;
  h.total = tags.size();
  if (tags.empty()) return h;
  for (auto t : {Theme::CrackedSoftware, Theme::GamingMods, Theme::Other}) h.counts[t] = 0;
  for (const auto& t : tags) ++h.counts[t.theme];
  for (const auto& [theme, n] : h.counts) h.percent[theme] = percent(n, h.total, 2);
  return h;
}

Analysis analyze(std::vector<ParsedDescription> parsed, const std::vector<ScreenshotRecord>& records,
                 const Lexicons& lex, const ThemeLexicon& themes) {
  Analysis a;
  a.parsed = std::move(parsed);
  for (const auto& r : records) a.records.emplace(r.id, r);
  a.urls = extract_urls(a.parsed, lex);
  a.files = extract_files(a.parsed);
  a.filter = filter_files(a.files.files, a.parsed, lex);
  for (const auto& p : a.parsed)
    a.tags[p.screenshot_id] = tag_theme(p, a.files.files, a.urls.urls, themes);
  return a;
}

std::vector<ScreenshotIndicators> build_indicators(const Analysis& a, const Lexicons& lex) {
  std::map<std::string, ScreenshotIndicators> by_id;
  for (const auto& p : a.parsed) {
    auto& s = by_id[p.screenshot_id];
    s.id = p.screenshot_id;
    s.language = p.language;
    if (auto it = a.records.find(p.screenshot_id); it != a.records.end()) {
      s.captured_at = it->second.captured_at;
      if (s.language.empty() && it->second.language_hint) s.language = *it->second.language_hint;
    }
    if (auto it = a.tags.find(p.screenshot_id); it != a.tags.end())
      for (const auto& t : it->second.distinctive_terms)
        s.indicators.insert({IndicatorKind::ThemeTerm, t});
  }
  for (const auto& u : a.urls.urls) {
    if (u.category == UrlCategory::Benign) continue;
    bool shared_platform = host_in(u.host, lex.video_hosts) || host_in(u.host, lex.distribution_hosts);
    Indicator ind = shared_platform ? Indicator{IndicatorKind::FullUrl, u.normalized}
                                    : Indicator{IndicatorKind::Domain, u.registered_domain};
    for (const auto& id : u.source_ids)
      if (auto it = by_id.find(id); it != by_id.end()) it->second.indicators.insert(ind);
  }
  for (const auto& f : a.files.files) {
    if (!f.retained) continue;
    Indicator ind{IndicatorKind::FileStem, text::to_lower(f.stem)};
    for (const auto& id : f.source_ids)
      if (auto it = by_id.find(id); it != by_id.end()) it->second.indicators.insert(ind);
  }
  std::vector<ScreenshotIndicators> out;
  for (auto& [id, s] : by_id) out.push_back(std::move(s));
  return out;
}

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

using Group = std::vector<std::size_t>;

std::vector<Group> components(const std::vector<const ScreenshotIndicators*>& all, const Group& subset) {
  UnionFind uf(subset.size());
  std::map<Indicator, std::size_t> first;
  for (std::size_t i = 0; i < subset.size(); ++i)
    for (const auto& ind : all[subset[i]]->indicators) {
      auto [it, fresh] = first.try_emplace(ind, i);
      if (!fresh) uf.unite(it->second, i);
    }
  std::map<std::size_t, Group> groups;
  for (std::size_t i = 0; i < subset.size(); ++i) groups[uf.find(i)].push_back(subset[i]);
  std::vector<Group> out;
  for (auto& [root, g] : groups) out.push_back(std::move(g));
  return out;
}

bool shares_indicator(const ScreenshotIndicators& a, const ScreenshotIndicators& b) {
  auto i = a.indicators.begin();
  auto j = b.indicators.begin();
  while (i != a.indicators.end() && j != b.indicators.end()) {
    if (*i < *j)
      ++i;
    else if (*j < *i)
      ++j;
    else
      return true;
  }
  return false;
}

// Splits a component at capture-time gaps. Untimed members join the earliest
// segment they share an indicator with; connectivity is recomputed after.
std::vector<Group> split_by_time(const std::vector<const ScreenshotIndicators*>& all,
                                 const Group& component, std::int64_t gap_max) {
  Group timed, untimed;
  for (auto i : component) (all[i]->captured_at ? timed : untimed).push_back(i);
  if (timed.empty()) return {component};
  std::sort(timed.begin(), timed.end(), [&](std::size_t a, std::size_t b) {
    const auto& ta = *all[a]->captured_at;
    const auto& tb = *all[b]->captured_at;
    if (ta != tb) return ta < tb;
    return all[a]->id < all[b]->id;
  });
  std::vector<Group> segments{{timed.front()}};
  for (std::size_t k = 1; k < timed.size(); ++k) {
    auto gap = all[timed[k]]->captured_at->epoch_seconds - all[timed[k - 1]]->captured_at->epoch_seconds;
    if (gap > gap_max) segments.emplace_back();
    segments.back().push_back(timed[k]);
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (auto it = untimed.begin(); it != untimed.end();) {
      bool placed = false;
      for (auto& seg : segments) {
        if (std::any_of(seg.begin(), seg.end(),
                        [&](std::size_t m) { return shares_indicator(*all[*it], *all[m]); })) {
          seg.push_back(*it);
          placed = true;
          break;
        }
      }
      if (placed) {
        it = untimed.erase(it);
        changed = true;
      } else {
        ++it;
      }
    }
  }
  if (!untimed.empty()) segments.push_back(untimed);
  std::vector<Group> out;
  for (const auto& seg : segments)
    for (auto& g : components(all, seg)) out.push_back(std::move(g));
  return out;
}

CampaignCluster make_cluster(const std::vector<const ScreenshotIndicators*>& all, const Group& g) {
  CampaignCluster c;
  std::map<Indicator, std::size_t> counts;
  for (auto i : g) {
    const auto& s = *all[i];
    c.member_ids.insert(s.id);
    for (const auto& ind : s.indicators) ++counts[ind];
    if (s.captured_at) {
      if (!c.window_start || *s.captured_at < *c.window_start) c.window_start = s.captured_at;
      if (!c.window_end || *c.window_end < *s.captured_at) c.window_end = s.captured_at;
    }
    if (!s.language.empty()) c.languages.insert(s.language);
  }
  const Indicator* best = nullptr;
  std::size_t best_n = 0;
  for (const auto& [ind, n] : counts) {
    if (n >= 2) c.shared_indicators.insert(ind);
    if (n > best_n) {
      best = &ind;
      best_n = n;
    }
  }
  if (best) c.label = best->value;
  c.size = c.member_ids.size();
  return c;
}

}  // namespace

std::vector<CampaignCluster> cluster_campaigns(const std::vector<ScreenshotIndicators>& screenshots,
                                               const ClusterParams& params) {
  std::vector<const ScreenshotIndicators*> all;
  for (const auto& s : screenshots) all.push_back(&s);
  std::sort(all.begin(), all.end(), [](auto* a, auto* b) { return a->id < b->id; });

  Group everyone(all.size());
  std::iota(everyone.begin(), everyone.end(), 0);
  std::vector<Group> groups;
  for (auto& comp : components(all, everyone)) {
    if (comp.size() < params.min_cluster_size) continue;
    if (params.time_gap_max_seconds) {
      for (auto& g : split_by_time(all, comp, *params.time_gap_max_seconds)) groups.push_back(std::move(g));
    } else {
      groups.push_back(std::move(comp));
    }
  }
  std::vector<CampaignCluster> out;
  for (const auto& g : groups)
    if (g.size() >= params.min_cluster_size) out.push_back(make_cluster(all, g));
  std::sort(out.begin(), out.end(), [](const CampaignCluster& a, const CampaignCluster& b) {
    if (a.size != b.size) return a.size > b.size;
    if (a.label != b.label) return a.label < b.label;
    return *a.member_ids.begin() < *b.member_ids.begin();
  });
  for (std::size_t i = 0; i < out.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "campaign-%03zu", i + 1);
    out[i].id = buf;
  }
  return out;
}

namespace {

const char* step_title(StepKind k) {
  switch (k) {
    case StepKind::SearchLure: return "Search lure";
    case StepKind::VideoOrAd: return "Lure video or sponsored ad";
    case StepKind::RedirectPage: return "Redirect page";
    case StepKind::DistributionLink: return "Distribution link";
    case StepKind::Archive: return "Archive";
    case StepKind::Executable: return "Executable";
  }
  return "";
}

std::string prose_of(const ParsedDescription& p) {
  std::string s = p.main_content + "\n";
  for (const auto& t : p.tabs) s += tab_text(t);
  for (const auto& e : p.suspicious) s += e.raw + "\n";
  return text::to_lower(s);
}

bool mentions_any(const std::string& lowered_text, std::initializer_list<std::string_view> words) {
  for (auto w : words)
    if (text::contains_word(lowered_text, w)) return true;
  return false;
}

bool is_search_url(const UrlIoc& u) {
  auto slash = u.normalized.find('/', u.normalized.find("://") == std::string::npos
                                         ? 0
                                         : u.normalized.find("://") + 3);
  if (slash == std::string::npos) return false;
  auto rest = text::to_lower(std::string_view(u.normalized).substr(slash));
  return rest.starts_with("/search") || rest.starts_with("/results");
}

}  // namespace

CampaignReport campaign_report(const CampaignCluster& cluster, const Analysis& a,
                               const ThemeLexicon& themes) {
  CampaignReport r;
  r.cluster = cluster;
  if (cluster.window_start && cluster.window_end)
    r.duration_seconds = cluster.window_end->epoch_seconds - cluster.window_start->epoch_seconds;

  std::map<StepKind, std::map<std::string, std::size_t>> evidence;
  auto note = [&](StepKind k, const std::string& value) { ++evidence[k][value]; };

  for (const auto& p : a.parsed) {
    if (!cluster.member_ids.contains(p.screenshot_id)) continue;
    const auto& id = p.screenshot_id;
    if (auto it = a.tags.find(id); it != a.tags.end()) ++r.themes[it->second.theme];
    auto prose = prose_of(p);
    if (mentions_any(prose, {"search", "searched", "searches", "searching"})) note(StepKind::SearchLure, id);
    if (mentions_any(prose, {"sponsored", "ad", "ads", "advertisement"})) note(StepKind::VideoOrAd, id);
    for (const auto& u : a.urls.urls) {
      if (!u.source_ids.contains(id)) continue;
      if (is_search_url(u)) note(StepKind::SearchLure, u.normalized);
      switch (u.category) {
        case UrlCategory::VideoPlatform: note(StepKind::VideoOrAd, u.normalized); break;
        case UrlCategory::OtherDomain: note(StepKind::RedirectPage, u.host); break;
        case UrlCategory::FileDistribution:
          note(host_in(u.host, themes.redirect_hosts) ? StepKind::RedirectPage : StepKind::DistributionLink,
               u.normalized);
          break;
        case UrlCategory::Benign: break;
      }
    }
    for (const auto& f : a.files.files) {
      if (!f.source_ids.contains(id)) continue;
      auto lower = text::to_lower(f.name);
      if (f.extension_class == ExtensionClass::Zip || f.extension_class == ExtensionClass::Rar ||
          text::ends_with(lower, ".7z"))
        note(StepKind::Archive, f.name);
      else if (f.extension_class == ExtensionClass::Exe)
        note(StepKind::Executable, f.name);
    }
  }

  for (auto kind : {StepKind::SearchLure, StepKind::VideoOrAd, StepKind::RedirectPage,
                    StepKind::DistributionLink, StepKind::Archive, StepKind::Executable}) {
    auto it = evidence.find(kind);
    if (it == evidence.end()) continue;
    std::vector<std::pair<std::string, std::size_t>> ranked(it->second.begin(), it->second.end());
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& x, const auto& y) { return x.second > y.second; });
    PlaybookStep step;
    step.kind = kind;
    for (std::size_t i = 0; i < ranked.size() && i < 5; ++i) step.evidence.push_back(ranked[i].first);
    step.text = std::string(step_title(kind));
    // prose-only evidence is a screenshot id, not worth quoting
    if (!cluster.member_ids.contains(ranked.front().first)) step.text += ": " + ranked.front().first;
    r.playbook.push_back(std::move(step));
  }
  return r;
}

double minecraft_correlation(const CampaignCluster& cluster, const Analysis& a,
                             const std::vector<std::string>& terms) {
  std::uint64_t matched = 0;
  for (const auto& p : a.parsed) {
    if (!cluster.member_ids.contains(p.screenshot_id)) continue;
    std::string content = p.main_content + "\n";
    for (const auto& t : p.tabs) content += t.raw + "\n";
    for (const auto* list : {&p.installers, &p.explorer_files, &p.archive_members, &p.url_entries})
      for (const auto& s : *list) content += s + "\n";
    for (const auto& e : p.suspicious) content += e.raw + "\n";
    content = text::to_lower(content);
    if (std::any_of(terms.begin(), terms.end(),
                    [&](const std::string& t) { return text::contains_word(content, text::to_lower(t)); }))
      ++matched;
  }
  return percent(matched, cluster.size, 1);
}

json to_json(const ThemeTag& t) {
  return {{"theme", to_string(t.theme)},
          {"matched_terms", t.matched_terms},
          {"confidence", to_string(t.confidence)},
          {"distinctive_terms", t.distinctive_terms}};
}

json to_json(const ThemeHistogram& h) {
  json counts = json::object(), pct = json::object();
  for (const auto& [t, n] : h.counts) counts[to_string(t)] = n;
  for (const auto& [t, p] : h.percent) pct[to_string(t)] = p;
  return {{"total", h.total}, {"counts", counts}, {"percent", pct}};
}

json to_json(const CampaignCluster& c) {
  json shared = json::array();
  for (const auto& i : c.shared_indicators) shared.push_back({{"kind", to_string(i.kind)}, {"value", i.value}});
  auto ts = [](const std::optional<Timestamp>& t) { return t ? json(t->original) : json(nullptr); };
  return {{"id", c.id},
          {"label", c.label},
          {"member_ids", c.member_ids},
          {"shared_indicators", shared},
          {"window_start", ts(c.window_start)},
          {"window_end", ts(c.window_end)},
          {"languages", c.languages},
          {"size", c.size}};
}

json to_json(const CampaignReport& r) {
  json steps = json::array();
  for (const auto& s : r.playbook)
    steps.push_back({{"kind", to_string(s.kind)}, {"text", s.text}, {"evidence", s.evidence}});
  json themes = json::object();
  for (const auto& [t, n] : r.themes) themes[to_string(t)] = n;
  return {{"cluster", to_json(r.cluster)},
          {"playbook", steps},
          {"duration_seconds", r.duration_seconds ? json(*r.duration_seconds) : json(nullptr)},
          {"duration", r.duration_seconds ? json(format_duration(*r.duration_seconds)) : json(nullptr)},
          {"themes", themes}};
}

std::string to_markdown(const CampaignReport& r) {
  const auto& c = r.cluster;
  std::string md = "# Campaign " + c.label + "\n\n";
  md += "- id: " + c.id + "\n";
  md += "- size: " + std::to_string(c.size) + "\n";
  if (c.window_start && c.window_end)
    md += "- window: " + c.window_start->original + " to " + c.window_end->original + "\n";
  if (r.duration_seconds) md += "- duration: " + format_duration(*r.duration_seconds) + "\n";
  if (!c.languages.empty()) {
    md += "- languages (" + std::to_string(c.languages.size()) + "):";
    for (const auto& l : c.languages) md += " " + l;
    md += "\n";
  }
  md += "\n## Playbook\n\n";
  for (std::size_t i = 0; i < r.playbook.size(); ++i)
    md += std::to_string(i + 1) + ". " + r.playbook[i].text + "\n";
  md += "\n## Shared indicators\n\n| kind | value |\n|---|---|\n";
  for (const auto& ind : c.shared_indicators) md += "| " + to_string(ind.kind) + " | " + ind.value + " |\n";
  if (!r.themes.empty()) {
    md += "\n## Themes\n\n| theme | members |\n|---|---|\n";
    for (const auto& [t, n] : r.themes) md += "| " + to_string(t) + " | " + std::to_string(n) + " |\n";
  }
  return md;
}

std::string report_file_name(const CampaignCluster& c) {
  std::string name;
  for (char ch : c.label.empty() ? c.id : c.label)
    name.push_back(text::is_alnum(ch) || ch == '-' || ch == '.' ? ch : '_');
  while (!name.empty() && name.front() == '.') name.erase(name.begin());
  if (name.size() > 80) name.resize(80);
  return name + ".md";
}

}  // namespace shotintel
