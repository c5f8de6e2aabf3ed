#include "shotintel/pipeline.hpp"

#include "shotintel/codec.hpp"
#include "shotintel/csv.hpp"
#include "shotintel/numeric.hpp"
#include "shotintel/prompt.hpp"

#include <algorithm>

namespace shotintel {

using nlohmann::json;
namespace fs = std::filesystem;

std::string tool_version() { return SHOTINTEL_VERSION; }

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  if (path.is_relative() && !base.empty()) path = base / path;
  return path.lexically_normal();
}

std::string safe_file_name(std::string_view id) {
  std::string out;
  for (char c : id) out.push_back(c == '/' || c == '\\' || c == ':' ? '_' : c);
  if (out.empty() || out == "." || out == "..") out = "_" + out;
  return out;
}

}  // namespace

PipelineConfig PipelineConfig::from_json(const json& j, const fs::path& base) {
  PipelineConfig c;
  try {
    if (!j.contains("corpus_dir")) throw Error(ErrorCode::ConfigError, "corpus_dir is required");
    c.corpus_dir = resolve(base, j.at("corpus_dir").get<std::string>());
    if (j.contains("cache_dir")) c.cache_dir = resolve(base, j.at("cache_dir").get<std::string>());
    if (auto b = j.find("backend"); b != j.end()) {
      auto kind = b->value("kind", "fixture");
      if (kind == "live")
        c.backend_kind = BackendKind::Live;
      else if (kind == "fixture")
        c.backend_kind = BackendKind::Fixture;
      else
        throw Error(ErrorCode::ConfigError, "backend.kind must be live or fixture");
      if (b->contains("fixture_dir")) c.fixture_dir = resolve(base, b->at("fixture_dir").get<std::string>());
      c.backend = backend_config_from_json(*b);
    }
    c.prompt_version = j.value("prompt_version", c.prompt_version);
    if (auto l = j.find("lexicon_paths"); l != j.end()) {
      if (l->contains("iocs")) c.lexicon_path = resolve(base, l->at("iocs").get<std::string>());
      if (l->contains("themes")) c.theme_lexicon_path = resolve(base, l->at("themes").get<std::string>());
    }
    if (auto cl = j.find("clustering"); cl != j.end()) {
      c.clustering.min_cluster_size = cl->value("min_cluster_size", c.clustering.min_cluster_size);
      if (auto g = cl->find("time_gap_max_seconds"); g != cl->end() && !g->is_null())
        c.clustering.time_gap_max_seconds = g->get<std::int64_t>();
    }
    if (auto s = j.find("sampling"); s != j.end()) {
      if (auto seed = s->find("seed"); seed != s->end()) {
        if (!seed->is_number_unsigned() && !(seed->is_number_integer() && seed->get<std::int64_t>() >= 0))
          throw Error(ErrorCode::ConfigError, "sampling.seed must be an unsigned 64-bit integer");
        c.sampling.seed = seed->get<std::uint64_t>();
      }
      c.sampling.base_n = s->value("base_n", c.sampling.base_n);
      c.sampling.min_per_aspect = s->value("min_per_aspect", c.sampling.min_per_aspect);
    }
    if (j.contains("consensus_scores"))
      c.consensus_scores = resolve(base, j.at("consensus_scores").get<std::string>());
    if (j.contains("output_dir")) c.output_dir = resolve(base, j.at("output_dir").get<std::string>());
    c.tab_strip = j.value("tab_strip", c.tab_strip);
    c.tab_strip_fraction = j.value("tab_strip_fraction", c.tab_strip_fraction);
    c.workers = j.value("workers", c.workers);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }
  return c;
}

PipelineConfig PipelineConfig::load(const fs::path& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }
  return from_json(j, path.parent_path());
}

json PipelineConfig::to_json() const {
  json backend_json = shotintel::to_json(backend);
  backend_json["kind"] = backend_kind == BackendKind::Live ? "live" : "fixture";
  if (fixture_dir) backend_json["fixture_dir"] = fixture_dir->generic_string();
  json j = {{"corpus_dir", corpus_dir.generic_string()},
            {"backend", backend_json},
            {"prompt_version", prompt_version},
            {"lexicon_paths",
             {{"iocs", lexicon_path.generic_string()}, {"themes", theme_lexicon_path.generic_string()}}},
            {"clustering",
             {{"min_cluster_size", clustering.min_cluster_size},
              {"time_gap_max_seconds", clustering.time_gap_max_seconds
                                           ? json(*clustering.time_gap_max_seconds)
                                           : json(nullptr)}}},
            {"sampling",
             {{"seed", sampling.seed},
              {"base_n", sampling.base_n},
              {"min_per_aspect", sampling.min_per_aspect},
              {"generator", "mt19937_64"}}},
            {"output_dir", output_dir.generic_string()},
            {"tab_strip", tab_strip},
            {"tab_strip_fraction", tab_strip_fraction},
            {"workers", workers}};
  if (cache_dir) j["cache_dir"] = cache_dir->generic_string();
  if (consensus_scores) j["consensus_scores"] = consensus_scores->generic_string();
  return j;
}

std::string PipelineConfig::hash() const { return sha256_hex(to_json().dump()); }

void PipelineConfig::validate(bool needs_backend) const {
  auto need = [](const fs::path& p, const char* what) {
    if (!fs::exists(p)) throw Error(ErrorCode::ConfigError, std::string(what) + " not found: " + p.string());
  };
  need(corpus_dir, "corpus_dir");
  if (needs_backend && backend_kind == BackendKind::Fixture) {
    if (!fixture_dir) throw Error(ErrorCode::ConfigError, "fixture backend needs fixture_dir");
    need(*fixture_dir, "fixture_dir");
  }
  if (!lexicon_path.empty()) need(lexicon_path, "lexicon");
  if (!theme_lexicon_path.empty()) need(theme_lexicon_path, "theme lexicon");
  if (consensus_scores) need(*consensus_scores, "consensus_scores");
  try {
    build_prompt(prompt_version);
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }
  if (clustering.min_cluster_size < 1) throw Error(ErrorCode::ConfigError, "min_cluster_size must be >= 1");
  if (!(tab_strip_fraction > 0.0 && tab_strip_fraction <= 1.0))
    throw Error(ErrorCode::ConfigError, "tab_strip_fraction must be in (0, 1]");
  if (workers < 1) throw Error(ErrorCode::ConfigError, "workers must be >= 1");
  shotintel::validate(backend);
}

fs::path PipelineConfig::effective_cache_dir() const { return cache_dir ? *cache_dir : corpus_dir / "cache"; }

std::string PipelineConfig::model_id() const {
  return backend_kind == BackendKind::Fixture ? "fixture" : backend.model;
}

BackendHandle BackendHandle::make(const PipelineConfig& config) {
  BackendHandle h;
  if (config.backend_kind == BackendKind::Fixture) {
    if (!config.fixture_dir) throw Error(ErrorCode::ConfigError, "fixture backend needs fixture_dir");
    h.inner_ = std::make_unique<FixtureBackend>(*config.fixture_dir);
    h.outer_ = h.inner_.get();
    return h;
  }
  h.clock_ = std::make_unique<SystemClock>();
  h.inner_ = std::make_unique<OpenAiBackend>(config.backend);
  h.outer_owned_ = std::make_unique<GatedBackend>(*h.inner_, config.backend, *h.clock_);
  h.outer_ = h.outer_owned_.get();
  return h;
}

std::string CacheOnlyBackend::submit(const std::string&, const ImagePayload& image) {
  throw BackendError(ErrorCode::BackendUnavailable,
                     "no cached description for " + image.source_sha256 + " (" + to_string(image.pass) + ")", 0,
                     false);
}

namespace {

Describer make_describer(const PipelineConfig& config, Backend& backend) {
  DescribeOptions options;
  options.model_id = config.model_id();
  options.temperature = config.backend.temperature;
  options.tab_strip_fraction = config.tab_strip_fraction;
  options.workers = config.workers;
  return Describer(backend, DescriptionCache(config.effective_cache_dir()), options);
}

}  // namespace

std::size_t describe_corpus(const PipelineConfig& config, const CorpusStore& store, Backend& backend) {
  auto prompt = build_prompt(config.prompt_version);
  auto describer = make_describer(config, backend);
  auto records = store.records();
  std::size_t fresh = 0;
  std::optional<StageError> first_error;
  auto tally = [&](const std::vector<DescribeOutcome>& outcomes, const char* stage, bool tolerate_small) {
    for (const auto& o : outcomes) {
      if (o.description) {
        if (!o.description->from_cache) ++fresh;
      } else if (!(tolerate_small && o.error->code() == ErrorCode::ImageTooSmall) && !first_error) {
        first_error.emplace(stage, o.screenshot_id, *o.error);
      }
    }
  };
  tally(describer.describe_all(records, prompt, PassKind::FullImage), "describe", false);
  if (config.tab_strip)
    tally(describer.describe_all(records, prompt, PassKind::TabStrip), "describe-tab-strip", true);
  if (first_error) throw *first_error;
  return fresh;
}

std::vector<ParsedDescription> describe_and_parse(const PipelineConfig& config, const CorpusStore& store,
                                                  Backend& backend) {
  auto prompt = build_prompt(config.prompt_version);
  auto describer = make_describer(config, backend);

  auto records = store.records();
  auto outcomes = describer.describe_all(records, prompt, PassKind::FullImage);
  std::vector<DescribeOutcome> strips;
  if (config.tab_strip) strips = describer.describe_all(records, prompt, PassKind::TabStrip);

  fs::create_directories(config.parsed_dir());
  std::vector<ParsedDescription> parsed;
  std::optional<StageError> first_error;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& o = outcomes[i];
    if (!o.description) {
      if (!first_error) first_error.emplace("describe", o.screenshot_id, *o.error);
      continue;
    }
    auto p = parse_description(*o.description);
    if (config.tab_strip && i < strips.size()) {
      const auto& s = strips[i];
      if (s.description) {
        auto strip = parse_description(*s.description);
        if (p.tabs.empty() && !strip.tabs.empty()) {
          p.tabs = strip.tabs;
          p.unparsed_tab_lines.insert(p.unparsed_tab_lines.end(), strip.unparsed_tab_lines.begin(),
                                      strip.unparsed_tab_lines.end());
          p.sections_present.insert("Browser Tabs Analysis");
        }
      } else if (s.error && s.error->code() != ErrorCode::ImageTooSmall && !first_error) {
        first_error.emplace("describe-tab-strip", s.screenshot_id, *s.error);
      }
    }
    write_file_atomic(config.parsed_dir() / (safe_file_name(p.screenshot_id) + ".json"),
                      to_json(p).dump(2) + "\n");
    parsed.push_back(std::move(p));
  }
  if (first_error) throw *first_error;
  return parsed;
}

std::vector<ParsedDescription> load_parsed(const PipelineConfig& config, const CorpusStore& store) {
  std::vector<ParsedDescription> out;
  for (const auto& r : store.records()) {
    auto path = config.parsed_dir() / (safe_file_name(r.id) + ".json");
    if (!fs::exists(path)) throw Error(ErrorCode::CorpusNotParsed, "no parsed description for " + r.id);
    try {
      out.push_back(parsed_from_json(json::parse(read_text_file(path))));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::CorpusNotParsed, path.string() + ": " + e.what());
    }
  }
  return out;
}

RunReport build_report(const PipelineConfig& config, const std::vector<ScreenshotRecord>& records,
                       std::vector<ParsedDescription> parsed) {
  auto lex = config.lexicon_path.empty() ? Lexicons::bundled() : Lexicons::load(config.lexicon_path);
  auto themes = config.theme_lexicon_path.empty() ? ThemeLexicon::bundled()
                                                  : ThemeLexicon::load(config.theme_lexicon_path);
  RunReport r;
  r.tool_version = tool_version();
  r.config_hash = config.hash();

  r.corpus.n_records = records.size();
  r.corpus.n_parsed = parsed.size();
  for (auto c : {ScreenshotCategory::WebContent, ScreenshotCategory::FileSystem, ScreenshotCategory::Hybrid})
    r.corpus.categories[c] = 0;
  for (const auto& p : parsed) {
    if (p.no_sections_found) ++r.corpus.n_no_sections;
    auto d = classify_screenshot(p);
    ++r.corpus.categories[d.category];
    if (d.low_confidence) ++r.corpus.n_low_confidence;
  }
  r.corpus.families = family_stats(family_counts(records));

  try {
    r.sample = select_assessment_sample(parsed, config.sampling);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::CorpusTooSmall) throw;
  }

  r.analysis = analyze(std::move(parsed), records, lex, themes);
  const auto& a = r.analysis;
  r.urls = a.urls.stats;
  r.file_counts = a.files.counts;
  r.file_filter = a.filter;
  r.extensions = extension_breakdown(a.files.files);

  std::vector<ThemeTag> tags;
  for (const auto& p : a.parsed) tags.push_back(a.tags.at(p.screenshot_id));
  r.themes = theme_histogram(tags);

  for (const auto& cluster : cluster_campaigns(build_indicators(a, lex), config.clustering)) {
    CampaignSection s;
    s.report = campaign_report(cluster, a, themes);
    for (const auto& [name, terms] : themes.secondary_terms)
      s.secondary_correlation[name] = minecraft_correlation(cluster, a, terms);
    r.campaigns.push_back(std::move(s));
  }

  if (config.consensus_scores) {
    auto finals = consensus_from_csv(read_text_file(*config.consensus_scores));
    r.eval = EvalSection{aggregate(finals), failure_breakdown(finals)};
  }
  return r;
}

RunReport run_pipeline(const PipelineConfig& config, Backend* backend) {
  config.validate();
  CorpusStore store(config.corpus_dir);
  std::optional<BackendHandle> handle;
  if (!backend) {
    handle.emplace(BackendHandle::make(config));
    backend = &handle->get();
  }
  auto parsed = describe_and_parse(config, store, *backend);
  return build_report(config, store.records(), std::move(parsed));
}

namespace {

json family_json(const FamilyStats& f) {
  return {{"family", f.family},
          {"n_logs", f.n_logs},
          {"n_with_screenshot", f.n_with_screenshot},
          {"n_non_commercial", f.n_non_commercial},
          {"pct_non_commercial", f.pct_non_commercial}};
}

}  // namespace

json to_json(const RunReport& r) {
  json categories = json::object();
  for (const auto& [c, n] : r.corpus.categories) categories[to_string(c)] = n;
  json families = json::array();
  for (const auto& f : r.corpus.families.rows) families.push_back(family_json(f));
  json extensions = json::object();
  for (const auto& [e, n] : r.extensions) extensions[to_string(e)] = n;
  json campaigns = json::array();
  for (const auto& c : r.campaigns) {
    auto j = to_json(c.report);
    j["secondary_correlation"] = c.secondary_correlation;
    campaigns.push_back(std::move(j));
  }
  json sample = nullptr;
  if (r.sample) sample = {{"size", r.sample->size()}, {"ids", *r.sample}};
  json eval = nullptr;
  if (r.eval) eval = {{"aggregate", to_json(r.eval->aggregate)}, {"failure_breakdown", to_json(r.eval->failures)}};
  return {{"tool_version", r.tool_version},
          {"config_hash", r.config_hash},
          {"corpus",
           {{"n_records", r.corpus.n_records},
            {"n_parsed", r.corpus.n_parsed},
            {"n_no_sections", r.corpus.n_no_sections},
            {"n_low_confidence", r.corpus.n_low_confidence},
            {"categories", categories},
            {"families", {{"rows", families}, {"total", family_json(r.corpus.families.total)}}}}},
          {"urls", to_json(r.urls)},
          {"files",
           {{"occurrences", r.file_counts.total()},
            {"installer", r.file_counts.installer},
            {"other", r.file_counts.other},
            {"corroborated_names", r.file_filter.corroborated_names},
            {"retained_names", r.file_filter.retained_names},
            {"retained_occurrences", r.file_filter.retained_occurrences},
            {"extensions", extensions}}},
          {"themes", to_json(r.themes)},
          {"campaigns", campaigns},
          {"sample", sample},
          {"eval", eval}};
}

namespace {

std::string row(std::initializer_list<std::string> cells) {
  std::string s = "|";
  for (const auto& c : cells) s += " " + c + " |";
  return s + "\n";
}

std::string num(std::uint64_t n) { return std::to_string(n); }
std::string pct(double p) { return format_fixed(p, 2); }

}  // namespace

std::string report_to_markdown(const RunReport& r) {
  std::string md = "# Run report\n\n";
  md += "- tool version: " + r.tool_version + "\n- config hash: " + r.config_hash + "\n\n";

  md += "## Corpus\n\n";
  md += row({"Family", "Logs", "With screenshot", "Non-commercial", "% non-commercial"});
  md += "|---|---|---|---|---|\n";
  for (const auto& f : r.corpus.families.rows)
    md += row({f.family, num(f.n_logs), num(f.n_with_screenshot), num(f.n_non_commercial),
               pct(f.pct_non_commercial)});
  const auto& t = r.corpus.families.total;
  md += row({"Total", num(t.n_logs), num(t.n_with_screenshot), num(t.n_non_commercial), pct(t.pct_non_commercial)});
  md += "\n" + row({"Metric", "Value"}) + "|---|---|\n";
  md += row({"records", num(r.corpus.n_records)});
  md += row({"parsed", num(r.corpus.n_parsed)});
  md += row({"no sections", num(r.corpus.n_no_sections)});
  md += row({"low confidence", num(r.corpus.n_low_confidence)});
  for (const auto& [c, n] : r.corpus.categories) md += row({to_string(c), num(n)});

  md += "\n## URLs\n\n" + row({"Metric", "Value"}) + "|---|---|\n";
  md += row({"total_unique", num(r.urls.total_unique)});
  md += row({"benign", num(r.urls.benign)});
  md += row({"actionable", num(r.urls.actionable)});
  md += row({"truncated", num(r.urls.truncated)});
  md += row({"VideoPlatform", num(r.urls.video)});
  md += row({"FileDistribution", num(r.urls.distribution)});
  md += row({"OtherDomain", num(r.urls.other)});
  md += row({"rejected_candidates", num(r.urls.rejected_candidates)});

  md += "\n## Files\n\n" + row({"Metric", "Value"}) + "|---|---|\n";
  md += row({"occurrences", num(r.file_counts.total())});
  md += row({"installer", num(r.file_counts.installer)});
  md += row({"other", num(r.file_counts.other)});
  md += row({"corroborated_names", num(r.file_filter.corroborated_names)});
  md += row({"retained_names", num(r.file_filter.retained_names)});
  md += row({"retained_occurrences", num(r.file_filter.retained_occurrences)});
  for (const auto& [e, n] : r.extensions) md += row({to_string(e), num(n)});

  md += "\n## Themes\n\n" + row({"Theme", "Count", "Percent"}) + "|---|---|---|\n";
  for (const auto& [th, n] : r.themes.counts) md += row({to_string(th), num(n), pct(r.themes.percent.at(th))});

  md += "\n## Campaigns\n\n";
  md += row({"Id", "Label", "Size", "Duration", "Languages", "Playbook steps"}) + "|---|---|---|---|---|---|\n";
  for (const auto& c : r.campaigns) {
    const auto& cl = c.report.cluster;
    md += row({cl.id, cl.label, num(cl.size),
               c.report.duration_seconds ? format_duration(*c.report.duration_seconds) : "-",
               num(cl.languages.size()), num(c.report.playbook.size())});
  }

  if (r.sample) md += "\n## Assessment sample\n\n" + row({"Metric", "Value"}) + "|---|---|\n" +
                      row({"sample_size", num(r.sample->size())});
  if (r.eval) {
    md += "\n## Assessment\n\n" + aggregate_to_markdown(r.eval->aggregate);
    md += "\n" + row({"Tab failures", "Suspicious score", "Count"}) + "|---|---|---|\n";
    for (const auto& [s, n] : r.eval->failures.suspicious)
      md += row({num(r.eval->failures.n_cases), std::to_string(s), num(n)});
  }
  return md;
}

std::string report_to_csv(const RunReport& r) {
  std::string out = "section,metric,value\n";
  auto add = [&](const std::string& section, const std::string& metric, const std::string& value) {
    out += csv::format_row({section, metric, value});
  };
  add("corpus", "n_records", num(r.corpus.n_records));
  add("corpus", "n_parsed", num(r.corpus.n_parsed));
  add("corpus", "n_no_sections", num(r.corpus.n_no_sections));
  add("corpus", "n_low_confidence", num(r.corpus.n_low_confidence));
  for (const auto& [c, n] : r.corpus.categories) add("corpus", "category." + to_string(c), num(n));
  for (const auto& f : r.corpus.families.rows)
    add("families", f.family + ".pct_non_commercial", pct(f.pct_non_commercial));
  add("families", "total.pct_non_commercial", pct(r.corpus.families.total.pct_non_commercial));
  auto urls = to_json(r.urls);
  for (const auto& [k, v] : urls.items()) add("urls", k, v.dump());
  add("files", "occurrences", num(r.file_counts.total()));
  add("files", "installer", num(r.file_counts.installer));
  add("files", "other", num(r.file_counts.other));
  add("files", "corroborated_names", num(r.file_filter.corroborated_names));
  add("files", "retained_names", num(r.file_filter.retained_names));
  add("files", "retained_occurrences", num(r.file_filter.retained_occurrences));
  for (const auto& [e, n] : r.extensions) add("files", "extension." + to_string(e), num(n));
  for (const auto& [th, n] : r.themes.counts) {
    add("themes", to_string(th) + ".count", num(n));
    add("themes", to_string(th) + ".percent", pct(r.themes.percent.at(th)));
  }
  for (const auto& c : r.campaigns) {
    const auto& cl = c.report.cluster;
    add("campaigns", cl.id + ".label", cl.label);
    add("campaigns", cl.id + ".size", num(cl.size));
    if (c.report.duration_seconds) add("campaigns", cl.id + ".duration_seconds", std::to_string(*c.report.duration_seconds));
    add("campaigns", cl.id + ".playbook_steps", num(c.report.playbook.size()));
  }
  if (r.sample) add("sample", "size", num(r.sample->size()));
  if (r.eval) {
    for (const auto& a : r.eval->aggregate.aspects)
      for (const auto& [s, n] : a.counts) {
        add("eval", to_string(a.aspect) + "." + std::to_string(s) + ".count", num(n));
        add("eval", to_string(a.aspect) + "." + std::to_string(s) + ".percent", pct(a.percent.at(s)));
      }
    add("eval", "tab_failures", num(r.eval->failures.n_cases));
  }
  return out;
}

std::vector<fs::path> emit_report(const RunReport& r, const std::set<ReportFormat>& formats, const fs::path& dir) {
  std::vector<fs::path> written;
  try {
    fs::create_directories(dir);
  } catch (const fs::filesystem_error& e) {
    throw Error(ErrorCode::IoFailure, e.what());
  }
  auto put = [&](const std::string& name, const std::string& content) {
    write_file_atomic(dir / name, content);
    written.push_back(dir / name);
  };
  if (formats.contains(ReportFormat::Json)) put("report.json", to_json(r).dump(2) + "\n");
  if (formats.contains(ReportFormat::Csv)) put("report.csv", report_to_csv(r));
  if (formats.contains(ReportFormat::Markdown)) put("report.md", report_to_markdown(r));
  json provenance = {{"tool_version", r.tool_version},
                     {"config_hash", r.config_hash},
                     {"generated_at", utc_now_rfc3339()}};
  put("provenance.json", provenance.dump(2) + "\n");
  return written;
}

std::vector<fs::path> emit_artifacts(const RunReport& r, const fs::path& dir) {
  std::vector<fs::path> written;
  auto put = [&](const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    write_file_atomic(path, content);
    written.push_back(path);
  };
  put(dir / "urls.csv", urls_to_csv(r.analysis.urls.urls));
  put(dir / "files.csv", files_to_csv(r.analysis.files.files));
  json clusters = json::array();
  for (const auto& c : r.campaigns) clusters.push_back(to_json(c.report.cluster));
  put(dir / "campaigns.json", clusters.dump(2) + "\n");
  std::set<std::string> used;
  for (const auto& c : r.campaigns) {
    auto name = report_file_name(c.report.cluster);
    if (!used.insert(name).second) name = c.report.cluster.id + "-" + name;
    put(dir / "reports" / "campaigns" / name, to_markdown(c.report));
  }
  return written;
}

}  // namespace shotintel
