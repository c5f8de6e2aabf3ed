// shotintel command line: each pipeline stage can run on its own.

#include "shotintel/codec.hpp"
#include "shotintel/pipeline.hpp"
#include "shotintel/review_api.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace shotintel;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitStage = 3;
constexpr int kExitCheck = 4;

struct Flags {
  std::string config;
  std::string corpus;
  std::string backend;
  std::string fixture_dir;
  std::string prompt_version;
  bool tab_strip = false;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool allow_missing = false;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "pipeline config (JSON)");
  cmd->add_option("--corpus", f.corpus, "corpus directory");
  cmd->add_option("--backend", f.backend, "live or fixture")->check(CLI::IsMember({"live", "fixture"}));
  cmd->add_option("--fixture-dir", f.fixture_dir, "canned replies for the fixture backend");
  cmd->add_option("--prompt-version", f.prompt_version, "prompt version");
  cmd->add_flag("--tab-strip", f.tab_strip, "run the tab-strip pass as well");
  cmd->add_option("--seed", f.seed, "sampling seed");
  cmd->add_option("--out", f.out, "output directory");
}

// Config file first, then flags on top.
PipelineConfig effective_config(const Flags& f) {
  PipelineConfig c;
  if (!f.config.empty()) {
    c = PipelineConfig::load(f.config);
  } else if (f.corpus.empty()) {
    throw Error(ErrorCode::ConfigError, "either --config or --corpus is required");
  }
  if (!f.corpus.empty()) c.corpus_dir = f.corpus;
  if (!f.backend.empty()) c.backend_kind = f.backend == "live" ? BackendKind::Live : BackendKind::Fixture;
  if (!f.fixture_dir.empty()) c.fixture_dir = fs::path(f.fixture_dir);
  if (!f.prompt_version.empty()) c.prompt_version = f.prompt_version;
  if (f.tab_strip) c.tab_strip = true;
  if (f.seed) c.sampling.seed = *f.seed;
  if (!f.out.empty()) c.output_dir = f.out;
  return c;
}

void print(const json& j) { std::cout << j.dump(2) << "\n"; }

// Compares two report.json documents, ignoring the version and config hash.
std::vector<std::string> report_diff(json expected, json actual) {
  for (auto* j : {&expected, &actual}) {
    j->erase("tool_version");
    j->erase("config_hash");
  }
  std::vector<std::string> out;
  for (const auto& op : json::diff(expected, actual)) out.push_back(op.dump());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Infection screenshot intelligence pipeline"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tool_version());
  Flags f;

  auto* ingest = app.add_subcommand("ingest", "add a JSONL manifest to the corpus store");
  std::string manifest, image_root;
  ingest->add_option("--corpus", f.corpus, "corpus directory")->required();
  ingest->add_option("--manifest", manifest, "manifest.jsonl")->required();
  ingest->add_option("--image-root", image_root, "base for relative image paths (default: manifest dir)");
  ingest->add_flag("--allow-missing", f.allow_missing, "record entries whose image is missing");

  auto* describe = app.add_subcommand("describe", "query the vision model, filling the cache");
  add_common(describe, f);
  auto* parse = app.add_subcommand("parse", "parse cached descriptions into <out>/parsed");
  add_common(parse, f);
  auto* extract = app.add_subcommand("extract", "URL and file indicators from parsed descriptions");
  add_common(extract, f);
  auto* cluster = app.add_subcommand("cluster", "campaign clusters and playbooks");
  add_common(cluster, f);

  auto* eval = app.add_subcommand("eval", "aggregate scores, agreement and the assessment sample");
  std::string consensus_csv, coder_a, coder_b;
  bool want_sample = false;
  add_common(eval, f);
  eval->add_option("--consensus", consensus_csv, "final consensus scores (CSV)");
  eval->add_option("--coder-a", coder_a, "first coder's scores (CSV)");
  eval->add_option("--coder-b", coder_b, "second coder's scores (CSV)");
  eval->add_flag("--sample", want_sample, "print the assessment sample");

  auto* report = app.add_subcommand("report", "run every stage and write the reports");
  std::vector<std::string> formats{"json", "csv", "markdown"};
  std::string check;
  add_common(report, f);
  report->add_option("--format", formats, "json, csv, markdown")
      ->check(CLI::IsMember({"json", "csv", "markdown"}));
  report->add_option("--check", check, "expected report.json; exit 4 on mismatch");

  auto* serve = app.add_subcommand("serve", "review service");
  std::string host = "127.0.0.1", static_dir, import_consensus;
  int port = 8080;
  add_common(serve, f);
  serve->add_option("--host", host);
  serve->add_option("--port", port);
  serve->add_option("--static-dir", static_dir, "review console assets");
  serve->add_option("--import-consensus", import_consensus, "seed the store with a consensus CSV");

  CLI11_PARSE(app, argc, argv);

  PipelineConfig config;
  try {
    if (!ingest->parsed()) {
      config = effective_config(f);
      config.validate(describe->parsed() || report->parsed());
    }
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (ingest->parsed()) {
      CorpusStore store(f.corpus);
      fs::path root = image_root.empty() ? fs::path(manifest).parent_path() : fs::path(image_root);
      auto summary = store.ingest_manifest(manifest, root, IngestOptions{f.allow_missing});
      json issues = json::array();
      for (const auto& i : summary.issues) issues.push_back({{"line", i.line}, {"message", i.message}});
      print({{"ingested", summary.ingested},
             {"skipped", summary.skipped},
             {"duplicates", summary.duplicates},
             {"records", store.size()},
             {"issues", issues}});
      return 0;
    }

    CorpusStore store(config.corpus_dir);
    if (describe->parsed()) {
      auto handle = BackendHandle::make(config);
      auto fresh = describe_corpus(config, store, handle.get());
      print({{"records", store.size()}, {"fresh", fresh}, {"cache", config.effective_cache_dir().string()}});
      return 0;
    }
    if (parse->parsed()) {
      CacheOnlyBackend cache_only;
      auto parsed = describe_and_parse(config, store, cache_only);
      print({{"parsed", parsed.size()}, {"dir", config.parsed_dir().string()}});
      return 0;
    }
    if (extract->parsed() || cluster->parsed()) {
      auto r = build_report(config, store.records(), load_parsed(config, store));
      auto written = emit_artifacts(r, config.output_dir);
      json out = extract->parsed() ? json{{"urls", to_json(r.urls)},
                                          {"file_occurrences", r.file_counts.total()},
                                          {"retained_names", r.file_filter.retained_names}}
                                   : json{{"campaigns", to_json(r)["campaigns"].size()}};
      for (const auto& p : written) out["written"].push_back(p.string());
      print(out);
      return 0;
    }
    if (eval->parsed()) {
      json out = json::object();
      std::vector<ConsensusRecord> finals;
      if (!consensus_csv.empty()) finals = consensus_from_csv(read_text_file(consensus_csv));
      else if (config.consensus_scores) finals = consensus_from_csv(read_text_file(*config.consensus_scores));
      if (!finals.empty()) {
        out["aggregate"] = to_json(aggregate(finals));
        out["failure_breakdown"] = to_json(failure_breakdown(finals));
      }
      if (!coder_a.empty() || !coder_b.empty()) {
        if (coder_a.empty() || coder_b.empty())
          throw Error(ErrorCode::ConfigError, "--coder-a and --coder-b go together");
        out["agreement"] = to_json(intercoder_agreement(scores_from_csv(read_text_file(coder_a)),
                                                        scores_from_csv(read_text_file(coder_b)), finals));
      }
      if (want_sample) {
        auto ids = select_assessment_sample(load_parsed(config, store), config.sampling);
        out["sample"] = {{"seed", config.sampling.seed}, {"size", ids.size()}, {"ids", ids}};
      }
      fs::create_directories(config.output_dir);
      write_file_atomic(config.output_dir / "eval.json", out.dump(2) + "\n");
      print(out);
      return 0;
    }
    if (report->parsed()) {
      auto r = run_pipeline(config);
      std::set<ReportFormat> fmt;
      for (const auto& s : formats)
        fmt.insert(s == "json" ? ReportFormat::Json : s == "csv" ? ReportFormat::Csv : ReportFormat::Markdown);
      auto written = emit_report(r, fmt, config.output_dir);
      auto artifacts = emit_artifacts(r, config.output_dir);
      for (const auto& p : written) std::cout << p.string() << "\n";
      for (const auto& p : artifacts) std::cout << p.string() << "\n";
      if (!check.empty()) {
        auto diff = report_diff(json::parse(read_text_file(check)), to_json(r));
        if (!diff.empty()) {
          std::cerr << "check failed against " << check << ":\n";
          for (const auto& d : diff) std::cerr << "  " << d << "\n";
          return kExitCheck;
        }
        std::cerr << "check passed\n";
      }
      return 0;
    }
    if (serve->parsed()) {
      auto service = ReviewService::from_config(config);
      if (!import_consensus.empty())
        for (const auto& c : consensus_from_csv(read_text_file(import_consensus)))
          service->store().resolve_consensus(c.screenshot_id, c.aspect, c.score, c.rationale, c.decided_at);
      ReviewServer server(service, static_dir.empty() ? std::nullopt : std::optional<fs::path>(static_dir));
      std::cerr << "serving on http://" << host << ":" << port << "\n";
      server.run(host, port);
      return 0;
    }
  } catch (const StageError& e) {
    std::cerr << "stage " << e.stage() << " failed on " << e.screenshot_id() << ": " << error_name(e.code())
              << ": " << e.what() << "\n";
    return kExitStage;
  } catch (const Error& e) {
    std::cerr << error_name(e.code()) << ": " << e.what() << "\n";
    return e.code() == ErrorCode::ConfigError ? kExitConfig : kExitStage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitStage;
  }
  return 0;
}
