#include "shotintel/corpus.hpp"

#include "shotintel/codec.hpp"
#include "shotintel/error.hpp"
#include "shotintel/image.hpp"
#include "shotintel/numeric.hpp"
#include "shotintel/text.hpp"

#include <fstream>
#include <set>

namespace shotintel {

using nlohmann::json;

namespace {

constexpr const char* kRecordFile = "records.jsonl";
constexpr const char* kIndexFile = "records.idx";

const std::set<std::string, std::less<>> kKnownKeys = {
    "id", "path", "family", "log_id", "captured_at", "language_hint", "commercial_watermark"};

bool optional_string(const json& j, const char* key, std::string& out, std::string& why) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return true;
  if (!it->is_string()) {
    why = std::string("key '") + key + "' must be a string";
    return false;
  }
  out = it->get<std::string>();
  return true;
}

}  // namespace

std::string to_string(ScreenshotCategory c) {
  switch (c) {
    case ScreenshotCategory::WebContent: return "WebContent";
    case ScreenshotCategory::FileSystem: return "FileSystem";
    case ScreenshotCategory::Hybrid: return "Hybrid";
  }
  return "WebContent";
}

std::optional<ScreenshotCategory> category_from_string(std::string_view s) {
  if (s == "WebContent") return ScreenshotCategory::WebContent;
  if (s == "FileSystem") return ScreenshotCategory::FileSystem;
  if (s == "Hybrid") return ScreenshotCategory::Hybrid;
  return std::nullopt;
}

bool operator==(const ScreenshotRecord& a, const ScreenshotRecord& b) {
  auto ts_same = [](const std::optional<Timestamp>& x, const std::optional<Timestamp>& y) {
    if (x.has_value() != y.has_value()) return false;
    return !x || (x->epoch_seconds == y->epoch_seconds && x->original == y->original);
  };
  return a.id == b.id && a.path == b.path && a.sha256 == b.sha256 && a.family == b.family &&
         a.log_id == b.log_id && ts_same(a.captured_at, b.captured_at) &&
         a.language_hint == b.language_hint && a.category == b.category &&
         a.commercial_watermark == b.commercial_watermark && a.extra == b.extra &&
         a.aliases == b.aliases;
}

json record_to_json(const ScreenshotRecord& r) {
  json j = {{"id", r.id},         {"path", r.path},     {"sha256", r.sha256},
            {"family", r.family}, {"log_id", r.log_id}, {"commercial_watermark", r.commercial_watermark}};
  j["captured_at"] = r.captured_at ? json(r.captured_at->original) : json(nullptr);
  j["language_hint"] = r.language_hint ? json(*r.language_hint) : json(nullptr);
  j["category"] = r.category ? json(to_string(*r.category)) : json(nullptr);
  j["extra"] = r.extra;
  json aliases = json::array();
  for (const auto& a : r.aliases)
    aliases.push_back({{"id", a.id}, {"log_id", a.log_id}, {"path", a.path}});
  j["aliases"] = aliases;
  return j;
}

ScreenshotRecord record_from_json(const json& j) {
  ScreenshotRecord r;
  r.id = j.at("id").get<std::string>();
  r.path = j.at("path").get<std::string>();
  r.sha256 = j.at("sha256").get<std::string>();
  r.family = j.at("family").get<std::string>();
  r.log_id = j.value("log_id", "");
  r.commercial_watermark = j.value("commercial_watermark", false);
  if (auto it = j.find("captured_at"); it != j.end() && it->is_string())
    r.captured_at = parse_timestamp(it->get<std::string>());
  if (auto it = j.find("language_hint"); it != j.end() && it->is_string())
    r.language_hint = it->get<std::string>();
  if (auto it = j.find("category"); it != j.end() && it->is_string())
    r.category = category_from_string(it->get<std::string>());
  if (auto it = j.find("extra"); it != j.end() && it->is_object()) r.extra = *it;
  if (auto it = j.find("aliases"); it != j.end() && it->is_array())
    for (const auto& a : *it)
      r.aliases.push_back({a.value("id", ""), a.value("log_id", ""), a.value("path", "")});
  return r;
}

CorpusStore::CorpusStore(std::filesystem::path directory) : dir_(std::move(directory)) {
  std::filesystem::create_directories(dir_);
  reload();
}

void CorpusStore::reload() {
  order_.clear();
  by_id_.clear();
  alias_to_id_.clear();
  sha_to_id_.clear();
  offsets_.clear();
  std::ifstream in(dir_ / kRecordFile, std::ios::binary);
  if (!in) return;
  std::string line;
  std::uint64_t offset = 0;
  while (std::getline(in, line)) {
    std::uint64_t line_offset = offset;
    offset += line.size() + 1;
    if (text::trim(line).empty()) continue;
    json doc = json::parse(line);
    if (doc.contains("alias_of")) {
      const auto canonical = doc.at("alias_of").get<std::string>();
      auto it = by_id_.find(canonical);
      if (it == by_id_.end()) continue;
      ProvenanceAlias alias{doc.value("id", ""), doc.value("log_id", ""), doc.value("path", "")};
      it->second.aliases.push_back(alias);
      alias_to_id_[alias.id] = canonical;
      continue;
    }
    auto rec = record_from_json(doc);
    sha_to_id_[rec.sha256] = rec.id;
    offsets_[rec.id] = line_offset;
    order_.push_back(rec.id);
    by_id_[rec.id] = std::move(rec);
  }
}

void CorpusStore::append_line(const std::string& canonical_id, const json& doc) {
  auto record_path = dir_ / kRecordFile;
  std::uint64_t offset = std::filesystem::exists(record_path)
                             ? std::filesystem::file_size(record_path)
                             : 0;
  {
    std::ofstream out(record_path, std::ios::binary | std::ios::app);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot append to " + record_path.string());
    out << doc.dump() << '\n';
  }
  std::ofstream idx(dir_ / kIndexFile, std::ios::binary | std::ios::app);
  if (!idx) throw Error(ErrorCode::IoFailure, "cannot append to index");
  idx << doc.at("id").get<std::string>() << '\t' << offset << '\t' << canonical_id << '\n';
}

CorpusSummary CorpusStore::ingest_manifest(const std::filesystem::path& manifest,
                                           const std::filesystem::path& image_root,
                                           const IngestOptions& options) {
  std::ifstream in(manifest, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open manifest " + manifest.string());
  CorpusSummary summary;
  std::string line;
  std::size_t line_no = 0;
  auto malformed = [&](std::string why) {
    summary.issues.push_back({line_no, "MalformedManifestLine: " + why});
    ++summary.skipped;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::parse_error& e) {
      malformed(e.what());
      continue;
    }
    if (!doc.is_object()) {
      malformed("line is not a JSON object");
      continue;
    }
    ScreenshotRecord rec;
    std::string why;
    bool ok = true;
    for (const char* key : {"id", "path", "family"}) {
      auto it = doc.find(key);
      if (it == doc.end() || !it->is_string() || it->get<std::string>().empty()) {
        why = std::string("required key '") + key + "' missing or not a non-empty string";
        ok = false;
        break;
      }
    }
    std::string captured, language;
    if (ok) {
      rec.id = doc["id"].get<std::string>();
      rec.family = doc["family"].get<std::string>();
      ok = optional_string(doc, "log_id", rec.log_id, why) &&
           optional_string(doc, "captured_at", captured, why) &&
           optional_string(doc, "language_hint", language, why);
    }
    if (ok && !captured.empty()) {
      rec.captured_at = parse_timestamp(captured);
      if (!rec.captured_at) {
        why = "captured_at '" + captured + "' is not an RFC 3339 date-time";
        ok = false;
      }
    }
    if (ok) {
      if (auto it = doc.find("commercial_watermark"); it != doc.end() && !it->is_null()) {
        if (!it->is_boolean()) {
          why = "key 'commercial_watermark' must be a boolean";
          ok = false;
        } else {
          rec.commercial_watermark = it->get<bool>();
        }
      }
    }
    if (!ok) {
      malformed(why);
      continue;
    }
    if (!language.empty()) rec.language_hint = language;
    for (auto it = doc.begin(); it != doc.end(); ++it)
      if (!kKnownKeys.contains(it.key())) rec.extra[it.key()] = it.value();

    auto image_path = (image_root / doc["path"].get<std::string>()).lexically_normal();
    rec.path = image_path.string();
    if (!std::filesystem::is_regular_file(image_path)) {
      if (!options.allow_missing)
        throw Error(ErrorCode::MissingImage,
                    "line " + std::to_string(line_no) + ": " + image_path.string());
      summary.issues.push_back({line_no, "MissingImage: " + image_path.string()});
      ++summary.skipped;
      continue;
    }
    rec.sha256 = sha256_hex(read_file(image_path));

    std::string existing_for_id;
    if (auto it = by_id_.find(rec.id); it != by_id_.end()) existing_for_id = it->second.id;
    if (auto it = alias_to_id_.find(rec.id); it != alias_to_id_.end()) existing_for_id = it->second;
    if (!existing_for_id.empty()) {
      if (by_id_.at(existing_for_id).sha256 != rec.sha256)
        throw Error(ErrorCode::DuplicateId, "line " + std::to_string(line_no) + ": id '" +
                                                rec.id + "' already names different content");
      ++summary.duplicates;
      continue;
    }
    if (auto it = sha_to_id_.find(rec.sha256); it != sha_to_id_.end()) {
      const std::string canonical = it->second;
      json alias = {{"alias_of", canonical}, {"id", rec.id}, {"log_id", rec.log_id}, {"path", rec.path}};
      append_line(canonical, alias);
      by_id_.at(canonical).aliases.push_back({rec.id, rec.log_id, rec.path});
      alias_to_id_[rec.id] = canonical;
      ++summary.duplicates;
      continue;
    }
    auto record_path = dir_ / kRecordFile;
    std::uint64_t offset =
        std::filesystem::exists(record_path) ? std::filesystem::file_size(record_path) : 0;
    append_line(rec.id, record_to_json(rec));
    offsets_[rec.id] = offset;
    sha_to_id_[rec.sha256] = rec.id;
    order_.push_back(rec.id);
    by_id_[rec.id] = std::move(rec);
    ++summary.ingested;
  }
  return summary;
}

std::optional<ScreenshotRecord> CorpusStore::load(std::string_view id) const {
  std::string canonical(id);
  if (auto it = alias_to_id_.find(id); it != alias_to_id_.end()) canonical = it->second;
  // Offsets come from records.idx on disk; fall back to the in-memory table.
  std::optional<std::uint64_t> offset;
  {
    std::ifstream idx(dir_ / kIndexFile, std::ios::binary);
    std::string line;
    while (std::getline(idx, line)) {
      auto parts = text::split(line, '\t');
      if (parts.size() >= 2 && parts[0] == canonical) {
        offset = std::stoull(parts[1]);
        break;
      }
    }
  }
  if (!offset) {
    auto it = offsets_.find(canonical);
    if (it == offsets_.end()) return std::nullopt;
    offset = it->second;
  }
  std::ifstream in(dir_ / kRecordFile, std::ios::binary);
  in.seekg(static_cast<std::streamoff>(*offset));
  std::string line;
  if (!std::getline(in, line)) return std::nullopt;
  auto rec = record_from_json(json::parse(line));
  if (auto it = by_id_.find(canonical); it != by_id_.end()) rec.aliases = it->second.aliases;
  return rec;
}

std::vector<ScreenshotRecord> CorpusStore::records() const {
  std::vector<ScreenshotRecord> out;
  out.reserve(order_.size());
  for (const auto& id : order_) out.push_back(by_id_.at(id));
  return out;
}

EncodedImage encode_image(const ScreenshotRecord& record) {
  auto bytes = read_file(record.path);
  EncodedImage enc;
  enc.media_type = sniff_media_type(bytes);
  enc.base64 = base64_encode(bytes);
  return enc;
}

FamilyTable family_stats(const std::vector<FamilyCounts>& rows) {
  FamilyTable table;
  table.total.family = "Total";
  auto make = [](const FamilyCounts& c) {
    if (c.n_non_commercial > c.n_with_screenshot || c.n_with_screenshot > c.n_logs)
      throw Error(ErrorCode::InconsistentCounts, "family '" + c.family + "'");
    FamilyStats s{c.family, c.n_logs, c.n_with_screenshot, c.n_non_commercial, 0.0};
    s.pct_non_commercial = percent(c.n_non_commercial, c.n_logs, 2);
    return s;
  };
  FamilyCounts sum{"Total", 0, 0, 0};
  for (const auto& row : rows) {
    table.rows.push_back(make(row));
    sum.n_logs += row.n_logs;
    sum.n_with_screenshot += row.n_with_screenshot;
    sum.n_non_commercial += row.n_non_commercial;
  }
  table.total = make(sum);
  return table;
}

std::vector<FamilyCounts> family_counts(const std::vector<ScreenshotRecord>& records) {
  std::map<std::string, std::set<std::string>> logs, non_commercial;
  for (const auto& r : records) {
    auto log = r.log_id.empty() ? "\x01" + r.id : r.log_id;
    logs[r.family].insert(log);
    if (!r.commercial_watermark) non_commercial[r.family].insert(log);
  }
  std::vector<FamilyCounts> out;
  for (const auto& [family, ids] : logs)
    out.push_back({family, ids.size(), ids.size(), non_commercial[family].size()});
  return out;
}

}  // namespace shotintel
