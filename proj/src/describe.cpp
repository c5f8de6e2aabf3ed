#include "shotintel/describe.hpp"

#include "shotintel/codec.hpp"
#include "shotintel/image.hpp"
#include "shotintel/text.hpp"

#include <atomic>
#include <ctime>
#include <thread>

namespace shotintel {

using nlohmann::json;

namespace {

std::string path_component(std::string_view s) {
  std::string out(s);
  for (auto& c : out)
    if (c == '/' || c == '\\' || c == ':') c = '_';
  return out;
}

}  // namespace

std::string utc_now_rfc3339() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::filesystem::path DescriptionCache::entry_path(const CacheKey& key) const {
  return root_ / key.sha256 / path_component(key.prompt_version) / path_component(key.model_id) /
         (to_string(key.pass) + ".txt");
}

std::optional<std::string> DescriptionCache::get(const CacheKey& key, json* meta) const {
  auto path = entry_path(key);
  if (!std::filesystem::is_regular_file(path)) return std::nullopt;
  if (meta) {
    auto meta_path = path;
    meta_path.replace_extension(".meta.json");
    *meta = std::filesystem::is_regular_file(meta_path) ? json::parse(read_text_file(meta_path))
                                                        : json::object();
  }
  return read_text_file(path);
}

void DescriptionCache::put(const CacheKey& key, const std::string& reply, const json& meta) const {
  auto path = entry_path(key);
  auto meta_path = path;
  meta_path.replace_extension(".meta.json");
  write_file_atomic(meta_path, meta.dump(2) + "\n");
  write_file_atomic(path, reply);
}

Describer::Describer(Backend& backend, DescriptionCache cache, DescribeOptions options)
    : backend_(backend), cache_(std::move(cache)), options_(std::move(options)) {}

RawDescription Describer::describe(const ScreenshotRecord& record, const PromptTemplate& prompt,
                                   PassKind pass) {
  if (pass == PassKind::TabStrip) return describe_tab_strip(record, prompt);
  CacheKey key{record.sha256, prompt.version, options_.model_id, pass};
  RawDescription out{record.id, options_.model_id, prompt.version, pass, {}, {}, false};
  json meta;
  if (auto hit = cache_.get(key, &meta)) {
    out.text = std::move(*hit);
    out.obtained_at = meta.value("obtained_at", "");
    out.from_cache = true;
    return out;
  }
  auto bytes = read_file(record.path);
  ImagePayload payload{sniff_media_type(bytes), base64_encode(bytes), record.sha256, pass};
  out.text = backend_.submit(prompt.text, payload);
  if (text::trim(out.text).empty())
    throw Error(ErrorCode::EmptyReply, "empty reply for " + record.id);
  out.obtained_at = utc_now_rfc3339();
  cache_.put(key, out.text,
             {{"screenshot_id", record.id},
              {"sha256", record.sha256},
              {"prompt_version", prompt.version},
              {"model_id", options_.model_id},
              {"pass_kind", to_string(pass)},
              {"temperature", options_.temperature},
              {"media_type", payload.media_type},
              {"obtained_at", out.obtained_at}});
  return out;
}

RawDescription Describer::describe_tab_strip(const ScreenshotRecord& record,
                                             const PromptTemplate& prompt) {
  CacheKey key{record.sha256, prompt.version, options_.model_id, PassKind::TabStrip};
  RawDescription out{record.id, options_.model_id, prompt.version, PassKind::TabStrip, {}, {}, false};
  json meta;
  if (auto hit = cache_.get(key, &meta)) {
    out.text = std::move(*hit);
    out.obtained_at = meta.value("obtained_at", "");
    out.from_cache = true;
    return out;
  }
  auto bytes = read_file(record.path);
  auto size = image_size(bytes);
  if (size.height < 10)
    throw Error(ErrorCode::ImageTooSmall,
                record.id + " is " + std::to_string(size.height) + " rows high");
  int rows = strip_rows(size.height, options_.tab_strip_fraction);
  auto strip = crop_top_rows(bytes, rows);
  ImagePayload payload{sniff_media_type(strip), base64_encode(strip), record.sha256,
                       PassKind::TabStrip};
  out.text = backend_.submit(prompt.text, payload);
  if (text::trim(out.text).empty())
    throw Error(ErrorCode::EmptyReply, "empty tab-strip reply for " + record.id);
  out.obtained_at = utc_now_rfc3339();
  cache_.put(key, out.text,
             {{"screenshot_id", record.id},
              {"sha256", record.sha256},
              {"prompt_version", prompt.version},
              {"model_id", options_.model_id},
              {"pass_kind", "TabStrip"},
              {"temperature", options_.temperature},
              {"media_type", payload.media_type},
              {"crop_rows", rows},
              {"tab_strip_fraction", options_.tab_strip_fraction},
              {"obtained_at", out.obtained_at}});
  return out;
}

std::vector<DescribeOutcome> Describer::describe_all(const std::vector<ScreenshotRecord>& records,
                                                     const PromptTemplate& prompt, PassKind pass) {
  std::vector<DescribeOutcome> outcomes(records.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < records.size(); i = next.fetch_add(1)) {
      outcomes[i].screenshot_id = records[i].id;
      try {
        outcomes[i].description = describe(records[i], prompt, pass);
      } catch (const Error& e) {
        outcomes[i].error = e;
      } catch (const std::exception& e) {
        outcomes[i].error = Error(ErrorCode::IoFailure, e.what());
      }
    }
  };
  int workers = std::max(1, std::min<int>(options_.workers, static_cast<int>(records.size())));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < workers; ++i) pool.emplace_back(work);
  }
  return outcomes;
}

}  // namespace shotintel
