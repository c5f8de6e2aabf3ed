#include "shotintel/review_api.hpp"

#include "shotintel/codec.hpp"
#include "shotintel/image.hpp"
#include "shotintel/pipeline.hpp"
#include "shotintel/text.hpp"

#include <httplib.h>

#include <algorithm>
#include <set>

namespace shotintel {

using nlohmann::json;

ReviewService::ReviewService(std::vector<ScreenshotRecord> records, std::vector<ParsedDescription> parsed,
                             std::shared_ptr<ScoreStore> store)
    : parsed_(std::move(parsed)), store_(std::move(store)) {
  for (auto& r : records) records_.emplace(r.id, std::move(r));
  for (std::size_t i = 0; i < parsed_.size(); ++i) parsed_index_.emplace(parsed_[i].screenshot_id, i);
  if (!store_) store_ = std::make_shared<ScoreStore>();
}

std::shared_ptr<ReviewService> ReviewService::from_config(const PipelineConfig& config) {
  CorpusStore corpus(config.corpus_dir);
  auto parsed = load_parsed(config, corpus);
  auto store = std::make_shared<ScoreStore>(config.output_dir / "scores");
  return std::make_shared<ReviewService>(corpus.records(), std::move(parsed), std::move(store));
}

std::vector<std::string> ReviewService::item_ids() const {
  std::set<std::string> ids;
  for (const auto& p : parsed_) ids.insert(p.screenshot_id);
  for (const auto& s : store_->log()) ids.insert(s.screenshot_id);
  for (const auto& c : store_->consensus_log()) ids.insert(c.screenshot_id);
  return {ids.begin(), ids.end()};
}

bool ReviewService::has_item(std::string_view id) const {
  if (parsed_index_.contains(id)) return true;
  auto ids = item_ids();
  return std::binary_search(ids.begin(), ids.end(), id);
}

const ScreenshotRecord* ReviewService::record(const std::string& id) const {
  auto it = records_.find(id);
  return it == records_.end() ? nullptr : &it->second;
}

const ParsedDescription* ReviewService::parsed(const std::string& id) const {
  auto it = parsed_index_.find(id);
  return it == parsed_index_.end() ? nullptr : &parsed_[it->second];
}

json ReviewService::item_json(const std::string& id) const {
  json j;
  j["screenshot_id"] = id;
  j["image"] = record(id) ? json("/api/items/" + id + "/image") : json(nullptr);
  const auto* p = parsed(id);
  j["parsed"] = p ? to_json(*p) : json(nullptr);
  json applicable = json::object();
  if (p)
    for (auto a : kAspects) applicable[to_string(a)] = predicted_applicable(a, *p);
  j["predicted_applicable"] = applicable;
  json scores = json::object();
  for (const auto& s : store_->current_scores())
    if (s.screenshot_id == id) {
      if (!scores.contains(s.coder_id)) scores[s.coder_id] = json::array();
      scores[s.coder_id].push_back(to_json(s));
    }
  j["scores"] = scores;
  json consensus = json::array();
  for (const auto& c : store_->consensus())
    if (c.screenshot_id == id) consensus.push_back(to_json(c));
  j["consensus"] = consensus;
  j["status"] = to_string(store_->status(id));
  return j;
}

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view name, const std::string& message) {
  send_json(res, status, {{"error", name}, {"message", message}});
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::IllegalScoreValue: return 422;
    case ErrorCode::NotFound:
    case ErrorCode::MissingImage: return 404;
    case ErrorCode::NoOverlap:
    case ErrorCode::CorpusTooSmall: return 409;
    case ErrorCode::ConfigError: return 400;
    default: return 500;
  }
}

// Runs a handler, mapping library errors onto status codes.
template <typename F>
auto guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const Error& e) {
      send_error(res, http_status(e.code()), error_name(e.code()), e.what());
    } catch (const json::exception& e) {
      send_error(res, 400, "BadRequest", e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, "InternalError", e.what());
    }
  };
}

std::optional<std::uint64_t> query_u64(const httplib::Request& req, const char* key) {
  if (!req.has_param(key)) return std::nullopt;
  auto v = req.get_param_value(key);
  try {
    std::size_t used = 0;
    if (v.empty() || v[0] == '-') throw std::invalid_argument(key);
    auto n = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(key);
    return n;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ConfigError, std::string("bad query parameter ") + key + "=" + v);
  }
}

Aspect aspect_field(const json& body) {
  auto name = body.at("aspect").get<std::string>();
  auto a = aspect_from_string(name);
  if (!a) throw Error(ErrorCode::ConfigError, "unknown aspect " + name);
  return *a;
}

}  // namespace

ReviewServer::ReviewServer(std::shared_ptr<ReviewService> service, std::optional<std::filesystem::path> static_dir)
    : service_(std::move(service)), server_(std::make_unique<httplib::Server>()) {
  // httplib's default adds SO_REUSEPORT, which would let a second instance share the port
  server_->set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof yes);
  });
  routes();
  if (static_dir) server_->set_mount_point("/", static_dir->string());
}

ReviewServer::~ReviewServer() { stop(); }

void ReviewServer::routes() {
  auto& svc = *service_;
  auto& srv = *server_;

  srv.Get("/api/items", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
    std::optional<ItemStatus> status;
    if (req.has_param("status")) {
      status = item_status_from_string(req.get_param_value("status"));
      if (!status) throw Error(ErrorCode::ConfigError, "unknown status " + req.get_param_value("status"));
    }
    std::optional<Aspect> aspect;
    if (req.has_param("aspect")) {
      aspect = aspect_from_string(req.get_param_value("aspect"));
      if (!aspect) throw Error(ErrorCode::ConfigError, "unknown aspect " + req.get_param_value("aspect"));
    }
    auto page = query_u64(req, "page").value_or(1);
    auto page_size = query_u64(req, "page_size").value_or(50);
    if (page < 1 || page_size < 1) throw Error(ErrorCode::ConfigError, "page and page_size start at 1");

    std::vector<std::string> ids;
    for (const auto& id : svc.item_ids()) {
      if (status && svc.status(id) != *status) continue;
      if (aspect) {
        const auto* p = svc.parsed(id);
        if (p && !predicted_applicable(*aspect, *p)) continue;
      }
      ids.push_back(id);
    }
    json items = json::array();
    auto first = std::min<std::uint64_t>((page - 1) * page_size, ids.size());
    auto last = std::min<std::uint64_t>(first + page_size, ids.size());
    for (auto i = first; i < last; ++i) items.push_back(svc.item_json(ids[i]));
    send_json(res, 200, {{"total", ids.size()}, {"page", page}, {"page_size", page_size}, {"items", items}});
  }));

  srv.Get(R"(/api/items/([^/]+))", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
    std::string id = req.matches[1];
    if (!svc.has_item(id)) throw Error(ErrorCode::NotFound, "no item " + id);
    send_json(res, 200, svc.item_json(id));
  }));

  srv.Get(R"(/api/items/([^/]+)/image)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
    std::string id = req.matches[1];
    const auto* r = svc.record(id);
    if (!r) throw Error(ErrorCode::NotFound, "no image for " + id);
    auto bytes = read_file(r->path);
    auto type = sniff_media_type(bytes);
    res.status = 200;
    res.set_content(std::string(bytes.begin(), bytes.end()), type);
  }));

  srv.Post(R"(/api/items/([^/]+)/scores)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
    std::string id = req.matches[1];
    if (!svc.has_item(id)) throw Error(ErrorCode::NotFound, "no item " + id);
    auto coder = req.get_header_value("X-Coder-Id");
    if (coder.empty()) throw Error(ErrorCode::ConfigError, "X-Coder-Id header is required");
    auto body = json::parse(req.body);
    AspectScore s;
    s.screenshot_id = id;
    s.coder_id = coder;
    s.aspect = aspect_field(body);
    s.score = body.at("score").get<int>();
    s.note = body.value("note", "");
    auto n = svc.store().record_score(s);
    send_json(res, 201,
              {{"screenshot_id", id},
               {"coder_id", coder},
               {"aspect", to_string(s.aspect)},
               {"history_length", n},
               {"status", to_string(svc.status(id))}});
  }));

  srv.Post(R"(/api/items/([^/]+)/consensus)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
    std::string id = req.matches[1];
    if (!svc.has_item(id)) throw Error(ErrorCode::NotFound, "no item " + id);
    auto body = json::parse(req.body);
    auto aspect = aspect_field(body);
    auto n = svc.store().resolve_consensus(id, aspect, body.at("score").get<int>(), body.value("rationale", ""));
    send_json(res, 201,
              {{"screenshot_id", id},
               {"aspect", to_string(aspect)},
               {"history_length", n},
               {"status", to_string(svc.status(id))}});
  }));

  srv.Get("/api/agreement", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
    std::vector<std::string> coders;
    if (req.has_param("coders")) {
      for (auto& c : text::split(req.get_param_value("coders"), ',')) coders.push_back(c);
    } else {
      for (const auto& c : svc.store().coders()) coders.push_back(c);
    }
    if (coders.size() != 2)
      throw Error(ErrorCode::NoOverlap, "agreement needs exactly two coders, have " + std::to_string(coders.size()));
    const auto& st = svc.store();
    auto report = intercoder_agreement(st.current_scores_by(coders[0]), st.current_scores_by(coders[1]),
                                       st.consensus());
    send_json(res, 200, to_json(report));
  }));

  srv.Get("/api/aggregate", guarded([&svc](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, to_json(aggregate(svc.store().consensus())));
  }));

  srv.Get("/api/sample", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
    SampleParams p;
    p.seed = query_u64(req, "seed").value_or(p.seed);
    p.base_n = query_u64(req, "base_n").value_or(p.base_n);
    p.min_per_aspect = query_u64(req, "min_per_aspect").value_or(p.min_per_aspect);
    auto ids = select_assessment_sample(svc.all_parsed(), p);
    send_json(res, 200,
              {{"seed", p.seed},
               {"base_n", p.base_n},
               {"min_per_aspect", p.min_per_aspect},
               {"size", ids.size()},
               {"ids", ids}});
  }));
}

int ReviewServer::start(const std::string& host, int port) {
  int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (bound <= 0) throw Error(ErrorCode::BindFailure, "cannot bind " + host + ":" + std::to_string(port));
  port_ = bound;
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

void ReviewServer::run(const std::string& host, int port) {
  int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (bound <= 0) throw Error(ErrorCode::BindFailure, "cannot bind " + host + ":" + std::to_string(port));
  port_ = bound;
  server_->listen_after_bind();
}

void ReviewServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace shotintel
