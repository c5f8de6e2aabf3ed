#pragma once

#include "shotintel/corpus.hpp"
#include "shotintel/descparse.hpp"
#include "shotintel/evalkit.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace httplib {
class Server;
}

namespace shotintel {

struct PipelineConfig;

/// Read side of the review service: screenshots, their parses and the store.
/// Items are the parsed screenshots plus any id that only appears in scores.
class ReviewService {
 public:
  ReviewService(std::vector<ScreenshotRecord> records, std::vector<ParsedDescription> parsed,
                std::shared_ptr<ScoreStore> store);

  /// Loads records and parsed/<id>.json for every record; scores live under
  /// <output_dir>/scores. Throws Error(CorpusNotParsed).
  static std::shared_ptr<ReviewService> from_config(const PipelineConfig& config);

  std::vector<std::string> item_ids() const;
  bool has_item(std::string_view id) const;
  nlohmann::json item_json(const std::string& id) const;
  ItemStatus status(const std::string& id) const { return store_->status(id); }
  const ScreenshotRecord* record(const std::string& id) const;
  const ParsedDescription* parsed(const std::string& id) const;
  const std::vector<ParsedDescription>& all_parsed() const { return parsed_; }
  ScoreStore& store() { return *store_; }
  const ScoreStore& store() const { return *store_; }

 private:
  std::map<std::string, ScreenshotRecord, std::less<>> records_;
  std::vector<ParsedDescription> parsed_;
  std::map<std::string, std::size_t, std::less<>> parsed_index_;
  std::shared_ptr<ScoreStore> store_;
};

/// Local HTTP front end for a ReviewService.
class ReviewServer {
 public:
  explicit ReviewServer(std::shared_ptr<ReviewService> service,
                        std::optional<std::filesystem::path> static_dir = std::nullopt);
  ~ReviewServer();
  ReviewServer(const ReviewServer&) = delete;
  ReviewServer& operator=(const ReviewServer&) = delete;

  /// Binds and starts serving on a background thread; port 0 picks a free
  /// port. Throws Error(BindFailure).
  int start(const std::string& host, int port);
  /// Serves on the calling thread until stop() is called from elsewhere.
  void run(const std::string& host, int port);
  void stop();
  int port() const { return port_; }

 private:
  void routes();

  std::shared_ptr<ReviewService> service_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace shotintel
