#include "shotintel/descparse.hpp"
#include "shotintel/review_api.hpp"

#include "support.hpp"

#include <httplib.h>

#include <gtest/gtest.h>

using namespace shotintel;
using namespace testing_support;
using nlohmann::json;

namespace {

class ReviewApi : public ::testing::Test {
 protected:
  void SetUp() override {
    std::vector<ScreenshotRecord> records;
    std::vector<ParsedDescription> parsed;
    for (int i = 0; i < 6; ++i) {
      auto id = "r" + std::to_string(i);
      ScreenshotRecord rec;
      rec.id = id;
      rec.path = copy_png(dir.path(), id + ".png", i).string();
      rec.sha256 = sha256_hex(read_file(rec.path));
      records.push_back(rec);
      ParsedDescription p;
      p.screenshot_id = id;
      if (i % 2 == 0) p.url_entries.push_back("https://example.com/" + id);
      if (i < 4) p.installers.push_back(id + ".exe");
      parsed.push_back(p);
    }
    parsed.push_back(parse_reply("eset", eset_reply()));
    store = std::make_shared<ScoreStore>(dir / "scores");
    service = std::make_shared<ReviewService>(records, parsed, store);
    server = std::make_unique<ReviewServer>(service);
    int port = server->start("127.0.0.1", 0);
    client = std::make_unique<httplib::Client>("127.0.0.1", port);
  }

  void TearDown() override { server->stop(); }

  httplib::Result post_score(const std::string& id, const std::string& coder, const json& body) {
    httplib::Headers h;
    if (!coder.empty()) h.emplace("X-Coder-Id", coder);
    return client->Post(("/api/items/" + id + "/scores").c_str(), h, body.dump(), "application/json");
  }

  httplib::Result post_consensus(const std::string& id, const json& body) {
    return client->Post(("/api/items/" + id + "/consensus").c_str(), body.dump(), "application/json");
  }

  json get_json(const std::string& path, int expect = 200) {
    auto res = client->Get(path.c_str());
    EXPECT_TRUE(res);
    if (!res) return nullptr;
    EXPECT_EQ(res->status, expect) << path << " " << res->body;
    return json::parse(res->body);
  }

  TempDir dir;
  std::shared_ptr<ScoreStore> store;
  std::shared_ptr<ReviewService> service;
  std::unique_ptr<ReviewServer> server;
  std::unique_ptr<httplib::Client> client;
};

}  // namespace

TEST_F(ReviewApi, ListsAndPages) {
  auto all = get_json("/api/items");
  EXPECT_EQ(all["total"], 7);
  EXPECT_EQ(all["items"].size(), 7u);
  auto page = get_json("/api/items?page=2&page_size=3");
  EXPECT_EQ(page["total"], 7);
  ASSERT_EQ(page["items"].size(), 3u);
  EXPECT_EQ(page["items"][0]["screenshot_id"], "r2");
  EXPECT_EQ(get_json("/api/items?page=9&page_size=3")["items"].size(), 0u);
  // r0, r2, r4 and eset show web content
  EXPECT_EQ(get_json("/api/items?aspect=BrowserTabs")["total"], 4);
  EXPECT_EQ(get_json("/api/items?status=Unscored")["total"], 7);

  EXPECT_EQ(get_json("/api/items?page=0", 400)["error"], "ConfigError");
  get_json("/api/items?page_size=x", 400);
  get_json("/api/items?status=Weird", 400);
  get_json("/api/items?aspect=Nope", 400);
}

TEST_F(ReviewApi, ItemDetailAndImage) {
  auto item = get_json("/api/items/eset");
  EXPECT_EQ(item["status"], "Unscored");
  EXPECT_TRUE(item["image"].is_null());
  EXPECT_FALSE(item["parsed"].is_null());
  EXPECT_EQ(item["predicted_applicable"]["FileIdentification"], true);

  auto r1 = get_json("/api/items/r1");
  EXPECT_EQ(r1["image"], "/api/items/r1/image");
  EXPECT_EQ(r1["predicted_applicable"]["BrowserTabs"], false);
  auto img = client->Get("/api/items/r1/image");
  ASSERT_TRUE(img);
  EXPECT_EQ(img->status, 200);
  EXPECT_EQ(img->get_header_value("Content-Type"), "image/png");
  EXPECT_EQ(img->body.substr(1, 3), "PNG");

  EXPECT_EQ(get_json("/api/items/ghost", 404)["error"], "NotFound");
  get_json("/api/items/eset/image", 404);
}

TEST_F(ReviewApi, ScoringFlow) {
  auto res = post_score("r0", "alice", {{"aspect", "GeneralDescription"}, {"score", 2}});
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 201);
  auto body = json::parse(res->body);
  EXPECT_EQ(body["history_length"], 1);
  EXPECT_EQ(body["status"], "PartiallyScored");

  res = post_score("r0", "alice", {{"aspect", "GeneralDescription"}, {"score", 1}, {"note", "second look"}});
  EXPECT_EQ(json::parse(res->body)["history_length"], 2);
  res = post_score("r0", "bob", {{"aspect", "GeneralDescription"}, {"score", 2}});
  EXPECT_EQ(json::parse(res->body)["status"], "Disagreement");
  EXPECT_EQ(get_json("/api/items?status=Disagreement")["total"], 1);

  res = post_consensus("r0", {{"aspect", "GeneralDescription"}, {"score", 2}, {"rationale", "logo visible"}});
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 201);
  // the other three aspects are still open
  EXPECT_EQ(json::parse(res->body)["status"], "PartiallyScored");
  EXPECT_EQ(get_json("/api/items?status=Disagreement")["total"], 0);

  auto item = get_json("/api/items/r0");
  EXPECT_EQ(item["scores"]["alice"].size(), 1u);
  EXPECT_EQ(item["scores"]["alice"][0]["score"], 1);
  EXPECT_EQ(item["consensus"].size(), 1u);

  // persisted through the store directory
  ScoreStore reloaded(dir / "scores");
  EXPECT_EQ(reloaded.log().size(), 3u);
  EXPECT_EQ(reloaded.consensus().size(), 1u);
}

TEST_F(ReviewApi, ScoringErrors) {
  auto res = post_score("r0", "alice", {{"aspect", "GeneralDescription"}, {"score", 3}});
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 422);
  EXPECT_EQ(json::parse(res->body)["error"], "IllegalScoreValue");
  EXPECT_EQ(post_score("r0", "", {{"aspect", "GeneralDescription"}, {"score", 1}})->status, 400);
  EXPECT_EQ(post_score("r0", "alice", {{"aspect", "Colour"}, {"score", 1}})->status, 400);
  EXPECT_EQ(post_score("r0", "alice", {{"aspect", "BrowserTabs"}})->status, 400);
  EXPECT_EQ(post_score("ghost", "alice", {{"aspect", "BrowserTabs"}, {"score", 1}})->status, 404);
  auto bad = client->Post("/api/items/r0/scores", httplib::Headers{{"X-Coder-Id", "a"}}, "{", "application/json");
  EXPECT_EQ(bad->status, 400);
  EXPECT_EQ(post_consensus("r0", {{"aspect", "BrowserTabs"}, {"score", 7}})->status, 422);
  EXPECT_EQ(post_consensus("ghost", {{"aspect", "BrowserTabs"}, {"score", 1}})->status, 404);
  EXPECT_TRUE(store->log().empty());
}

TEST_F(ReviewApi, AgreementAndAggregate) {
  EXPECT_EQ(get_json("/api/agreement", 409)["error"], "NoOverlap");
  for (const char* id : {"r0", "r1", "r2", "r3"}) {
    post_score(id, "a", {{"aspect", "GeneralDescription"}, {"score", 2}});
    post_score(id, "b", {{"aspect", "GeneralDescription"}, {"score", std::string(id) == "r3" ? 1 : 2}});
  }
  auto ag = get_json("/api/agreement");
  ASSERT_EQ(ag["aspects"].size(), 1u);
  EXPECT_DOUBLE_EQ(ag["aspects"][0]["percent_agreement"].get<double>(), 0.75);
  EXPECT_EQ(get_json("/api/agreement?coders=a,b"), ag);
  get_json("/api/agreement?coders=a", 409);
  post_score("r5", "c", {{"aspect", "BrowserTabs"}, {"score", 0}});
  get_json("/api/agreement?coders=a,c", 409);

  EXPECT_TRUE(get_json("/api/aggregate")["aspects"].empty());
  post_consensus("r0", {{"aspect", "GeneralDescription"}, {"score", 2}});
  post_consensus("r3", {{"aspect", "GeneralDescription"}, {"score", 1}});
  auto agg = get_json("/api/aggregate");
  EXPECT_EQ(agg["n_screenshots"], 2);
}

TEST_F(ReviewApi, Sample) {
  auto s = get_json("/api/sample?seed=3&base_n=3&min_per_aspect=2");
  EXPECT_EQ(s["seed"], 3);
  EXPECT_GE(s["size"].get<int>(), 3);
  EXPECT_EQ(get_json("/api/sample?seed=3&base_n=3&min_per_aspect=2"), s);
  EXPECT_EQ(get_json("/api/sample?base_n=50", 409)["error"], "CorpusTooSmall");
  get_json("/api/sample?seed=-1", 400);
}

TEST(ReviewServerBind, PortInUse) {
  auto svc = std::make_shared<ReviewService>(std::vector<ScreenshotRecord>{}, std::vector<ParsedDescription>{},
                                             nullptr);
  ReviewServer a(svc);
  int port = a.start("127.0.0.1", 0);
  ReviewServer b(svc);
  try {
    b.start("127.0.0.1", port);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BindFailure);
  }
}
