#include "shotintel/campaigns.hpp"

#include "gen.hpp"

#include <gtest/gtest.h>

#include <queue>
#include <set>

using namespace shotintel;

namespace {

std::vector<ScreenshotIndicators> screenshots(gen::Rng& r) {
  static const std::vector<Indicator> pool = {
      {IndicatorKind::Domain, "java-gapp.space"},   {IndicatorKind::Domain, "snowcrack.net"},
      {IndicatorKind::Domain, "mid-journey.ai"},    {IndicatorKind::FullUrl, "https://youtu.be/abc"},
      {IndicatorKind::FullUrl, "https://mega.nz/x"}, {IndicatorKind::FileStem, "java_client"},
      {IndicatorKind::FileStem, "setup"},           {IndicatorKind::ThemeTerm, "midjourney"},
      {IndicatorKind::Domain, "a.ru"},              {IndicatorKind::Domain, "b.ru"},
      {IndicatorKind::Domain, "c.ru"},              {IndicatorKind::FileStem, "loader"}};
  static const std::vector<std::string> langs = {"English", "Italian", "Portuguese", ""};
  std::vector<ScreenshotIndicators> out;
  auto n = 2 + gen::below(r, 24);
  for (std::size_t i = 0; i < n; ++i) {
    ScreenshotIndicators s;
    s.id = "x" + std::to_string(i);
    auto k = gen::below(r, 3);
    for (std::size_t j = 0; j < k; ++j) s.indicators.insert(gen::pick(r, pool));
    if (gen::coin(r, 0.7)) s.captured_at = Timestamp{1676000000 + static_cast<std::int64_t>(gen::below(r, 200000)), 0, ""};
    s.language = gen::pick(r, langs);
    out.push_back(std::move(s));
  }
  return out;
}

ClusterParams params(gen::Rng& r) {
  ClusterParams p;
  p.min_cluster_size = 1 + gen::below(r, 4);
  if (gen::coin(r, 0.3)) p.time_gap_max_seconds = 3600 * static_cast<std::int64_t>(1 + gen::below(r, 24));
  return p;
}

nlohmann::json as_json(const std::vector<CampaignCluster>& cs) {
  auto j = nlohmann::json::array();
  for (const auto& c : cs) j.push_back(to_json(c));
  return j;
}

bool share(const ScreenshotIndicators& a, const ScreenshotIndicators& b) {
  for (const auto& i : a.indicators)
    if (b.indicators.contains(i)) return true;
  return false;
}

}  // namespace

TEST(ClusterLaws, InputOrderDoesNotMatter) {
  for (int i = 0; i < gen::kCases; ++i) {
    gen::Rng r(i);
    auto s = screenshots(r);
    auto p = params(r);
    auto a = as_json(cluster_campaigns(s, p));
    std::shuffle(s.begin(), s.end(), r);
    ASSERT_EQ(as_json(cluster_campaigns(s, p)), a) << "case " << i;
  }
}

TEST(ClusterLaws, ClustersAreDisjointAndConnected) {
  for (int i = 0; i < gen::kCases; ++i) {
    gen::Rng r(i);
    auto s = screenshots(r);
    auto p = params(r);
    std::map<std::string, const ScreenshotIndicators*> by;
    for (const auto& x : s) by[x.id] = &x;
    std::set<std::string> seen;
    for (const auto& c : cluster_campaigns(s, p)) {
      ASSERT_GE(c.member_ids.size(), p.min_cluster_size);
      ASSERT_EQ(c.size, c.member_ids.size());
      for (const auto& m : c.member_ids) ASSERT_TRUE(seen.insert(m).second) << "case " << i << ": " << m;
      // BFS over the shared-indicator graph, staying inside the cluster
      std::set<std::string> reached{*c.member_ids.begin()};
      std::queue<std::string> q;
      q.push(*c.member_ids.begin());
      while (!q.empty()) {
        auto cur = q.front();
        q.pop();
        for (const auto& m : c.member_ids)
          if (!reached.contains(m) && share(*by[cur], *by[m])) {
            reached.insert(m);
            q.push(m);
          }
      }
      ASSERT_EQ(reached, c.member_ids) << "case " << i << " " << c.id;
    }
  }
}

TEST(ClusterLaws, RaisingMinSizeNeverCreatesClusters) {
  for (int i = 0; i < gen::kCases; ++i) {
    gen::Rng r(i);
    auto s = screenshots(r);
    auto p = params(r);
    auto low = cluster_campaigns(s, p);
    std::set<std::set<std::string>> before;
    for (const auto& c : low) before.insert(c.member_ids);
    p.min_cluster_size += 1 + gen::below(r, 3);
    for (const auto& c : cluster_campaigns(s, p)) ASSERT_TRUE(before.contains(c.member_ids)) << "case " << i;
  }
}

TEST(ClusterLaws, ThemePercentagesSumToHundred) {
  for (int i = 0; i < gen::kCases; ++i) {
    gen::Rng r(i);
    std::vector<ThemeTag> tags(1 + gen::below(r, 997));
    for (auto& t : tags) t.theme = static_cast<Theme>(gen::below(r, 3));
    auto h = theme_histogram(tags);
    double sum = 0;
    std::uint64_t n = 0;
    for (const auto& [th, p] : h.percent) sum += p;
    for (const auto& [th, c] : h.counts) n += c;
    ASSERT_EQ(n, tags.size());
    ASSERT_NEAR(sum, 100.0, 0.02) << "case " << i;
  }
}
