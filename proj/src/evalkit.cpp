#include "shotintel/evalkit.hpp"

#include "shotintel/codec.hpp"
#include "shotintel/csv.hpp"
#include "shotintel/describe.hpp"
#include "shotintel/error.hpp"
#include "shotintel/numeric.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <mutex>
#include <numeric>

namespace shotintel {

using nlohmann::json;

std::string to_string(Aspect a) {
  switch (a) {
    case Aspect::GeneralDescription: return "GeneralDescription";
    case Aspect::BrowserTabs: return "BrowserTabs";
    case Aspect::FileIdentification: return "FileIdentification";
    case Aspect::SuspiciousElements: return "SuspiciousElements";
  }
  return "GeneralDescription";
}

std::optional<Aspect> aspect_from_string(std::string_view s) {
  for (auto a : kAspects)
    if (to_string(a) == s) return a;
  return std::nullopt;
}

bool is_legal_score(int score) {
  return std::find(kLegalScores.begin(), kLegalScores.end(), score) != kLegalScores.end();
}

std::string to_string(ItemStatus s) {
  switch (s) {
    case ItemStatus::Unscored: return "Unscored";
    case ItemStatus::PartiallyScored: return "PartiallyScored";
    case ItemStatus::Disagreement: return "Disagreement";
    case ItemStatus::Resolved: return "Resolved";
  }
  return "Unscored";
}

std::optional<ItemStatus> item_status_from_string(std::string_view s) {
  for (auto st : {ItemStatus::Unscored, ItemStatus::PartiallyScored, ItemStatus::Disagreement,
                  ItemStatus::Resolved})
    if (to_string(st) == s) return st;
  return std::nullopt;
}

namespace {

const std::string kScoreHeader = "screenshot_id,coder_id,aspect,score,note,scored_at";
const std::string kConsensusHeader = kScoreHeader + ",rationale";
constexpr std::string_view kConsensusCoder = "consensus";
constexpr std::string_view kConfirmationNote = "confirmation";

void check_score(int score) {
  if (!is_legal_score(score))
    throw Error(ErrorCode::IllegalScoreValue,
                "score " + std::to_string(score) + " is not one of 0, 1, 2, 99");
}

int parse_score(const std::string& s, std::size_t line) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw Error(ErrorCode::IllegalScoreValue, "line " + std::to_string(line) + ": score '" + s + "'");
  check_score(v);
  return v;
}

Aspect parse_aspect(const std::string& s, std::size_t line) {
  auto a = aspect_from_string(s);
  if (!a) throw Error(ErrorCode::ConfigError, "line " + std::to_string(line) + ": unknown aspect '" + s + "'");
  return *a;
}

std::vector<csv::Row> rows_after_header(std::string_view text, const std::string& expected) {
  auto rows = csv::parse(text);
  if (rows.empty()) return rows;
  auto header = csv::format_row(rows.front());
  header.pop_back();
  if (header.rfind(expected, 0) != 0)
    throw Error(ErrorCode::ConfigError, "unexpected CSV header '" + header + "'");
  rows.erase(rows.begin());
  return rows;
}

std::string score_row(const AspectScore& s) {
  return csv::format_row({s.screenshot_id, s.coder_id, to_string(s.aspect), std::to_string(s.score),
                          s.note, s.scored_at});
}

std::string consensus_row(const ConsensusRecord& c) {
  return csv::format_row({c.screenshot_id, std::string(kConsensusCoder), to_string(c.aspect),
                          std::to_string(c.score),
                          c.confirmation ? std::string(kConfirmationNote) : std::string(),
                          c.decided_at, c.rationale});
}

}  // namespace

std::string scores_to_csv(const std::vector<AspectScore>& scores) {
  std::string out = kScoreHeader + "\n";
  for (const auto& s : scores) out += score_row(s);
  return out;
}

std::vector<AspectScore> scores_from_csv(std::string_view text) {
  std::vector<AspectScore> out;
  std::size_t line = 1;
  for (const auto& row : rows_after_header(text, kScoreHeader)) {
    ++line;
    if (row.size() < 6)
      throw Error(ErrorCode::ConfigError, "line " + std::to_string(line) + ": expected 6 columns");
    out.push_back({row[0], row[1], parse_aspect(row[2], line), parse_score(row[3], line), row[4], row[5]});
  }
  return out;
}

std::string consensus_to_csv(const std::vector<ConsensusRecord>& records) {
  std::string out = kConsensusHeader + "\n";
  for (const auto& c : records) out += consensus_row(c);
  return out;
}

std::vector<ConsensusRecord> consensus_from_csv(std::string_view text) {
  std::vector<ConsensusRecord> out;
  std::size_t line = 1;
  for (const auto& row : rows_after_header(text, kConsensusHeader)) {
    ++line;
    if (row.size() < 7)
      throw Error(ErrorCode::ConfigError, "line " + std::to_string(line) + ": expected 7 columns");
    out.push_back({row[0], parse_aspect(row[2], line), parse_score(row[3], line), row[6], row[5],
                   row[4] == kConfirmationNote});
  }
  return out;
}

ScoreStore::ScoreStore(std::filesystem::path directory) : dir_(std::move(directory)) {
  std::filesystem::create_directories(*dir_);
  if (auto p = *dir_ / "scores.csv"; std::filesystem::exists(p)) log_ = scores_from_csv(read_text_file(p));
  if (auto p = *dir_ / "consensus.csv"; std::filesystem::exists(p))
    consensus_log_ = consensus_from_csv(read_text_file(p));
}

void ScoreStore::append_csv(const std::filesystem::path& file, const std::string& header,
                            const std::string& row) {
  bool fresh = !std::filesystem::exists(file);
  std::ofstream out(file, std::ios::binary | std::ios::app);
  if (fresh) out << header << '\n';
  out << row;
  out.flush();
  if (!out) throw Error(ErrorCode::IoFailure, "cannot append to " + file.string());
}

std::size_t ScoreStore::record_score(AspectScore score) {
  check_score(score.score);
  if (score.scored_at.empty()) score.scored_at = utc_now_rfc3339();
  std::unique_lock lock(mu_);
  if (dir_) append_csv(*dir_ / "scores.csv", kScoreHeader, score_row(score));
  log_.push_back(score);
  return std::count_if(log_.begin(), log_.end(), [&](const AspectScore& s) {
    return s.screenshot_id == score.screenshot_id && s.coder_id == score.coder_id &&
           s.aspect == score.aspect;
  });
}

std::size_t ScoreStore::resolve_consensus(const std::string& screenshot_id, Aspect aspect, int score,
                                          const std::string& rationale, const std::string& decided_at) {
  check_score(score);
  ConsensusRecord rec{screenshot_id, aspect, score, rationale,
                      decided_at.empty() ? utc_now_rfc3339() : decided_at, false};
  std::unique_lock lock(mu_);
  std::map<std::string, int> latest;
  for (const auto& s : log_)
    if (s.screenshot_id == screenshot_id && s.aspect == aspect) latest[s.coder_id] = s.score;
  rec.confirmation = latest.size() >= 2 &&
                     std::all_of(latest.begin(), latest.end(),
                                 [&](const auto& kv) { return kv.second == latest.begin()->second; });
  if (dir_) append_csv(*dir_ / "consensus.csv", kConsensusHeader, consensus_row(rec));
  consensus_log_.push_back(rec);
  return std::count_if(consensus_log_.begin(), consensus_log_.end(), [&](const ConsensusRecord& c) {
    return c.screenshot_id == screenshot_id && c.aspect == aspect;
  });
}

namespace {

template <class T, class Key>
std::vector<T> latest_by(const std::vector<T>& log, Key key) {
  std::map<decltype(key(log.front())), std::size_t> last;
  for (std::size_t i = 0; i < log.size(); ++i) last[key(log[i])] = i;
  std::vector<std::size_t> idx;
  for (const auto& [k, i] : last) idx.push_back(i);
  std::sort(idx.begin(), idx.end());
  std::vector<T> out;
  for (auto i : idx) out.push_back(log[i]);
  return out;
}

auto score_key(const AspectScore& s) { return std::tuple(s.screenshot_id, s.coder_id, s.aspect); }
auto consensus_key(const ConsensusRecord& c) { return std::pair(c.screenshot_id, c.aspect); }

}  // namespace

std::vector<AspectScore> ScoreStore::current_scores() const {
  std::shared_lock lock(mu_);
  if (log_.empty()) return {};
  return latest_by(log_, score_key);
}

std::vector<AspectScore> ScoreStore::current_scores_by(std::string_view coder_id) const {
  auto all = current_scores();
  std::erase_if(all, [&](const AspectScore& s) { return s.coder_id != coder_id; });
  return all;
}

std::vector<AspectScore> ScoreStore::history(std::string_view screenshot_id, std::string_view coder_id,
                                             Aspect aspect) const {
  std::shared_lock lock(mu_);
  std::vector<AspectScore> out;
  for (const auto& s : log_)
    if (s.screenshot_id == screenshot_id && s.coder_id == coder_id && s.aspect == aspect) out.push_back(s);
  return out;
}

std::vector<AspectScore> ScoreStore::log() const {
  std::shared_lock lock(mu_);
  return log_;
}

std::vector<ConsensusRecord> ScoreStore::consensus() const {
  std::shared_lock lock(mu_);
  if (consensus_log_.empty()) return {};
  return latest_by(consensus_log_, consensus_key);
}

std::vector<ConsensusRecord> ScoreStore::consensus_log() const {
  std::shared_lock lock(mu_);
  return consensus_log_;
}

std::set<std::string> ScoreStore::coders() const {
  std::shared_lock lock(mu_);
  std::set<std::string> out;
  for (const auto& s : log_) out.insert(s.coder_id);
  return out;
}

ItemStatus ScoreStore::status(std::string_view screenshot_id) const {
  std::map<Aspect, std::map<std::string, int>> by_aspect;
  for (const auto& s : current_scores())
    if (s.screenshot_id == screenshot_id) by_aspect[s.aspect][s.coder_id] = s.score;
  std::set<Aspect> decided;
  for (const auto& c : consensus())
    if (c.screenshot_id == screenshot_id) decided.insert(c.aspect);
  if (by_aspect.empty() && decided.empty()) return ItemStatus::Unscored;
  bool all_settled = true;
  for (auto a : kAspects) {
    if (decided.contains(a)) continue;
    auto it = by_aspect.find(a);
    if (it == by_aspect.end() || it->second.size() < 2) {
      all_settled = false;
      continue;
    }
    int first = it->second.begin()->second;
    for (const auto& [coder, score] : it->second)
      if (score != first) return ItemStatus::Disagreement;
  }
  return all_settled ? ItemStatus::Resolved : ItemStatus::PartiallyScored;
}

bool predicted_applicable(Aspect aspect, const ParsedDescription& p) {
  switch (aspect) {
    case Aspect::BrowserTabs: return !p.tabs.empty() || !p.url_entries.empty();
    case Aspect::FileIdentification: return p.has_files();
    case Aspect::GeneralDescription:
    case Aspect::SuspiciousElements: return true;
  }
  return true;
}

std::uint64_t bounded_draw(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound <= 1) return 0;
  // reject the top partial block so every residue is equally likely
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do x = rng();
  while (x >= limit);
  return x % bound;
}

std::vector<std::string> select_assessment_sample(const std::vector<ParsedDescription>& corpus,
                                                  const SampleParams& params) {
  std::vector<const ParsedDescription*> pool;
  for (const auto& p : corpus) pool.push_back(&p);
  std::sort(pool.begin(), pool.end(),
            [](auto* a, auto* b) { return a->screenshot_id < b->screenshot_id; });
  pool.erase(std::unique(pool.begin(), pool.end(),
                         [](auto* a, auto* b) { return a->screenshot_id == b->screenshot_id; }),
             pool.end());
  if (params.base_n > pool.size())
    throw Error(ErrorCode::CorpusTooSmall, "base sample of " + std::to_string(params.base_n) +
                                               " exceeds corpus of " + std::to_string(pool.size()));
  std::mt19937_64 rng(params.seed);
  for (std::size_t i = pool.size(); i > 1; --i) std::swap(pool[i - 1], pool[bounded_draw(rng, i)]);

  std::vector<bool> taken(pool.size(), false);
  std::vector<std::string> sample;
  for (std::size_t i = 0; i < params.base_n; ++i) {
    taken[i] = true;
    sample.push_back(pool[i]->screenshot_id);
  }
  for (auto aspect : kAspects) {
    std::size_t have = 0;
    for (std::size_t i = 0; i < pool.size(); ++i)
      if (taken[i] && predicted_applicable(aspect, *pool[i])) ++have;
    for (std::size_t i = params.base_n; i < pool.size() && have < params.min_per_aspect; ++i) {
      if (taken[i] || !predicted_applicable(aspect, *pool[i])) continue;
      taken[i] = true;
      sample.push_back(pool[i]->screenshot_id);
      ++have;
    }
    if (have < params.min_per_aspect)
      throw Error(ErrorCode::CorpusTooSmall, to_string(aspect) + ": only " + std::to_string(have) +
                                                 " applicable screenshots, need " +
                                                 std::to_string(params.min_per_aspect));
  }
  return sample;
}

AggregateTable aggregate(const std::vector<ConsensusRecord>& finals_in) {
  AggregateTable t;
  if (finals_in.empty()) return t;
  auto finals = latest_by(finals_in, consensus_key);
  std::set<std::string> ids;
  for (const auto& f : finals) ids.insert(f.screenshot_id);
  t.n_screenshots = ids.size();
  for (auto a : kAspects) {
    AspectAggregate agg;
    agg.aspect = a;
    for (int s : kLegalScores) agg.counts[s] = 0;
    std::uint64_t scored = 0;
    for (const auto& f : finals)
      if (f.aspect == a) {
        ++agg.counts[f.score];
        ++scored;
      }
    for (int s : kLegalScores) agg.percent[s] = percent(agg.counts[s], t.n_screenshots, 2);
    agg.unscored = t.n_screenshots - scored;
    agg.unscored_percent = percent(agg.unscored, t.n_screenshots, 2);
    agg.applicable = agg.counts[0] + agg.counts[1] + agg.counts[2];
    for (int s : {0, 1, 2}) agg.applicable_percent[s] = percent(agg.counts[s], agg.applicable, 2);
    t.aspects.push_back(std::move(agg));
  }
  return t;
}

AgreementReport intercoder_agreement(const std::vector<AspectScore>& a_in,
                                     const std::vector<AspectScore>& b_in,
                                     const std::vector<ConsensusRecord>& consensus) {
  auto index = [](const std::vector<AspectScore>& v) {
    std::map<std::pair<std::string, Aspect>, int> m;
    for (const auto& s : v) m[{s.screenshot_id, s.aspect}] = s.score;
    return m;
  };
  auto a = index(a_in), b = index(b_in);
  std::set<std::pair<std::string, Aspect>> resolved;
  for (const auto& c : consensus) resolved.insert({c.screenshot_id, c.aspect});

  AgreementReport report;
  bool any = false;
  for (auto aspect : kAspects) {
    AspectAgreement ag;
    ag.aspect = aspect;
    std::map<int, std::uint64_t> ma, mb;
    std::uint64_t agree = 0;
    for (const auto& [key, sa] : a) {
      if (key.second != aspect) continue;
      auto it = b.find(key);
      if (it == b.end()) continue;
      ++ag.n_double_coded;
      ++ma[sa];
      ++mb[it->second];
      if (sa == it->second)
        ++agree;
      else if (!resolved.contains(key))
        ag.unresolved_ids.push_back(key.first);
    }
    if (ag.n_double_coded == 0) continue;
    any = true;
    double n = static_cast<double>(ag.n_double_coded);
    ag.percent_agreement = static_cast<double>(agree) / n;
    double pe = 0.0;
    for (int s : kLegalScores) pe += (static_cast<double>(ma[s]) / n) * (static_cast<double>(mb[s]) / n);
    if (pe >= 1.0 - 1e-12) {
      ag.kappa_undefined = true;
    } else {
      ag.cohen_kappa = (ag.percent_agreement - pe) / (1.0 - pe);
    }
    report.aspects.push_back(std::move(ag));
  }
  if (!any) throw Error(ErrorCode::NoOverlap, "the coders share no scored (screenshot, aspect) pair");
  return report;
}

FailureBreakdown failure_breakdown(const std::vector<ConsensusRecord>& finals_in) {
  FailureBreakdown fb;
  if (finals_in.empty()) return fb;
  auto finals = latest_by(finals_in, consensus_key);
  std::map<std::string, int> tabs, susp;
  for (const auto& f : finals) {
    if (f.aspect == Aspect::BrowserTabs) tabs[f.screenshot_id] = f.score;
    if (f.aspect == Aspect::SuspiciousElements) susp[f.screenshot_id] = f.score;
  }
  for (const auto& [id, t] : tabs) {
    if (t != 0 && t != 1) continue;
    ++fb.n_cases;
    auto it = susp.find(id);
    if (it == susp.end()) {
      ++fb.missing_suspicious;
      continue;
    }
    ++fb.suspicious[it->second];
    ++fb.cross[{t, it->second}];
  }
  return fb;
}

json to_json(const AggregateTable& t) {
  json aspects = json::array();
  for (const auto& a : t.aspects) {
    json counts = json::object(), pct = json::object(), app = json::object();
    for (const auto& [s, n] : a.counts) counts[std::to_string(s)] = n;
    for (const auto& [s, p] : a.percent) pct[std::to_string(s)] = p;
    for (const auto& [s, p] : a.applicable_percent) app[std::to_string(s)] = p;
    aspects.push_back({{"aspect", to_string(a.aspect)},
                       {"counts", counts},
                       {"percent", pct},
                       {"unscored", a.unscored},
                       {"unscored_percent", a.unscored_percent},
                       {"applicable", a.applicable},
                       {"applicable_percent", app}});
  }
  return {{"n_screenshots", t.n_screenshots}, {"aspects", aspects}};
}

json to_json(const AgreementReport& r) {
  json aspects = json::array();
  for (const auto& a : r.aspects)
    aspects.push_back({{"aspect", to_string(a.aspect)},
                       {"n_double_coded", a.n_double_coded},
                       {"percent_agreement", a.percent_agreement},
                       {"cohen_kappa", a.cohen_kappa ? json(*a.cohen_kappa) : json(nullptr)},
                       {"kappa_undefined", a.kappa_undefined},
                       {"unresolved_ids", a.unresolved_ids}});
  return {{"aspects", aspects}};
}

json to_json(const FailureBreakdown& f) {
  json susp = json::object(), cross = json::array();
  for (const auto& [s, n] : f.suspicious) susp[std::to_string(s)] = n;
  for (const auto& [k, n] : f.cross)
    cross.push_back({{"browser_tabs", k.first}, {"suspicious_elements", k.second}, {"count", n}});
  return {{"n_cases", f.n_cases},
          {"suspicious", susp},
          {"cross", cross},
          {"missing_suspicious", f.missing_suspicious}};
}

json to_json(const AspectScore& s) {
  return {{"screenshot_id", s.screenshot_id}, {"coder_id", s.coder_id}, {"aspect", to_string(s.aspect)},
          {"score", s.score},                 {"note", s.note},         {"scored_at", s.scored_at}};
}

json to_json(const ConsensusRecord& c) {
  return {{"screenshot_id", c.screenshot_id}, {"aspect", to_string(c.aspect)},
          {"score", c.score},                 {"rationale", c.rationale},
          {"decided_at", c.decided_at},       {"confirmation", c.confirmation}};
}

std::string aggregate_to_csv(const AggregateTable& t) {
  std::string out = "aspect,score,count,percent\n";
  for (const auto& a : t.aspects) {
    for (int s : kLegalScores)
      out += csv::format_row({to_string(a.aspect), std::to_string(s), std::to_string(a.counts.at(s)),
                              format_fixed(a.percent.at(s), 2)});
    if (a.unscored)
      out += csv::format_row({to_string(a.aspect), "unscored", std::to_string(a.unscored),
                              format_fixed(a.unscored_percent, 2)});
  }
  return out;
}

std::string aggregate_to_markdown(const AggregateTable& t) {
  std::string md = "| Aspect | Score | Count | Percent |\n|---|---|---|---|\n";
  for (const auto& a : t.aspects) {
    for (int s : kLegalScores) {
      if (a.counts.at(s) == 0) continue;
      md += "| " + to_string(a.aspect) + " | " + std::to_string(s) + " | " +
            std::to_string(a.counts.at(s)) + " | " + format_fixed(a.percent.at(s), 2) + " |\n";
    }
    if (a.unscored)
      md += "| " + to_string(a.aspect) + " | unscored | " + std::to_string(a.unscored) + " | " +
            format_fixed(a.unscored_percent, 2) + " |\n";
  }
  md += "\nAssessed screenshots: " + std::to_string(t.n_screenshots) + "\n";
  return md;
}

}  // namespace shotintel
