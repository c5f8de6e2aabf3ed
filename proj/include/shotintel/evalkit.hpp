#pragma once

#include "shotintel/descparse.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

namespace shotintel {

enum class Aspect { GeneralDescription, BrowserTabs, FileIdentification, SuspiciousElements };
inline constexpr std::array<Aspect, 4> kAspects = {Aspect::GeneralDescription, Aspect::BrowserTabs,
                                                   Aspect::FileIdentification,
                                                   Aspect::SuspiciousElements};
inline constexpr std::array<int, 4> kLegalScores = {0, 1, 2, 99};

std::string to_string(Aspect a);
std::optional<Aspect> aspect_from_string(std::string_view s);
bool is_legal_score(int score);

struct AspectScore {
  std::string screenshot_id;
  std::string coder_id;
  Aspect aspect = Aspect::GeneralDescription;
  int score = 0;
  std::string note;
  std::string scored_at;  // RFC 3339
  friend bool operator==(const AspectScore&, const AspectScore&) = default;
};

struct ConsensusRecord {
  std::string screenshot_id;
  Aspect aspect = Aspect::GeneralDescription;
  int score = 0;
  std::string rationale;
  std::string decided_at;
  bool confirmation = false;  // the coders already agreed
  friend bool operator==(const ConsensusRecord&, const ConsensusRecord&) = default;
};

enum class ItemStatus { Unscored, PartiallyScored, Disagreement, Resolved };
std::string to_string(ItemStatus s);
std::optional<ItemStatus> item_status_from_string(std::string_view s);

/// Append-only score log. A later score for the same (screenshot, coder,
/// aspect) supersedes the earlier one; both stay in the history. With a
/// directory the log is mirrored to scores.csv and consensus.csv and reloaded
/// on construction.
class ScoreStore {
 public:
  ScoreStore() = default;
  explicit ScoreStore(std::filesystem::path directory);

  /// Throws Error(IllegalScoreValue). Returns the history length for the key.
  std::size_t record_score(AspectScore score);
  std::size_t resolve_consensus(const std::string& screenshot_id, Aspect aspect, int score,
                                const std::string& rationale, const std::string& decided_at = {});

  std::vector<AspectScore> current_scores() const;
  std::vector<AspectScore> current_scores_by(std::string_view coder_id) const;
  std::vector<AspectScore> history(std::string_view screenshot_id, std::string_view coder_id,
                                   Aspect aspect) const;
  std::vector<AspectScore> log() const;
  std::vector<ConsensusRecord> consensus() const;  // latest per (screenshot, aspect)
  std::vector<ConsensusRecord> consensus_log() const;
  std::set<std::string> coders() const;

  ItemStatus status(std::string_view screenshot_id) const;

 private:
  void append_csv(const std::filesystem::path& file, const std::string& header, const std::string& row);

  mutable std::shared_mutex mu_;
  std::optional<std::filesystem::path> dir_;
  std::vector<AspectScore> log_;
  std::vector<ConsensusRecord> consensus_log_;
};

std::string scores_to_csv(const std::vector<AspectScore>& scores);
std::vector<AspectScore> scores_from_csv(std::string_view text);
std::string consensus_to_csv(const std::vector<ConsensusRecord>& records);
/// Accepts the score header plus a `rationale` column; coder_id and note are ignored.
std::vector<ConsensusRecord> consensus_from_csv(std::string_view text);

/// BrowserTabs needs tabs or URL lines, FileIdentification any file list;
/// the other two aspects always apply.
bool predicted_applicable(Aspect aspect, const ParsedDescription& parsed);

struct SampleParams {
  std::uint64_t seed = 0;
  std::size_t base_n = 100;
  std::size_t min_per_aspect = 50;
};

/// Uniform draw in [0, bound) by rejection on mt19937_64 output, so the
/// sequence does not depend on the standard library's distributions.
std::uint64_t bounded_draw(std::mt19937_64& rng, std::uint64_t bound);

/// Seeded Fisher-Yates over the ids in sorted order; the first base_n are the
/// base sample, then later ids applicable to an under-covered aspect are
/// appended (aspects in declaration order). Throws Error(CorpusTooSmall).
std::vector<std::string> select_assessment_sample(const std::vector<ParsedDescription>& corpus,
                                                  const SampleParams& params);

struct AspectAggregate {
  Aspect aspect = Aspect::GeneralDescription;
  std::map<int, std::uint64_t> counts;
  std::map<int, double> percent;  // over all assessed screenshots, two decimals
  std::uint64_t unscored = 0;
  double unscored_percent = 0.0;
  std::uint64_t applicable = 0;              // rows scored 0, 1 or 2
  std::map<int, double> applicable_percent;  // 0/1/2 over applicable rows
};

struct AggregateTable {
  std::uint64_t n_screenshots = 0;
  std::vector<AspectAggregate> aspects;  // empty when there are no scores
};

/// The denominator is the number of distinct screenshots in `finals`; an
/// aspect without a score for some screenshot reports it as unscored.
AggregateTable aggregate(const std::vector<ConsensusRecord>& finals);

struct AspectAgreement {
  Aspect aspect = Aspect::GeneralDescription;
  std::uint64_t n_double_coded = 0;
  double percent_agreement = 0.0;  // fraction in [0, 1]
  std::optional<double> cohen_kappa;
  bool kappa_undefined = false;  // expected agreement is 1
  std::vector<std::string> unresolved_ids;
};

struct AgreementReport {
  std::vector<AspectAgreement> aspects;
};

/// Nominal Cohen's kappa over {0,1,2,99} per aspect. Throws Error(NoOverlap)
/// when the coders share no (screenshot, aspect) pair.
AgreementReport intercoder_agreement(const std::vector<AspectScore>& a,
                                     const std::vector<AspectScore>& b,
                                     const std::vector<ConsensusRecord>& consensus = {});

struct FailureBreakdown {
  std::uint64_t n_cases = 0;                           // BrowserTabs scored 0 or 1
  std::map<int, std::uint64_t> suspicious;             // SuspiciousElements outcome
  std::map<std::pair<int, int>, std::uint64_t> cross;  // (tabs, suspicious)
  std::uint64_t missing_suspicious = 0;
};

FailureBreakdown failure_breakdown(const std::vector<ConsensusRecord>& finals);

nlohmann::json to_json(const AggregateTable& t);
nlohmann::json to_json(const AgreementReport& r);
nlohmann::json to_json(const FailureBreakdown& f);
nlohmann::json to_json(const AspectScore& s);
nlohmann::json to_json(const ConsensusRecord& c);
std::string aggregate_to_csv(const AggregateTable& t);
std::string aggregate_to_markdown(const AggregateTable& t);

}  // namespace shotintel
