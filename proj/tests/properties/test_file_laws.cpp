#include "shotintel/iocs.hpp"

#include "gen.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace shotintel;

namespace {

const Lexicons& lex() {
  static const Lexicons l = Lexicons::bundled();
  return l;
}

std::vector<FileIoc> filtered(const std::vector<ParsedDescription>& c, FilterSummary* summary = nullptr) {
  auto x = extract_files(c);
  auto s = filter_files(x.files, c, lex());
  if (summary) *summary = s;
  return x.files;
}

}  // namespace

TEST(FileLaws, FilterIgnoresCorpusOrder) {
  for (int i = 0; i < gen::kCases; ++i) {
    gen::Rng r(i);
    auto c = gen::corpus(r);
    FilterSummary s1, s2;
    auto a = filtered(c, &s1);
    std::shuffle(c.begin(), c.end(), r);
    auto b = filtered(c, &s2);
    ASSERT_EQ(a, b) << "case " << i;
    ASSERT_EQ(s1, s2) << "case " << i;
  }
}

TEST(FileLaws, RetainedWithinCorroboratedWithinAll) {
  for (int i = 0; i < gen::kCases; ++i) {
    gen::Rng r(i);
    auto c = gen::corpus(r);
    FilterSummary s;
    auto files = filtered(c, &s);
    std::set<std::string> all, corroborated, retained;
    for (const auto& f : files) {
      all.insert(f.name);
      if (f.suspicious_corroborated) corroborated.insert(f.name);
      if (f.retained) retained.insert(f.name);
      ASSERT_FALSE(f.suspicious_corroborated && f.weakly_corroborated);
    }
    ASSERT_TRUE(std::includes(corroborated.begin(), corroborated.end(), retained.begin(), retained.end()));
    ASSERT_TRUE(std::includes(all.begin(), all.end(), corroborated.begin(), corroborated.end()));
    ASSERT_EQ(s.corroborated_names, corroborated.size());
    ASSERT_EQ(s.retained_names, retained.size());
    ASSERT_EQ(all.size(), files.size());
  }
}

TEST(FileLaws, OccurrencesMatchInput) {
  for (int i = 0; i < gen::kCases; ++i) {
    gen::Rng r(i);
    auto c = gen::corpus(r);
    auto x = extract_files(c);
    std::uint64_t occ = 0;
    for (const auto& f : x.files) occ += f.occurrences;
    ASSERT_EQ(occ, x.counts.total()) << "case " << i;
    std::uint64_t installers = 0;
    for (const auto& p : c) installers += p.installers.size();
    ASSERT_EQ(x.counts.installer, installers) << "case " << i;
  }
}
