#include "shotintel/descparse.hpp"
#include "shotintel/text.hpp"
#include "shotintel/url.hpp"

#include "gen.hpp"

#include <gtest/gtest.h>

using namespace shotintel;

namespace {

const std::vector<std::string> kHeadings = {
    "### Main Content:", "### Files/Programs:", "### URLs:", "### URL",
    "### Browser Tabs Analysis:", "## Suspicious Elements", "### Language and Date:", "#### Suspicious Elements:"};

std::string body_line(gen::Rng& r) {
  switch (gen::below(r, 9)) {
    case 0: return "- Installers: " + gen::file_name(r) + ", " + gen::file_name(r);
    case 1: return gen::url(r);
    case 2: return std::to_string(1 + gen::below(r, 9)) + ". " + gen::url(r);
    case 3: return "Tab " + std::to_string(gen::below(r, 5)) + ": Logo: " + gen::word(r) + ", Text: " + gen::word(r);
    case 4: return "X";
    case 5: return "Language: Italian, Date: " + std::to_string(1 + gen::below(r, 28)) + "/0" +
                   std::to_string(1 + gen::below(r, 9)) + "/2023";
    case 6: return gen::junk_line(r);
    case 7: return "";
    default: return "The user is browsing " + gen::word(r) + " # not a heading";
  }
}

// Structured replies with noise mixed in, plus arbitrary byte strings.
std::string reply(gen::Rng& r) {
  if (gen::coin(r, 0.15)) {
    std::string s;
    auto n = gen::below(r, 200);
    for (std::size_t i = 0; i < n; ++i) s.push_back(static_cast<char>(gen::below(r, 256)));
    return s;
  }
  std::string s;
  if (gen::coin(r, 0.2)) s += gen::coin(r) ? "Content: " : "Intro text\n";
  auto sections = gen::below(r, 7);
  for (std::size_t i = 0; i < sections; ++i) {
    s += gen::pick(r, kHeadings) + "\n";
    auto lines = gen::below(r, 5);
    for (std::size_t j = 0; j < lines; ++j) s += body_line(r) + (gen::coin(r, 0.1) ? "\r\n" : "\n");
  }
  return s;
}

std::string non_space(std::string_view s) {
  std::string out;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(ParseLaws, ParsingIsTotal) {
  for (int i = 0; i < gen::kCases; ++i) {
    gen::Rng r(i);
    auto text = reply(r);
    ParsedDescription p;
    ASSERT_NO_THROW(p = parse_reply("id", text)) << "case " << i;
    ASSERT_EQ(p.no_sections_found, p.raw_sections.empty());
    for (const auto& t : p.tabs) ASSERT_TRUE((t.logo && !t.logo->empty()) || (t.text && !t.text->empty()));
    for (const auto& e : p.suspicious)
      for (const auto& u : e.embedded_urls) ASSERT_TRUE(validate_url(u)) << u;
  }
}

TEST(ParseLaws, JsonRoundTrip) {
  for (int i = 0; i < gen::kCases; ++i) {
    gen::Rng r(i);
    auto p = parse_reply("id-" + std::to_string(i), reply(r));
    auto back = parsed_from_json(nlohmann::json::parse(to_json(p).dump()));
    ASSERT_EQ(back, p) << "case " << i;
  }
}

TEST(ParseLaws, SectionsConserveText) {
  for (int i = 0; i < gen::kCases; ++i) {
    gen::Rng r(i);
    auto text = text::valid_utf8(reply(r));
    auto p = parse_reply("id", text);
    if (p.no_sections_found) {
      ASSERT_EQ(non_space(p.main_content), non_space(text));
      continue;
    }
    std::string joined = p.preamble;
    for (const auto& s : p.raw_sections) joined += s.heading + s.body;
    ASSERT_EQ(non_space(joined), non_space(text)) << "case " << i;
  }
}

TEST(ParseLaws, PlaceholderYieldsNothing) {
  for (int i = 0; i < gen::kCases; ++i) {
    gen::Rng r(i);
    auto pad = [&] { return std::string(gen::below(r, 4), gen::coin(r) ? ' ' : '\t'); };
    std::string text;
    auto n = 1 + gen::below(r, kHeadings.size());
    for (std::size_t k = 0; k < n; ++k)
      text += gen::pick(r, kHeadings) + "\n" + pad() + "X" + pad() + "\n";
    auto p = parse_reply("id", text);
    ASSERT_TRUE(p.installers.empty()) << text;
    ASSERT_TRUE(p.explorer_files.empty()) << text;
    ASSERT_TRUE(p.archive_members.empty()) << text;
    ASSERT_TRUE(p.url_entries.empty()) << text;
    ASSERT_TRUE(p.tabs.empty()) << text;
    ASSERT_TRUE(p.unparsed_tab_lines.empty()) << text;
    ASSERT_TRUE(p.suspicious.empty()) << text;
    ASSERT_NE(p.main_content, "X");
    ASSERT_NE(p.language, "X");
  }
}
