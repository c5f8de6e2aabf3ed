#include "shotintel/iocs.hpp"
#include "shotintel/url.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

using namespace shotintel;
using namespace testing_support;

namespace {

ParsedDescription shot(std::string id, std::vector<std::string> urls, std::vector<std::string> suspicious = {},
                       std::vector<std::string> installers = {}, std::vector<std::string> explorer = {}) {
  ParsedDescription p;
  p.screenshot_id = std::move(id);
  p.url_entries = std::move(urls);
  for (auto& s : suspicious) {
    SuspiciousElement e;
    e.raw = s;
    p.suspicious.push_back(e);
  }
  p.installers = std::move(installers);
  p.explorer_files = std::move(explorer);
  return p;
}

}  // namespace

TEST(Url, Validation) {
  auto v = validate_url("HTTPS://WWW.YouTube.com/watch?v=HBG5nZQ7ThA");
  ASSERT_TRUE(v);
  EXPECT_EQ(v->scheme, "https");
  EXPECT_EQ(v->host, "www.youtube.com");
  EXPECT_EQ(v->rest, "/watch?v=HBG5nZQ7ThA");
  EXPECT_EQ(v->normalized, "https://www.youtube.com/watch?v=HBG5nZQ7ThA");

  EXPECT_TRUE(validate_url("(https://cutt.ly/NOD-32)."));
  EXPECT_EQ(validate_url("(https://cutt.ly/NOD-32).")->normalized, "https://cutt.ly/NOD-32");
  EXPECT_TRUE(validate_url("www.example-shop.com/x"));
  EXPECT_TRUE(validate_url("mega.nz/file/abc"));
  EXPECT_FALSE(validate_url("Setup.exe"));
  EXPECT_FALSE(validate_url("Download ESET NOD32 ANTIVIRUS CRACK 2023"));
  EXPECT_FALSE(validate_url("License key internet security 100"));
  EXPECT_TRUE(validate_url("ftp://files.example.com/a"));
  EXPECT_FALSE(validate_url("gopher://files.example.com/a"));
  EXPECT_FALSE(validate_url("https://"));
  EXPECT_FALSE(validate_url(""));
}

TEST(Url, Truncation) {
  EXPECT_TRUE(detect_truncation("https://mega.nz/file/abc..."));
  EXPECT_TRUE(detect_truncation("https://mega.nz/file/abc…"));
  EXPECT_TRUE(detect_truncation("https://example.com/a%2"));
  EXPECT_FALSE(detect_truncation("https://mega.nz/file/abc"));
  auto v = validate_url("https://www.youtube.com/watch?v=ab3De…");
  ASSERT_TRUE(v);
  EXPECT_EQ(v->normalized, "https://www.youtube.com/watch?v=ab3De");
}

TEST(Url, TokensInProse) {
  auto t = find_url_tokens("see (https://cutt.ly/NOD-32) and www.example.com/a, not Setup.exe");
  ASSERT_EQ(t.size(), 2u);
  EXPECT_TRUE(validate_url(t[0]));
  EXPECT_EQ(validate_url(t[0])->normalized, "https://cutt.ly/NOD-32");
  EXPECT_EQ(validate_url(t[1])->host, "www.example.com");
}

TEST(Url, PublicSuffixList) {
  auto psl = PublicSuffixList::from_text("// comment\ncom\nspace\nuk\nco.uk\n*.ck\n!www.ck\n");
  EXPECT_EQ(psl.registered_domain("go.java-gapp.space"), "java-gapp.space");
  EXPECT_EQ(psl.registered_domain("a.b.bbc.co.uk"), "bbc.co.uk");
  EXPECT_EQ(psl.registered_domain("x.y.foo.ck"), "y.foo.ck");
  EXPECT_EQ(psl.registered_domain("www.ck"), "www.ck");
  EXPECT_EQ(psl.registered_domain("co.uk"), "co.uk");
  EXPECT_EQ(psl.public_suffix("a.bbc.co.uk"), "co.uk");
  auto& bundled = PublicSuffixList::bundled();
  EXPECT_EQ(bundled.registered_domain("get.mid-journey.org"), "mid-journey.org");
  EXPECT_EQ(bundled.registered_domain("ai.mid-j0urney.org"), "mid-j0urney.org");
}

TEST(Lexicon, HostMatchingAndCategories) {
  auto lex = Lexicons::bundled();
  EXPECT_TRUE(host_in("www.youtube.com", lex.video_hosts));
  EXPECT_FALSE(host_in("notyoutube.com", lex.video_hosts));
  EXPECT_EQ(categorize_host("www.google.com", lex), UrlCategory::Benign);
  EXPECT_EQ(categorize_host("youtu.be", lex), UrlCategory::VideoPlatform);
  EXPECT_EQ(categorize_host("mega.nz", lex), UrlCategory::FileDistribution);
  EXPECT_EQ(categorize_host("go.java-gapp.space", lex), UrlCategory::OtherDomain);
  EXPECT_THROW(Lexicons::from_json({{"benign_hosts", {"youtube.com"}}, {"video_hosts", {"youtube.com"}}}), Error);
  EXPECT_THROW(Lexicons::from_json({{"benign_hosts", "nope"}}), Error);
}

TEST(Urls, ExampleReplyYieldsTwoUrls) {
  auto p = parse_reply("eset", eset_reply());
  auto x = extract_urls({p}, Lexicons::bundled());
  ASSERT_EQ(x.urls.size(), 2u);
  EXPECT_EQ(x.urls[0].normalized, "https://cutt.ly/NOD-32");
  EXPECT_EQ(x.urls[0].category, UrlCategory::FileDistribution);
  EXPECT_TRUE(x.urls[0].suspicious_corroborated);
  EXPECT_EQ(x.urls[1].category, UrlCategory::VideoPlatform);
  EXPECT_EQ(x.stats.rejected_candidates, 2u);
  EXPECT_EQ(x.stats.actionable, 2u);
}

TEST(Urls, DedupAcrossScreenshotsAndCounts) {
  auto lex = Lexicons::bundled();
  std::vector<ParsedDescription> c{
      shot("a", {"https://www.google.com/search?q=x", "https://mega.nz/file/abc", "https://evil-site.xyz/d/1..."}),
      shot("b", {"https://mega.nz/file/abc"}, {"link https://evil-site.xyz/d/1 is bad"}),
      shot("c", {"nothing here"})};
  auto x = extract_urls(c, lex);
  // oracle: hand count
  EXPECT_EQ(x.stats.total_unique, 3u);
  EXPECT_EQ(x.stats.benign, 1u);
  EXPECT_EQ(x.stats.actionable, 2u);
  EXPECT_EQ(x.stats.distribution, 1u);
  EXPECT_EQ(x.stats.other, 1u);
  EXPECT_EQ(x.stats.truncated, 1u);
  EXPECT_EQ(x.stats.rejected_candidates, 1u);
  const auto& mega = *std::find_if(x.urls.begin(), x.urls.end(), [](auto& u) { return u.host == "mega.nz"; });
  EXPECT_EQ(mega.source_ids, (std::set<std::string>{"a", "b"}));
  const auto& evil =
      *std::find_if(x.urls.begin(), x.urls.end(), [](auto& u) { return u.host == "evil-site.xyz"; });
  EXPECT_TRUE(evil.truncated);
  EXPECT_TRUE(evil.suspicious_corroborated);
  EXPECT_EQ(evil.registered_domain, "evil-site.xyz");
}

TEST(Files, ExtensionsAndStems) {
  EXPECT_EQ(extension_class_of("a.EXE"), ExtensionClass::Exe);
  EXPECT_EQ(extension_class_of("x.zip"), ExtensionClass::Zip);
  EXPECT_EQ(extension_class_of("x.rar"), ExtensionClass::Rar);
  EXPECT_EQ(extension_class_of("win-32.dll"), ExtensionClass::Dll);
  EXPECT_EQ(extension_class_of("x.7z"), ExtensionClass::Other);
  EXPECT_EQ(extension_class_of("Minecraft 1.19"), ExtensionClass::None);
  EXPECT_EQ(extension_class_of(".bashrc"), ExtensionClass::None);
  EXPECT_EQ(extension_class_of("ESET NOD32 ANTIVIRUS CRACK 2023"), ExtensionClass::None);
  EXPECT_EQ(file_stem("@fomicvell.exe"), "@fomicvell");
  EXPECT_EQ(file_stem("jre"), "jre");
  std::vector<std::string> pats{"setup_x64*", "install*", "desktop.ini"};
  EXPECT_TRUE(is_generic_name("Setup_x64_v2.msi", pats));
  EXPECT_TRUE(is_generic_name("INSTALLER.exe", pats));
  EXPECT_FALSE(is_generic_name("MidJourney_Beta_Setup.exe", pats));
}

TEST(Files, TwoStageFilter) {
  auto lex = Lexicons::bundled();
  std::vector<ParsedDescription> c{
      shot("a", {}, {"The archive Office_Crack.rar is malicious", "install.exe looks odd"},
           {"install.exe"}, {"Office_Crack.rar", "Documents"}),
      shot("b", {}, {"nothing"}, {}, {"Office_Crack.rar"}),
      shot("c", {}, {"Documents folder"}, {}, {"notes.txt"})};
  auto x = extract_files(c);
  EXPECT_EQ(x.counts.installer, 1u);
  EXPECT_EQ(x.counts.other, 4u);
  auto s = filter_files(x.files, c, lex);
  EXPECT_EQ(s.corroborated_names, 2u);  // Office_Crack.rar, install.exe
  EXPECT_EQ(s.retained_names, 1u);      // install.exe is generic
  EXPECT_EQ(s.retained_occurrences, 2u);
  auto find = [&](const std::string& n) {
    return *std::find_if(x.files.begin(), x.files.end(), [&](auto& f) { return f.name == n; });
  };
  EXPECT_TRUE(find("Office_Crack.rar").retained);
  EXPECT_TRUE(find("install.exe").generic);
  // "Documents" is only mentioned by another screenshot: weak, not retained
  EXPECT_TRUE(find("Documents").weakly_corroborated);
  EXPECT_FALSE(find("Documents").retained);
  auto ext = extension_breakdown(x.files);
  EXPECT_EQ(ext[ExtensionClass::Rar], 1u);
  EXPECT_EQ(ext[ExtensionClass::Exe], 0u);
}

TEST(Files, StemMatchNeedsFourCharacters) {
  auto lex = Lexicons::bundled();
  std::vector<ParsedDescription> c{shot("a", {}, {"the jre folder and the Java_Client archive"}, {},
                                        {"jre.zip", "Java_Client.zip"})};
  auto x = extract_files(c);
  filter_files(x.files, c, lex);
  ASSERT_EQ(x.files[0].name, "Java_Client.zip");
  EXPECT_TRUE(x.files[0].suspicious_corroborated);
  ASSERT_EQ(x.files[1].name, "jre.zip");
  EXPECT_FALSE(x.files[1].suspicious_corroborated);
}

TEST(Export, CsvHeaders) {
  auto p = parse_reply("eset", eset_reply());
  auto x = extract_urls({p}, Lexicons::bundled());
  auto csv = urls_to_csv(x.urls);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "normalized,host,category,truncated,n_sources,corroborated");
  EXPECT_NE(csv.find("https://cutt.ly/NOD-32,cutt.ly,FileDistribution,false,1,true"), std::string::npos);
}
