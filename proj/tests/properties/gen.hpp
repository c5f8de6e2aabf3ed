#pragma once

// Random inputs for the property suites. Every generator takes the case's
// rng so a failing case is reproducible from its index.

#include "shotintel/descparse.hpp"

#include <algorithm>
#include <random>
#include <string>
#include <vector>

namespace gen {

inline constexpr int kCases = 1000;

using Rng = std::mt19937_64;

inline std::size_t below(Rng& r, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(r); }
inline bool coin(Rng& r, double p = 0.5) { return std::bernoulli_distribution(p)(r); }

template <typename T>
const T& pick(Rng& r, const std::vector<T>& v) {
  return v[below(r, v.size())];
}

inline std::string word(Rng& r, std::size_t min_len = 1, std::size_t max_len = 8) {
  static const std::string alpha = "abcdefghijklmnopqrstuvwxyz0123456789";
  std::string s;
  auto n = min_len + below(r, max_len - min_len + 1);
  for (std::size_t i = 0; i < n; ++i) s += alpha[below(r, alpha.size())];
  return s;
}

// Hosts drawn partly from the bundled lexicon so every category shows up.
inline std::string host(Rng& r) {
  static const std::vector<std::string> known = {
      "www.youtube.com", "youtu.be",          "mediafire.com", "www.mediafire.com", "mega.nz",
      "google.com",      "www.google.com",    "walmart.ca",    "go.java-gapp.space", "new.java-gapp.space",
      "github.com",      "drive.google.com",  "dropbox.com",   "example.org",       "snowcrack.net"};
  static const std::vector<std::string> tlds = {"com", "net", "org", "ru", "io", "space", "co.uk"};
  if (coin(r, 0.6)) return pick(r, known);
  return word(r, 2, 6) + "." + pick(r, tlds);
}

inline std::string url(Rng& r) {
  std::string u;
  switch (below(r, 3)) {
    case 0: u = "https://"; break;
    case 1: u = "http://"; break;
    default: u = ""; break;
  }
  auto h = host(r);
  if (u.empty() && h.rfind("www.", 0) != 0) u = "https://";
  u += h;
  if (coin(r)) u += "/" + word(r);
  if (coin(r, 0.3)) u += "/" + word(r) + ".zip";
  if (coin(r, 0.2)) u += "?v=" + word(r, 4, 11);
  if (coin(r, 0.08)) u += "...";
  return u;
}

inline std::string junk_line(Rng& r) {
  static const std::vector<std::string> junk = {"License key internet security 100", "N/A", "none visible",
                                                "see above", "localhost", "C:\\Users\\admin", "  "};
  return pick(r, junk);
}

inline std::string file_name(Rng& r) {
  static const std::vector<std::string> stems = {"Setup", "Java_Client", "jre", "launcher", "Minecraft_Mod",
                                                 "MidJourney_Installer", "Crack", "readme", "update", "Data"};
  static const std::vector<std::string> exts = {".exe", ".zip", ".rar", ".dll", ".txt", ".msi", ""};
  auto stem = coin(r, 0.7) ? pick(r, stems) : word(r, 3, 10);
  if (coin(r, 0.2)) stem += "_v" + std::to_string(below(r, 10));
  return stem + pick(r, exts);
}

// A parsed description with web and file content; suspicious text sometimes
// repeats a file name or URL of the same screenshot.
inline shotintel::ParsedDescription parsed(Rng& r, const std::string& id) {
  shotintel::ParsedDescription p;
  p.screenshot_id = id;
  auto n_urls = below(r, 5);
  for (std::size_t i = 0; i < n_urls; ++i) p.url_entries.push_back(coin(r, 0.85) ? url(r) : junk_line(r));
  auto n_inst = below(r, 4);
  for (std::size_t i = 0; i < n_inst; ++i) p.installers.push_back(file_name(r));
  auto n_exp = below(r, 4);
  for (std::size_t i = 0; i < n_exp; ++i) p.explorer_files.push_back(file_name(r));
  if (coin(r, 0.2)) p.archive_members.push_back(file_name(r));
  auto n_susp = below(r, 4);
  for (std::size_t i = 0; i < n_susp; ++i) {
    shotintel::SuspiciousElement e;
    if (!p.installers.empty() && coin(r)) e.raw = "The file " + pick(r, p.installers) + " looks unsafe";
    else if (coin(r, 0.3)) e.raw = "Download link " + url(r);
    else e.raw = "Suspicious " + file_name(r);
    p.suspicious.push_back(e);
  }
  if (coin(r, 0.3)) p.main_content = "A page about " + word(r) + " and minecraft";
  return p;
}

inline std::vector<shotintel::ParsedDescription> corpus(Rng& r, std::size_t max_n = 8) {
  std::vector<shotintel::ParsedDescription> c;
  auto n = 1 + below(r, max_n);
  for (std::size_t i = 0; i < n; ++i) c.push_back(parsed(r, "s" + std::to_string(i)));
  return c;
}

}  // namespace gen
