#include "support.hpp"

#include <fstream>
#include <random>

namespace testing_support {

fs::path fixtures() { return SHOTINTEL_FIXTURES; }
fs::path oracles() { return SHOTINTEL_ORACLES; }

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  std::random_device rd;
  path_ = fs::temp_directory_path() /
          ("shotintel-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

fs::path copy_png(const fs::path& dir, const std::string& name, int variant) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "aur-%04d.png", variant % 1000 + 1);
  fs::create_directories(dir);
  auto dst = dir / name;
  fs::copy_file(fixtures() / "reference_corpus" / "images" / buf, dst, fs::copy_options::overwrite_existing);
  return dst;
}

void write_text(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::string eset_reply() {
  auto raw = shotintel::read_text_file(fixtures() / "eset" / "reply.txt");
  return raw;
}

}  // namespace testing_support
