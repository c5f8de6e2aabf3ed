#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace shotintel {

/// Public Suffix List matcher (ICANN and private sections, wildcard and
/// exception rules). The repository bundles a snapshot under data/.
class PublicSuffixList {
 public:
  static PublicSuffixList from_file(const std::filesystem::path& path);
  static PublicSuffixList from_text(std::string_view text);

  /// Process-wide instance loaded from the bundled snapshot.
  static const PublicSuffixList& bundled();

  /// "go.java-gapp.space" -> "java-gapp.space". A host that is itself a public
  /// suffix (or has no dot) is returned unchanged.
  std::string registered_domain(std::string_view host) const;
  std::string public_suffix(std::string_view host) const;
  bool is_top_level(std::string_view label) const;

 private:
  std::unordered_set<std::string> rules_;
  std::unordered_set<std::string> wildcards_;   // "*.ck" stored as "ck"
  std::unordered_set<std::string> exceptions_;  // "!www.ck" stored as "www.ck"
  std::unordered_set<std::string> tlds_;
};

std::filesystem::path data_dir();

struct ValidatedUrl {
  std::string normalized;
  std::string scheme;  // empty for scheme-less candidates
  std::string host;    // lowercase, no port, no trailing dot
  std::string rest;    // path, query and fragment, case preserved

  friend bool operator==(const ValidatedUrl&, const ValidatedUrl&) = default;
};

/// Trims surrounding punctuation, lowercases scheme and host, keeps the path
/// verbatim. Rejects free text, unknown schemes and implausible hosts.
/// Scheme-less candidates must end in a known top-level domain that is not a
/// common file extension, so "Setup.exe" never reads as a host.
std::optional<ValidatedUrl> validate_url(std::string_view candidate);

/// True when the candidate ends in an ellipsis ("..." or U+2026), stops inside
/// a percent escape, or its host has no recognised top-level label.
bool detect_truncation(std::string_view candidate);

/// Raw substrings of free text that start with http://, https:// or www.
std::vector<std::string> find_url_tokens(std::string_view text);

}  // namespace shotintel
