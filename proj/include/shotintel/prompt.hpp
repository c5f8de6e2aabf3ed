#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace shotintel {

/// Canonical section headings of the description format, in prompt order.
inline constexpr std::array<std::string_view, 6> kSectionNames = {
    "Main Content",        "Files/Programs",      "URL",
    "Browser Tabs Analysis", "Suspicious Elements", "Language and Date"};

struct PromptTemplate {
  std::string version;
  std::string text;
  std::vector<std::string> required_sections;
};

/// Throws Error(UnknownPromptVersion) for anything but a shipped version ("v1").
PromptTemplate build_prompt(std::string_view version);

}  // namespace shotintel
