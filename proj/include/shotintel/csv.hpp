#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace shotintel::csv {

using Row = std::vector<std::string>;

/// RFC 4180 reader: quoted fields may contain commas, doubled quotes and
/// newlines. A trailing newline does not produce an empty row.
std::vector<Row> parse(std::string_view text);

std::string escape(std::string_view field);
std::string format_row(const Row& row);

}  // namespace shotintel::csv
