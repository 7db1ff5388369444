#pragma once

#include <filesystem>
#include <functional>
#include <istream>
#include <string>
#include <string_view>

#include "json.hpp"

namespace knowcat {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

// Calls `fn(line_number, line)` for each line in `in`. Line numbers are
// 1-based. A trailing '\r' is stripped.
void for_each_line(std::istream& in,
                   const std::function<void(std::size_t, std::string_view)>& fn);

bool is_blank(std::string_view line);

std::string read_file(const std::filesystem::path& path);

// Writes `contents` to a sibling temp file and renames it over `path`, so
// readers never observe a half-written file.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view contents);

// Rounds to 4 decimals for machine-readable reports.
double round4(double value);

}  // namespace knowcat
