#pragma once

#include <string>
#include <vector>

namespace chaintrace::csv {

// Minimal RFC-4180 style CSV. Fields containing comma, quote or newline are
// quoted on write; quoted fields are unescaped on read. No embedded-newline
// support on read: all files in this toolkit are one record per line.

std::string escape(const std::string& field);
std::string join(const std::vector<std::string>& fields);
std::vector<std::string> split(const std::string& line);

} // namespace chaintrace::csv
