#pragma once

#include <string>
#include <vector>

namespace stdec::csv {

// Whole-file reader for the simple comma-separated tables used throughout
// (no quoting or embedded commas).  Trailing \r is stripped, blank lines
// skipped.  Fields are not trimmed beyond that.
std::vector<std::vector<std::string>> read_table(const std::string& path);

std::vector<std::string> split_line(const std::string& line);

// stod with file/row context in the error message.
double parse_double(const std::string& field, const std::string& context);

// Round-trippable double formatting for all CSV output.
std::string format_double(double v);

}  // namespace stdec::csv
