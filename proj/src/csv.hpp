#pragma once

#include <istream>
#include <string>
#include <vector>

namespace inertdrift::csv {

std::vector<std::string> split(const std::string& line);
double parse_double(const std::string& field, const std::string& context);
/// Reads the header line; returns false on an empty stream.
bool read_header(std::istream& in, std::vector<std::string>& columns);
/// Shortest round-trip decimal representation.
std::string format_double(double value);

}  // namespace inertdrift::csv
