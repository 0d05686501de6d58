#include "csv.hpp"

#include <charconv>
#include <cstdlib>

#include "inertdrift/types.hpp"

namespace inertdrift::csv {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      out.push_back(field);
      field.clear();
    } else if (c != '\r' && c != ' ') {
      field.push_back(c);
    }
  }
  out.push_back(field);
  return out;
}

double parse_double(const std::string& field, const std::string& context) {
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (field.empty() || end != field.c_str() + field.size())
    throw Error(context + ": cannot parse '" + field + "' as a number");
  return v;
}

bool read_header(std::istream& in, std::vector<std::string>& columns) {
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    columns = split(line);
    return true;
  }
  return false;
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

}  // namespace inertdrift::csv
