#include "dcsim/csv.hpp"

#include "dcsim/errors.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace dcsim::csv {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

} // namespace

Table read_file(const std::filesystem::path& path,
                const std::vector<std::string>& expected_header) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open CSV file: " + path.string());

  Table t;
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty CSV file: " + path.string());
  t.header = split(line);
  if (!expected_header.empty() && t.header != expected_header) {
    std::string want;
    for (const auto& h : expected_header) want += (want.empty() ? "" : ",") + h;
    throw DataError("unexpected CSV header in " + path.string() + " (expected '" + want + "')");
  }

  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto fields = split(line);
    if (fields.size() != t.header.size()) {
      throw DataError(path.string() + ":" + std::to_string(lineno) +
                      ": expected " + std::to_string(t.header.size()) + " fields, got " +
                      std::to_string(fields.size()));
    }
    t.rows.push_back(std::move(fields));
  }
  return t;
}

double to_double(const std::string& field, const std::string& context) {
  char* end = nullptr;
  double v = std::strtod(field.c_str(), &end);
  if (end == field.c_str() || *end != '\0') {
    throw DataError("not a number: '" + field + "' (" + context + ")");
  }
  return v;
}

long long to_int(const std::string& field, const std::string& context) {
  char* end = nullptr;
  long long v = std::strtoll(field.c_str(), &end, 10);
  if (end == field.c_str() || *end != '\0') {
    throw DataError("not an integer: '" + field + "' (" + context + ")");
  }
  return v;
}

} // namespace dcsim::csv
