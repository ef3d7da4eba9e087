#ifndef DCSIM_CSV_HPP
#define DCSIM_CSV_HPP

#include <filesystem>
#include <string>
#include <vector>

namespace dcsim::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Reads a comma-separated file with a mandatory header row.
/// Fields are plain (no quoting); surrounding whitespace is trimmed.
/// Throws DataError if the file is missing or the header does not match
/// `expected_header` (when non-empty).
Table read_file(const std::filesystem::path& path,
                const std::vector<std::string>& expected_header = {});

double to_double(const std::string& field, const std::string& context);
long long to_int(const std::string& field, const std::string& context);

} // namespace dcsim::csv

#endif
