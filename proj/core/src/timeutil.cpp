#include "dcsim/timeutil.hpp"

#include "dcsim/errors.hpp"

#include <cstdio>

namespace dcsim::timeutil {

namespace {

// Howard Hinnant's days-from-civil algorithm.
std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  y = static_cast<int>(yy + (m <= 2));
}

} // namespace

std::int64_t parse_iso8601(const std::string& s) {
  int y, mo, d, h, mi, sec;
  int n = 0;
  if (std::sscanf(s.c_str(), "%d-%d-%dT%d:%d:%d%n", &y, &mo, &d, &h, &mi, &sec, &n) != 6 &&
      std::sscanf(s.c_str(), "%d-%d-%d %d:%d:%d%n", &y, &mo, &d, &h, &mi, &sec, &n) != 6) {
    throw DataError("unparsable ISO-8601 timestamp: '" + s + "'");
  }
  std::string rest = s.substr(static_cast<std::size_t>(n));
  std::int64_t offset = 0;
  if (rest == "Z" || rest == "z" || rest == "+00:00" || rest == "-00:00") {
    offset = 0;
  } else if (!rest.empty() && (rest[0] == '+' || rest[0] == '-')) {
    int oh = 0, om = 0;
    if (std::sscanf(rest.c_str() + 1, "%d:%d", &oh, &om) != 2 &&
        std::sscanf(rest.c_str() + 1, "%2d%2d", &oh, &om) != 2) {
      throw DataError("unparsable UTC offset in timestamp: '" + s + "'");
    }
    offset = (rest[0] == '+' ? 1 : -1) * (oh * 3600LL + om * 60LL);
  } else {
    throw DataError("timestamp lacks a UTC offset: '" + s +
                    "' (append Z or +HH:MM; zone-less market data is ambiguous)");
  }
  std::int64_t days = days_from_civil(y, mo, d);
  return days * 86400 + h * 3600LL + mi * 60LL + sec - offset;
}

std::string format_utc(std::int64_t t) {
  std::int64_t days = t / 86400;
  std::int64_t tod = t % 86400;
  if (tod < 0) {
    tod += 86400;
    --days;
  }
  int y, m, d;
  civil_from_days(days, y, m, d);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02lld:%02lld:%02lldZ", y, m, d,
                static_cast<long long>(tod / 3600), static_cast<long long>((tod / 60) % 60),
                static_cast<long long>(tod % 60));
  return buf;
}

std::int64_t floor_to(std::int64_t t, std::int64_t g) {
  std::int64_t r = t % g;
  if (r < 0) r += g;
  return t - r;
}

} // namespace dcsim::timeutil
