#ifndef DCSIM_TIMEUTIL_HPP
#define DCSIM_TIMEUTIL_HPP

#include <cstdint>
#include <string>

namespace dcsim::timeutil {

/// Seconds per imbalance settlement period (15 minutes, 96 per day).
inline constexpr std::int64_t kIspSeconds = 900;
inline constexpr std::int64_t kHourSeconds = 3600;
inline constexpr std::int64_t kDaySeconds = 86400;

/// Parses an ISO-8601 timestamp with a mandatory UTC offset
/// ("2021-03-01T14:00:00+01:00" or "...Z") into Unix seconds (UTC).
/// Timestamps without an explicit offset are rejected: silently assuming a
/// zone has produced CET-vs-GMT misalignment in real market data.
std::int64_t parse_iso8601(const std::string& s);

/// Formats Unix seconds as "YYYY-MM-DDTHH:MM:SSZ".
std::string format_utc(std::int64_t unix_seconds);

std::int64_t floor_to(std::int64_t unix_seconds, std::int64_t granularity);

} // namespace dcsim::timeutil

#endif
