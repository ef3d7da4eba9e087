#include "dcsim/dvfs.hpp"

#include "dcsim/errors.hpp"

#include <algorithm>

namespace dcsim {

std::string to_string(Governor g) {
  switch (g) {
    case Governor::Performance: return "performance";
    case Governor::Powersave: return "powersave";
    case Governor::Ondemand: return "ondemand";
    case Governor::Conservative: return "conservative";
  }
  return "?";
}

Governor governor_from_string(const std::string& name) {
  if (name == "performance") return Governor::Performance;
  if (name == "powersave") return Governor::Powersave;
  if (name == "ondemand") return Governor::Ondemand;
  if (name == "conservative") return Governor::Conservative;
  throw ConfigError("unknown governor: '" + name + "'");
}

void ScalingPolicy::validate() const {
  if (!(0.0 < f_min_mhz && f_min_mhz <= target_mhz && target_mhz <= f_max_mhz))
    throw ConfigError("scaling policy requires 0 < f_min <= target <= f_max");
  if (!(up_threshold_pct > 0.0 && up_threshold_pct <= 100.0))
    throw ConfigError("up_threshold must lie in (0, 100]");
  if (!(step_fraction > 0.0 && step_fraction <= 1.0))
    throw ConfigError("step_fraction must lie in (0, 1]");
}

double governor_propose(const ScalingPolicy& p, double load_percent) {
  if (load_percent < 0.0 || load_percent > 100.0)
    throw DomainError("governor load must lie in [0, 100]");
  switch (p.governor) {
    case Governor::Performance:
      return p.f_max_mhz;
    case Governor::Powersave:
      return p.f_min_mhz;
    case Governor::Ondemand:
      if (load_percent >= p.up_threshold_pct) return p.f_max_mhz;
      return p.f_min_mhz + load_percent * (p.f_max_mhz - p.f_min_mhz) / 100.0;
    case Governor::Conservative: {
      const double step = p.step_fraction * p.f_max_mhz;
      if (load_percent >= p.up_threshold_pct)
        return std::min(p.f_max_mhz, p.target_mhz + step);
      if (load_percent < p.down_threshold_pct)
        return std::max(p.f_min_mhz, p.target_mhz - step);
      return p.target_mhz;
    }
  }
  throw ConfigError("unknown governor");
}

DriveResult drive_pstate(const PStateDriver& driver, double target_mhz) {
  if (driver.pstates.empty()) throw ConfigError("P-state driver has an empty table");
  DriveResult out;
  // Table is frequency-descending; walk to the slowest state still >= target.
  out.pstate = driver.pstates.front();
  bool matched = false;
  for (const auto& ps : driver.pstates) {
    if (ps.frequency_mhz >= target_mhz) {
      out.pstate = ps;
      matched = true;
    } else {
      break;
    }
  }
  if (!matched) {
    out.pstate = driver.pstates.front();
    out.clamped = true; // target above the fastest state
  } else if (target_mhz < driver.pstates.back().frequency_mhz &&
             out.pstate.index == driver.pstates.back().index) {
    out.clamped = true; // target below the slowest state
  }
  return out;
}

} // namespace dcsim
