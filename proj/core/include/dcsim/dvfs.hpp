#ifndef DCSIM_DVFS_HPP
#define DCSIM_DVFS_HPP

#include "dcsim/power_models.hpp"

#include <string>
#include <vector>

namespace dcsim {

enum class Governor { Performance, Powersave, Ondemand, Conservative };

std::string to_string(Governor g);
Governor governor_from_string(const std::string& name);

/// Mirror of the kernel's cpufreq scaling policy. `target_mhz` carries
/// the previous proposal, which the conservative governor steps from.
struct ScalingPolicy {
  double f_min_mhz = 0.0;
  double f_max_mhz = 0.0;
  double target_mhz = 0.0;
  Governor governor = Governor::Ondemand;
  double up_threshold_pct = 80.0;   // kernel default
  double down_threshold_pct = 60.0; // up - 20, mirroring the kernel's gap
  double step_fraction = 0.05;      // conservative step, fraction of f_max

  void validate() const;
};

/// Proposes the next package frequency for a load percentage in [0, 100].
/// Pure; does not update policy.target_mhz (callers latch the result).
double governor_propose(const ScalingPolicy& policy, double load_percent);

/// Package-level P-state selection over a frequency-descending table.
struct PStateDriver {
  std::vector<PState> pstates; // validated, frequency strictly decreasing
};

struct DriveResult {
  PState pstate;
  bool clamped = false; // target fell outside the table span
};

/// Picks the slowest P-state whose frequency still covers the target
/// (ceiling match); targets outside the table clamp to the nearest end.
DriveResult drive_pstate(const PStateDriver& driver, double target_mhz);

} // namespace dcsim

#endif
