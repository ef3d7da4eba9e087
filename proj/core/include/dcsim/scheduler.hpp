#ifndef DCSIM_SCHEDULER_HPP
#define DCSIM_SCHEDULER_HPP

#include "dcsim/dvfs.hpp"
#include "dcsim/forecast.hpp"

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace dcsim {

/// Forecast-driven governor switching, one decision per ISP, with a
/// damping threshold that ascends the ladder when over-commission grows
/// too fast.
struct SchedulerConfig {
  /// Normalized over-commission growth (percentage points) tolerated
  /// before the scheduler ameliorates; infinity disables the guard.
  double damping_factor = 12.0;
  /// Most performant first.
  std::vector<Governor> ladder = {Governor::Performance, Governor::Ondemand,
                                  Governor::Conservative, Governor::Powersave};
  /// Rung held when the forecast is neither profitable nor above spot.
  std::size_t default_rung = 1; // Ondemand in the default ladder
  InferenceMode forecast_mode = InferenceMode::Average;

  void validate() const;
  static constexpr double kUnbounded = std::numeric_limits<double>::infinity();
};

enum class DecisionBranch { Profitable, AboveSpot, Hold, Damped };

struct DecisionLogEntry {
  std::int64_t isp_start = 0;
  double forecast_eur_mwh = 0.0;
  double spot_eur_mwh = 0.0;
  DecisionBranch branch = DecisionBranch::Hold;
  std::size_t rung_before = 0;
  std::size_t rung_after = 0;
  double oc_delta_pct = 0.0;
};

std::string to_string(DecisionBranch b);

struct SchedulerState {
  std::size_t rung = 0;
  /// Normalized over-commission percentage at the last amelioration,
  /// the reference point for the damping guard.
  double oc_reference_pct = 0.0;
  std::vector<DecisionLogEntry> log;
};

/// Per-ISP decision: a negative forecast price means being paid to
/// consume, so run flat out; a forecast above the hour's spot price
/// suppresses frequency one rung further; otherwise hold the default.
Governor decide(double forecast_eur_mwh, double spot_eur_mwh, SchedulerState& state,
                const SchedulerConfig& config, std::int64_t isp_start = 0);

/// Damping guard, evaluated per tick: once the over-commission increase
/// since the last amelioration strictly exceeds the damping factor, the
/// scheduler steps one rung toward performance and resets the reference.
/// Returns true when it ascended.
bool damp(SchedulerState& state, const SchedulerConfig& config, double oc_now_pct);

struct DampingSweepRow {
  double factor = 0.0;
  double energy_kwh = 0.0;
  double overcommit_pct = 0.0;
  bool failed = false;
  std::string error;
};

struct SweetSpotResult {
  double factor = 0.0;
  bool intersected = false; // false: closest-approach fallback
  bool degenerate = false;  // curves coincide everywhere
};

/// Cubic least-squares fits of min-max-normalized energy and
/// over-commission versus damping factor; the sweet spot is the smallest
/// crossing of the two fitted curves inside the swept range.
SweetSpotResult sweet_spot(const std::vector<DampingSweepRow>& rows);

/// Least-squares cubic fit, lowest-order coefficient first.
std::array<double, 4> fit_cubic(const std::vector<double>& x, const std::vector<double>& y);

} // namespace dcsim

#endif
