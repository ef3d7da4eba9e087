#ifndef DCSIM_POWER_MODELS_HPP
#define DCSIM_POWER_MODELS_HPP

#include <filesystem>
#include <utility>
#include <vector>

namespace dcsim {

enum class PowerModelKind {
  Constant,
  Linear,
  Square,
  Cubic,
  Sqrt,
  Mse,
  Interpolation,
  Asymptotic,
  AsymptoticDvfs,
};

/// One row of a piecewise-linear usage-to-power calibration table.
using PowerKnot = std::pair<double, double>; // (usage fraction, watts)

/// Parameters of a CPU/server power model. Immutable after validate();
/// evaluation is pure and never clamps its input, so callers must keep
/// usage within [0, 1].
struct PowerModelSpec {
  PowerModelKind kind = PowerModelKind::Linear;
  double p_idle_w = 0.0;
  double p_max_w = 0.0;
  double constant_w = 0.0;            // Constant only
  double r = 1.4;                     // Mse calibration exponent
  double a = 1.0;                     // Asymptotic factor
  std::vector<PowerKnot> table;       // Interpolation only

  /// Checks invariants (p_idle <= p_max, r > 0, a > 0, table strictly
  /// increasing in usage and spanning [0, 1]). Throws ConfigError.
  void validate() const;
};

/// Evaluates the configured model at usage u in [0, 1].
/// Throws DomainError for u outside [0, 1] or outside an interpolation
/// table's span.
double eval_power(const PowerModelSpec& model, double u);

/// Piecewise-linear interpolation over an ordered (usage, watts) table.
/// u must lie within [first usage, last usage].
double interpolate_power(const std::vector<PowerKnot>& table, double u);

/// A discrete CPU operating point. P0 (index 0) is the fastest.
struct PState {
  int index = 0;
  double frequency_mhz = 0.0;
  double voltage_v = 0.0;
  double power_w = 0.0;
};

/// Checks that frequency strictly decreases and power never increases
/// with the P-state index. Throws ConfigError.
void validate_pstates(const std::vector<PState>& table);

/// CSV loaders. Formats: `index,frequency_mhz,voltage_v,power_w` and
/// `usage,power_w`, header row required.
std::vector<PState> load_pstate_csv(const std::filesystem::path& path);
std::vector<PowerKnot> load_interpolation_csv(const std::filesystem::path& path);

} // namespace dcsim

#endif
