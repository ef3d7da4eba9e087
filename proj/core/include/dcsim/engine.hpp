#ifndef DCSIM_ENGINE_HPP
#define DCSIM_ENGINE_HPP

#include "dcsim/config.hpp"
#include "dcsim/dvfs.hpp"
#include "dcsim/machine.hpp"
#include "dcsim/market.hpp"
#include "dcsim/power_chain.hpp"
#include "dcsim/scheduler.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dcsim {

enum class ForecastSource { Synthetic, File };

/// Everything one deterministic run needs. Built from a sectioned
/// key-value config file; see ScenarioConfig::from_config for the keys.
struct ScenarioConfig {
  std::filesystem::path trace_path;
  MachineSpec machine;
  long host_override = 0;   // 0: size the fleet from the trace peak
  double vm_cap_mhz = 0.0;  // 0: uncapped; larger demands are flagged, not clipped

  PowerTopology topology;
  bool literal_support_loss = false;

  Governor governor = Governor::Ondemand; // used when the scheduler is off
  double f_min_mhz = 0.0;
  double f_max_mhz = 0.0;
  double up_threshold_pct = 80.0;
  double down_threshold_pct = 60.0;
  double step_fraction = 0.05;

  bool scheduler_enabled = false;
  SchedulerConfig scheduler;
  ForecastSource forecast_source = ForecastSource::Synthetic;
  double forecast_sigma = 0.0;
  std::filesystem::path inference_path;

  bool market_enabled = false;
  std::filesystem::path spot_path;
  std::filesystem::path imbalance_path;
  PriceSystem price_system = PriceSystem::TwoPrice;
  ProcurementStrategy procurement;
  std::vector<OnDemandTariff> tariffs;

  std::uint64_t seed = 0;

  static ScenarioConfig from_config(const Config& cfg);
  void validate() const;
};

/// One tick of the facility power ledger.
struct LedgerRow {
  std::int64_t t = 0;
  double servers_w = 0.0;   // modeled CPU (compute) power
  double psu_loss_w = 0.0;
  double pdu_loss_w = 0.0;
  double ups_loss_w = 0.0;
  double secondary_w = 0.0;
  double total_w = 0.0;
};

struct RunTotals {
  double energy_kwh = 0.0;     // facility
  double it_energy_kwh = 0.0;  // servers + PSU losses
  double demand_mhzs = 0.0;
  double granted_mhzs = 0.0;
  double overcommit_mhzs = 0.0;
  double overcommit_pct = 0.0; // overcommit / demand, percent
  double mean_usage = 0.0;
};

struct EfficiencyMetrics {
  double pue = 1.0;
  double utilization = 0.0;
  double cpe = 0.0;
  double itue = 0.0;
  double tue = 0.0;
};

struct RunReport {
  long n_hosts = 0;
  long memory_units_per_host = 0;
  std::int64_t interval_s = 0;
  long vm_cap_violations = 0;
  long pstate_clamps = 0;
  long secondary_clamps = 0;

  std::vector<LedgerRow> ledger;
  RunTotals totals;
  EfficiencyMetrics metrics;

  double base_load_w = 0.0;    // fleet idle power under the configured model
  std::vector<double> peak_w;  // per tick, IT power above the base load

  bool has_settlement = false;
  SettlementResult settlement;
  std::map<std::string, double> ondemand_costs_eur;

  std::vector<DecisionLogEntry> decisions;

  /// Per-ISP delivered facility energy, the settlement input; kept so
  /// settlements can be re-run from an exported report.
  std::vector<IspDispatch> dispatch;
};

/// Deterministic single-threaded simulation: hold demands, let the
/// governor propose, drive the P-state, evaluate host power, then fold
/// the losses up the chain and settle per ISP.
RunReport run(const ScenarioConfig& config);

/// CPE = U * P_IT / P_total; ITUE = P_IT / P_compute; TUE = ITUE * PUE.
/// P_compute is the modeled CPU power (PSU losses excluded).
EfficiencyMetrics compute_metrics(double pue, double utilization, double p_it_w,
                                  double p_compute_w);

/// base = fleet idle power at zero demand; peak(t) = P_IT(t) - base.
void decompose_loads(const ScenarioConfig& config, RunReport& report);

/// Writes ledger.csv, loads.csv, settlement.csv, decisions.csv and
/// summary.json under `out_dir`; formatting is fixed so identical runs
/// produce byte-identical files.
void write_report(const RunReport& report, const std::filesystem::path& out_dir);

/// One full simulation per damping factor; per-factor failures are
/// recorded and the sweep continues.
std::vector<DampingSweepRow> sweep_damping(const ScenarioConfig& config,
                                           const std::vector<double>& factors);

struct ProcurementSweepRow {
  double q = 0.0;
  double s = 0.0;
  double day_ahead_eur = 0.0;
  double imbalance_eur = 0.0;
  double total_eur = 0.0;
};

/// Re-settles one physical run under a grid of procurement strategies
/// (the dispatch itself does not depend on the procurement choice).
std::vector<ProcurementSweepRow> sweep_procurement(const ScenarioConfig& config,
                                                   const std::vector<double>& quantiles,
                                                   const std::vector<double>& scalars);

struct AaSweepRow {
  double sigma = 0.0;
  double mean_aa = 0.0;
};

/// Mean agreement accuracy of synthetic predictors per sigma, averaged
/// over `n_seeds` independent sub-seeded noise streams.
std::vector<AaSweepRow> aa_eval(const PriceBook& book, const std::vector<double>& sigmas,
                                int n_seeds, std::uint64_t base_seed,
                                AaMode mode = AaMode::Literal);

} // namespace dcsim

#endif
