#ifndef DCSIM_MACHINE_HPP
#define DCSIM_MACHINE_HPP

#include "dcsim/power_models.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace dcsim {

/// One timestamped VM resource demand sample.
struct TraceRecord {
  std::int64_t timestamp = 0; // Unix seconds, UTC
  std::string vm_id;
  double cpu_demand_mhz = 0.0;
  double memory_mb = 0.0;
};

/// A full workload trace with a uniform sampling interval.
struct Trace {
  std::vector<TraceRecord> records; // sorted by (timestamp, vm_id)
  std::int64_t interval_s = 0;      // inferred from the first two distinct timestamps

  double max_instant_cpu_demand() const;  // max over timestamps of summed VM demand
  double max_instant_memory() const;      // max over timestamps of summed VM memory
};

/// Loads `timestamp,vm_id,cpu_demand_mhz,memory_mb` CSV. Rows must be
/// sorted by timestamp then vm_id, demands non-negative, and the sample
/// interval uniform across the whole file.
Trace load_trace(const std::filesystem::path& path);

struct MachineSpec {
  int core_count = 1;             // c
  double max_frequency_mhz = 0.0; // per-core peak
  double memory_unit_mb = 1.0;
  std::vector<PState> pstates;
  PowerModelSpec power_model;
};

/// Number of hosts needed for a peak aggregate demand: ceil(ceil(d/f)/c).
/// Returns 0 for zero demand; engines reject zero-host topologies.
long size_fleet(double peak_demand_mhz, double max_frequency_mhz, int core_count);

/// Memory units per host: ceil(ceil(peak_mb/n_hosts)/unit_mb).
long size_memory(double peak_memory_mb, long n_hosts, double unit_mb);

/// Mutable per-host simulation state. Single-owner; distinct hosts may be
/// stepped in parallel within one tick.
struct HostState {
  int core_count = 1;
  double max_frequency_mhz = 0.0;      // per-core
  double current_frequency_mhz = 0.0;  // per-core, package-wide P-state
  std::vector<double> vm_demands_mhz;  // resident VMs, placement order

  double cumulative_granted_mhzs = 0.0;
  double cumulative_overcommit_mhzs = 0.0;
  double cumulative_demand_mhzs = 0.0;
  double t_cpu_s = 0.0;
  double t_idle_s = 0.0;
  double t_wall_s = 0.0;
  double last_usage = 0.0; // governor input for the next tick

  double full_capacity_mhz() const { return core_count * max_frequency_mhz; }
  double pstate_capacity_mhz() const { return core_count * current_frequency_mhz; }
};

struct StepResult {
  double granted_mhzs = 0.0;
  double overcommit_mhzs = 0.0;
  double usage = 0.0; // S / F
};

/// Advances one tick: grants min(demand, P-state capacity), books the
/// shortfall as over-commission, and updates the time accumulators.
/// granted + overcommit always equals demand * interval.
StepResult step_host(HostState& state, double interval_s);

double cpu_load(int n_run, int n_queued, int n_blocked);
double cpu_load_avg(double load, int core_count);
double cpu_utilization(double t_cpu_s, double t_wall_s);

} // namespace dcsim

#endif
