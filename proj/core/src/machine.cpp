#include "dcsim/machine.hpp"

#include "dcsim/csv.hpp"
#include "dcsim/errors.hpp"

#include <algorithm>
#include <cmath>

namespace dcsim {

namespace {

double max_instant_sum(const std::vector<TraceRecord>& records, double TraceRecord::*field) {
  double best = 0.0;
  double current = 0.0;
  std::int64_t t = 0;
  bool open = false;
  for (const auto& r : records) {
    if (!open || r.timestamp != t) {
      best = std::max(best, current);
      current = 0.0;
      t = r.timestamp;
      open = true;
    }
    current += r.*field;
  }
  return std::max(best, current);
}

} // namespace

double Trace::max_instant_cpu_demand() const {
  return max_instant_sum(records, &TraceRecord::cpu_demand_mhz);
}

double Trace::max_instant_memory() const {
  return max_instant_sum(records, &TraceRecord::memory_mb);
}

Trace load_trace(const std::filesystem::path& path) {
  auto t = csv::read_file(path, {"timestamp", "vm_id", "cpu_demand_mhz", "memory_mb"});
  Trace trace;
  trace.records.reserve(t.rows.size());
  for (const auto& row : t.rows) {
    TraceRecord r;
    r.timestamp = csv::to_int(row[0], path.string());
    r.vm_id = row[1];
    r.cpu_demand_mhz = csv::to_double(row[2], path.string());
    r.memory_mb = csv::to_double(row[3], path.string());
    if (r.cpu_demand_mhz < 0.0 || r.memory_mb < 0.0)
      throw DataError("negative demand for vm '" + r.vm_id + "' at t=" + row[0]);
    if (!trace.records.empty()) {
      const auto& prev = trace.records.back();
      if (r.timestamp < prev.timestamp ||
          (r.timestamp == prev.timestamp && r.vm_id < prev.vm_id))
        throw DataError("trace rows not sorted by (timestamp, vm_id) at t=" + row[0]);
      if (r.timestamp == prev.timestamp && r.vm_id == prev.vm_id)
        throw DataError("duplicate trace row for vm '" + r.vm_id + "' at t=" + row[0]);
    }
    trace.records.push_back(std::move(r));
  }
  if (trace.records.empty()) return trace;

  // Infer the interval from the first two distinct timestamps and require
  // every subsequent gap to be a multiple of it.
  std::int64_t t0 = trace.records.front().timestamp;
  for (const auto& r : trace.records) {
    if (r.timestamp != t0) {
      trace.interval_s = r.timestamp - t0;
      break;
    }
  }
  if (trace.interval_s > 0) {
    std::int64_t prev = t0;
    for (const auto& r : trace.records) {
      if (r.timestamp == prev) continue;
      if ((r.timestamp - prev) != trace.interval_s)
        throw DataError("non-uniform trace interval at t=" + std::to_string(r.timestamp));
      prev = r.timestamp;
    }
  }
  return trace;
}

long size_fleet(double peak_demand_mhz, double max_frequency_mhz, int core_count) {
  if (max_frequency_mhz <= 0.0) throw DomainError("max frequency must be > 0");
  if (core_count < 1) throw DomainError("core count must be >= 1");
  if (peak_demand_mhz < 0.0) throw DomainError("peak demand must be >= 0");
  double cores = std::ceil(peak_demand_mhz / max_frequency_mhz);
  return static_cast<long>(std::ceil(cores / core_count));
}

long size_memory(double peak_memory_mb, long n_hosts, double unit_mb) {
  if (n_hosts < 1) throw DomainError("host count must be >= 1");
  if (unit_mb <= 0.0) throw DomainError("memory unit size must be > 0");
  double per_host = std::ceil(peak_memory_mb / static_cast<double>(n_hosts));
  return static_cast<long>(std::ceil(per_host / unit_mb));
}

StepResult step_host(HostState& state, double interval_s) {
  if (interval_s <= 0.0) throw DomainError("step interval must be > 0");
  double demand = 0.0;
  for (std::size_t i = 0; i < state.vm_demands_mhz.size(); ++i) {
    if (state.vm_demands_mhz[i] < 0.0)
      throw DataError("negative demand for resident VM slot " + std::to_string(i));
    demand += state.vm_demands_mhz[i];
  }

  const double full = state.full_capacity_mhz();
  const double capacity = state.pstate_capacity_mhz();
  const double speed = std::min(demand, capacity);

  StepResult out;
  out.granted_mhzs = speed * interval_s;
  out.overcommit_mhzs = std::max(0.0, demand - speed) * interval_s;
  out.usage = full > 0.0 ? speed / full : 0.0;

  state.cumulative_granted_mhzs += out.granted_mhzs;
  state.cumulative_overcommit_mhzs += out.overcommit_mhzs;
  state.cumulative_demand_mhzs += demand * interval_s;
  state.t_cpu_s += interval_s * out.usage;
  state.t_idle_s += interval_s * (1.0 - out.usage);
  state.t_wall_s += interval_s;
  state.last_usage = out.usage;
  return out;
}

double cpu_load(int n_run, int n_queued, int n_blocked) {
  if (n_run < 0 || n_queued < 0 || n_blocked < 0)
    throw DomainError("task counts must be >= 0");
  return static_cast<double>(n_run + n_queued + n_blocked);
}

double cpu_load_avg(double load, int core_count) {
  if (core_count <= 0) throw DomainError("core count must be > 0");
  return load / core_count;
}

double cpu_utilization(double t_cpu_s, double t_wall_s) {
  if (t_wall_s <= 0.0) throw DomainError("wall time must be > 0");
  if (t_cpu_s < 0.0 || t_cpu_s > t_wall_s)
    throw DomainError("CPU time must lie within [0, wall time]");
  return t_cpu_s / t_wall_s;
}

} // namespace dcsim
