#include "dcsim/engine.hpp"

#include "dcsim/errors.hpp"
#include "dcsim/forecast.hpp"
#include "dcsim/timeutil.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace dcsim {

namespace {

PowerModelKind power_model_kind_from_string(const std::string& name) {
  if (name == "constant") return PowerModelKind::Constant;
  if (name == "linear") return PowerModelKind::Linear;
  if (name == "square") return PowerModelKind::Square;
  if (name == "cubic") return PowerModelKind::Cubic;
  if (name == "sqrt") return PowerModelKind::Sqrt;
  if (name == "mse") return PowerModelKind::Mse;
  if (name == "interpolation") return PowerModelKind::Interpolation;
  if (name == "asymptotic") return PowerModelKind::Asymptotic;
  if (name == "asymptotic_dvfs") return PowerModelKind::AsymptoticDvfs;
  throw ConfigError("unknown power model variant: '" + name + "'");
}

InferenceMode inference_mode_from_string(const std::string& name) {
  if (name == "first") return InferenceMode::First;
  if (name == "last") return InferenceMode::Last;
  if (name == "average") return InferenceMode::Average;
  throw ConfigError("unknown forecast selection mode: '" + name + "'");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(s);
  while (std::getline(ss, item, ',')) {
    auto b = item.find_first_not_of(" \t");
    auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

} // namespace

ScenarioConfig ScenarioConfig::from_config(const Config& cfg) {
  ScenarioConfig sc;
  sc.trace_path = cfg.get_path("trace.path");

  sc.machine.core_count = static_cast<int>(cfg.get_int("machine.core_count"));
  sc.machine.max_frequency_mhz = cfg.get_double("machine.max_frequency_mhz");
  sc.machine.memory_unit_mb = cfg.get_double_or("machine.memory_unit_mb", 1024.0);
  if (cfg.has("machine.pstate_table"))
    sc.machine.pstates = load_pstate_csv(cfg.get_path("machine.pstate_table"));
  sc.host_override = cfg.get_int_or("machine.hosts", 0);
  sc.vm_cap_mhz = cfg.get_double_or("machine.vm_cap_mhz", 0.0);

  auto& pm = sc.machine.power_model;
  pm.kind = power_model_kind_from_string(cfg.get_or("power_model.variant", "linear"));
  pm.p_idle_w = cfg.get_double_or("power_model.p_idle_w", 0.0);
  pm.p_max_w = cfg.get_double_or("power_model.p_max_w", 0.0);
  pm.constant_w = cfg.get_double_or("power_model.constant_w", 0.0);
  pm.r = cfg.get_double_or("power_model.r", 1.4);
  pm.a = cfg.get_double_or("power_model.a", 1.0);
  if (cfg.has("power_model.table"))
    pm.table = load_interpolation_csv(cfg.get_path("power_model.table"));
  pm.validate();

  sc.topology.hosts_per_pdu = cfg.get_int_or("topology.hosts_per_pdu", 1);
  sc.topology.pdus_per_ups = cfg.get_int_or("topology.pdus_per_ups", 1);
  sc.topology.ups_count = cfg.get_int_or("topology.ups_count", 1);
  sc.topology.pue = cfg.get_double_or("topology.pue", 1.0);
  sc.topology.psu.rated_output_w = cfg.get_double_or("psu.rated_output_w", 870.0);
  // PDU/UPS coefficients have no published defaults; they are mandatory.
  sc.topology.pdu.kind = SupportKind::Pdu;
  sc.topology.pdu.nameplate_loss = cfg.get_double("pdu.nameplate_loss");
  sc.topology.pdu.tare_loss = cfg.get_double("pdu.tare_loss");
  sc.topology.pdu.rated_power_w = cfg.get_double("pdu.rated_power_w");
  sc.topology.ups.kind = SupportKind::Ups;
  sc.topology.ups.nameplate_loss = cfg.get_double("ups.nameplate_loss");
  sc.topology.ups.tare_loss = cfg.get_double("ups.tare_loss");
  sc.topology.ups.rated_power_w = cfg.get_double("ups.rated_power_w");
  sc.literal_support_loss = cfg.get_bool_or("topology.literal_support_loss", false);

  sc.governor = governor_from_string(cfg.get_or("dvfs.governor", "ondemand"));
  sc.f_min_mhz = cfg.get_double("dvfs.f_min_mhz");
  sc.f_max_mhz = cfg.get_double_or("dvfs.f_max_mhz", sc.machine.max_frequency_mhz);
  sc.up_threshold_pct = cfg.get_double_or("dvfs.up_threshold_pct", 80.0);
  sc.down_threshold_pct =
      cfg.get_double_or("dvfs.down_threshold_pct", sc.up_threshold_pct - 20.0);
  sc.step_fraction = cfg.get_double_or("dvfs.step_fraction", 0.05);

  sc.scheduler_enabled = cfg.get_bool_or("scheduler.enabled", false);
  if (cfg.has("scheduler.damping_factor")) {
    const std::string df = cfg.get("scheduler.damping_factor");
    sc.scheduler.damping_factor =
        df == "unbounded" ? SchedulerConfig::kUnbounded : cfg.get_double("scheduler.damping_factor");
  }
  if (cfg.has("scheduler.ladder")) {
    sc.scheduler.ladder.clear();
    for (const auto& name : split_list(cfg.get("scheduler.ladder")))
      sc.scheduler.ladder.push_back(governor_from_string(name));
  }
  if (cfg.has("scheduler.default_rung")) {
    const Governor g = governor_from_string(cfg.get("scheduler.default_rung"));
    auto it = std::find(sc.scheduler.ladder.begin(), sc.scheduler.ladder.end(), g);
    if (it == sc.scheduler.ladder.end())
      throw ConfigError("scheduler.default_rung is not in the ladder");
    sc.scheduler.default_rung = static_cast<std::size_t>(it - sc.scheduler.ladder.begin());
  }
  sc.scheduler.forecast_mode =
      inference_mode_from_string(cfg.get_or("scheduler.forecast_mode", "average"));

  const std::string src = cfg.get_or("forecast.source", "synthetic");
  if (src == "synthetic") {
    sc.forecast_source = ForecastSource::Synthetic;
    sc.forecast_sigma = cfg.get_double_or("forecast.sigma", 0.0);
  } else if (src == "file") {
    sc.forecast_source = ForecastSource::File;
    sc.inference_path = cfg.get_path("forecast.inference_csv");
  } else {
    throw ConfigError("forecast.source must be 'synthetic' or 'file'");
  }

  sc.market_enabled = cfg.has("market.spot_csv");
  if (sc.market_enabled) {
    sc.spot_path = cfg.get_path("market.spot_csv");
    sc.imbalance_path = cfg.get_path("market.imbalance_csv");
    const std::string system = cfg.get_or("market.price_system", "two");
    if (system == "one")
      sc.price_system = PriceSystem::OnePrice;
    else if (system == "two")
      sc.price_system = PriceSystem::TwoPrice;
    else
      throw ConfigError("market.price_system must be 'one' or 'two'");
    const std::string proc = cfg.get_or("market.procurement", "base_load");
    if (proc == "base_load") {
      sc.procurement.kind = ProcurementKind::BaseLoad;
    } else if (proc == "quantile") {
      sc.procurement.kind = ProcurementKind::QuantileScalar;
      sc.procurement.q = cfg.get_double("market.q");
      sc.procurement.s = cfg.get_double("market.s");
    } else {
      throw ConfigError("market.procurement must be 'base_load' or 'quantile'");
    }
    for (const auto& label : {"low", "mid", "high"}) {
      const std::string key = std::string("market.ondemand_") + label + "_eur_mwh";
      if (cfg.has(key)) sc.tariffs.push_back({label, cfg.get_double(key)});
    }
  }

  sc.seed = static_cast<std::uint64_t>(cfg.get_int_or("run.seed", 0));
  sc.validate();
  return sc;
}

void ScenarioConfig::validate() const {
  machine.power_model.validate();
  if (machine.core_count < 1) throw ConfigError("machine.core_count must be >= 1");
  if (machine.max_frequency_mhz <= 0.0)
    throw ConfigError("machine.max_frequency_mhz must be > 0");
  if (!machine.pstates.empty()) validate_pstates(machine.pstates);
  topology.validate();
  if (f_min_mhz <= 0.0 || f_min_mhz > f_max_mhz)
    throw ConfigError("dvfs requires 0 < f_min <= f_max");
  if (scheduler_enabled) {
    scheduler.validate();
    if (!market_enabled)
      throw ConfigError("the forecast-driven scheduler needs market price data");
  }
  for (const auto& t : tariffs)
    if (t.price_eur_mwh <= 0.0) throw ConfigError("on-demand tariff prices must be > 0");
}

EfficiencyMetrics compute_metrics(double pue, double utilization, double p_it_w,
                                  double p_compute_w) {
  if (p_it_w <= 0.0 || p_compute_w <= 0.0)
    throw DomainError("efficiency metrics need positive IT and compute power");
  EfficiencyMetrics m;
  m.pue = pue;
  m.utilization = utilization;
  m.cpe = utilization / pue;
  m.itue = p_it_w / p_compute_w;
  m.tue = m.itue * pue;
  return m;
}

namespace {

struct TickDemand {
  std::int64_t t = 0;
  // Demand per VM (first-appearance order), zero before a VM's first record.
  std::vector<double> vm_demand_mhz;
};

struct PreparedTrace {
  std::vector<std::string> vm_ids; // first-appearance order
  std::vector<TickDemand> ticks;
  std::int64_t interval_s = 0;
  double peak_cpu_mhz = 0.0;
  double peak_memory_mb = 0.0;
  long cap_violations = 0;
};

PreparedTrace prepare_trace(const Trace& trace, double vm_cap_mhz) {
  PreparedTrace out;
  out.interval_s = trace.interval_s;
  out.peak_cpu_mhz = trace.max_instant_cpu_demand();
  out.peak_memory_mb = trace.max_instant_memory();
  if (trace.records.empty()) return out;
  if (trace.interval_s == 0 && trace.records.size() > 1) {
    // Single-timestamp trace with several VMs: no interval to infer.
    bool multi_ts = false;
    for (const auto& r : trace.records)
      if (r.timestamp != trace.records.front().timestamp) multi_ts = true;
    if (!multi_ts)
      throw DataError("trace has a single timestamp; cannot infer the tick interval");
  }

  std::map<std::string, std::size_t> slot;
  for (const auto& r : trace.records) {
    if (slot.find(r.vm_id) == slot.end()) {
      slot[r.vm_id] = out.vm_ids.size();
      out.vm_ids.push_back(r.vm_id);
    }
  }

  std::vector<double> held(out.vm_ids.size(), 0.0);
  std::size_t i = 0;
  while (i < trace.records.size()) {
    const std::int64_t t = trace.records[i].timestamp;
    while (i < trace.records.size() && trace.records[i].timestamp == t) {
      const auto& r = trace.records[i];
      if (vm_cap_mhz > 0.0 && r.cpu_demand_mhz > vm_cap_mhz) ++out.cap_violations;
      held[slot[r.vm_id]] = r.cpu_demand_mhz;
      ++i;
    }
    TickDemand td;
    td.t = t;
    td.vm_demand_mhz = held; // zero-order hold for VMs without a sample here
    out.ticks.push_back(std::move(td));
  }
  return out;
}

struct ForecastSeries {
  // ISP start -> forecast of that ISP's shortage price.
  std::map<std::int64_t, double> by_isp;
};

ForecastSeries build_forecast(const ScenarioConfig& cfg, const PriceBook& book,
                              std::int64_t t_begin, std::int64_t t_end) {
  ForecastSeries out;
  const std::int64_t first = timeutil::floor_to(t_begin, timeutil::kIspSeconds);
  if (cfg.forecast_source == ForecastSource::Synthetic) {
    std::vector<std::int64_t> isps;
    std::vector<double> actual;
    for (std::int64_t t = first; t < t_end; t += timeutil::kIspSeconds) {
      isps.push_back(t);
      actual.push_back(book.imbalance_for(t).shortage_eur_mwh);
    }
    auto noisy = synth_forecast(actual, cfg.forecast_sigma, cfg.seed);
    for (std::size_t i = 0; i < isps.size(); ++i) out.by_isp[isps[i]] = noisy[i];
  } else {
    auto inferences = load_inference_csv(cfg.inference_path);
    for (std::int64_t t = first; t < t_end; t += timeutil::kIspSeconds) {
      auto it = inferences.find(t);
      if (it == inferences.end())
        throw DataError("no ML inference for ISP " + timeutil::format_utc(t));
      out.by_isp[t] = select_inference(it->second, cfg.scheduler.forecast_mode);
    }
  }
  return out;
}

} // namespace

void decompose_loads(const ScenarioConfig& config, RunReport& report) {
  report.base_load_w =
      static_cast<double>(report.n_hosts) * eval_power(config.machine.power_model, 0.0);
  report.peak_w.clear();
  report.peak_w.reserve(report.ledger.size());
  for (const auto& row : report.ledger)
    report.peak_w.push_back(row.servers_w + row.psu_loss_w - report.base_load_w);
}

RunReport run(const ScenarioConfig& config) {
  config.validate();
  RunReport report;

  const Trace trace = load_trace(config.trace_path);
  PreparedTrace pt = prepare_trace(trace, config.vm_cap_mhz);
  report.interval_s = pt.interval_s;
  report.vm_cap_violations = pt.cap_violations;

  if (pt.ticks.empty()) return report; // vacuous run, all-zero totals

  report.n_hosts = config.host_override > 0
                       ? config.host_override
                       : size_fleet(pt.peak_cpu_mhz, config.machine.max_frequency_mhz,
                                    config.machine.core_count);
  if (report.n_hosts < 1)
    throw ConfigError("trace demand sizes the fleet to zero hosts; nothing to simulate");
  report.memory_units_per_host =
      size_memory(pt.peak_memory_mb, report.n_hosts, config.machine.memory_unit_mb);

  if (pt.ticks.size() > 1 && pt.interval_s <= 0)
    throw DataError("trace interval could not be inferred");
  const double dt = static_cast<double>(pt.interval_s > 0 ? pt.interval_s : 1);

  // Round-robin placement by first appearance; VMs never migrate.
  const std::size_t n_hosts = static_cast<std::size_t>(report.n_hosts);
  std::vector<std::vector<std::size_t>> host_vms(n_hosts);
  for (std::size_t v = 0; v < pt.vm_ids.size(); ++v) host_vms[v % n_hosts].push_back(v);

  std::vector<HostState> hosts(n_hosts);
  std::vector<ScalingPolicy> policies(n_hosts);
  for (std::size_t h = 0; h < n_hosts; ++h) {
    hosts[h].core_count = config.machine.core_count;
    hosts[h].max_frequency_mhz = config.machine.max_frequency_mhz;
    // Boot at the top of the range, like cpufreq before a governor engages;
    // starting at f_min would trap the conservative governor (its load input
    // is u against full capacity, which a low frequency caps below threshold).
    hosts[h].current_frequency_mhz = config.f_max_mhz;
    hosts[h].vm_demands_mhz.assign(host_vms[h].size(), 0.0);
    policies[h].f_min_mhz = config.f_min_mhz;
    policies[h].f_max_mhz = config.f_max_mhz;
    policies[h].target_mhz = config.f_max_mhz;
    policies[h].up_threshold_pct = config.up_threshold_pct;
    policies[h].down_threshold_pct = config.down_threshold_pct;
    policies[h].step_fraction = config.step_fraction;
    policies[h].validate();
  }
  PStateDriver driver{config.machine.pstates};

  PriceBook book;
  ForecastSeries forecast;
  if (config.market_enabled) {
    ingest_spot(config.spot_path, book);
    ingest_imbalance(config.imbalance_path, book);
  }
  if (config.scheduler_enabled) {
    forecast = build_forecast(config, book, pt.ticks.front().t,
                              pt.ticks.back().t + pt.interval_s);
  }

  SchedulerState sched_state;
  sched_state.rung = config.scheduler.default_rung;
  Governor active_governor = config.scheduler_enabled
                                 ? config.scheduler.ladder[sched_state.rung]
                                 : config.governor;

  std::map<std::int64_t, double> isp_energy_mwh;  // delivered per ISP
  std::map<std::int64_t, double> hour_energy_mwh; // facility per hour

  double sum_usage = 0.0;
  std::size_t usage_samples = 0;
  double sum_it_w = 0.0;
  double sum_compute_w = 0.0;
  std::int64_t last_isp = -1;

  for (const auto& tick : pt.ticks) {
    if (config.scheduler_enabled) {
      const std::int64_t isp = timeutil::floor_to(tick.t, timeutil::kIspSeconds);
      if (isp != last_isp) {
        const double pf = forecast.by_isp.at(isp);
        const double ps = book.spot_for(isp);
        active_governor = decide(pf, ps, sched_state, config.scheduler, isp);
        last_isp = isp;
      }
    }

    double servers_w = 0.0;
    double psu_loss_w = 0.0;
    std::vector<double> server_in_w(n_hosts, 0.0);
    for (std::size_t h = 0; h < n_hosts; ++h) {
      for (std::size_t k = 0; k < host_vms[h].size(); ++k)
        hosts[h].vm_demands_mhz[k] = tick.vm_demand_mhz[host_vms[h][k]];

      policies[h].governor = active_governor;
      const double load_pct = 100.0 * hosts[h].last_usage;
      const double target = governor_propose(policies[h], load_pct);
      policies[h].target_mhz = target;
      if (!driver.pstates.empty()) {
        auto drive = drive_pstate(driver, target);
        if (drive.clamped) ++report.pstate_clamps;
        hosts[h].current_frequency_mhz = drive.pstate.frequency_mhz;
      } else {
        hosts[h].current_frequency_mhz = target; // continuous DVFS, no P-state table
      }

      const StepResult sr = step_host(hosts[h], dt);
      sum_usage += sr.usage;
      ++usage_samples;

      const double p = eval_power(config.machine.power_model, sr.usage);
      const auto psu = psu_step(config.topology.psu, p, dt);
      servers_w += p;
      psu_loss_w += psu.loss_w;
      server_in_w[h] = p + psu.loss_w;
    }

    // Fold the chain upward: rack PDUs over host blocks, UPS units over
    // PDU blocks, then the PUE-derived secondary support.
    double pdu_loss_sum = 0.0;
    std::vector<double> pdu_in_w;
    const auto hosts_per_pdu = static_cast<std::size_t>(config.topology.hosts_per_pdu);
    for (std::size_t h0 = 0; h0 < n_hosts; h0 += hosts_per_pdu) {
      double inlet = 0.0;
      for (std::size_t h = h0; h < std::min(n_hosts, h0 + hosts_per_pdu); ++h)
        inlet += server_in_w[h];
      const double loss = pdu_loss(config.topology.pdu, inlet, config.literal_support_loss);
      pdu_loss_sum += loss;
      pdu_in_w.push_back(inlet + loss);
    }
    double ups_loss_sum = 0.0;
    for (std::size_t p0 = 0; p0 < pdu_in_w.size();
         p0 += static_cast<std::size_t>(config.topology.pdus_per_ups)) {
      double inlet = 0.0;
      for (std::size_t p = p0;
           p < std::min(pdu_in_w.size(), p0 + static_cast<std::size_t>(config.topology.pdus_per_ups));
           ++p)
        inlet += pdu_in_w[p];
      ups_loss_sum += ups_loss(config.topology.ups, inlet);
    }

    const double sum_server_in = servers_w + psu_loss_w;
    const auto secondary =
        secondary_power(config.topology.pue, sum_server_in, pdu_loss_sum, ups_loss_sum);
    if (secondary.clamped) ++report.secondary_clamps;

    LedgerRow row;
    row.t = tick.t;
    row.servers_w = servers_w;
    row.psu_loss_w = psu_loss_w;
    row.pdu_loss_w = pdu_loss_sum;
    row.ups_loss_w = ups_loss_sum;
    row.secondary_w = secondary.power_w;
    row.total_w = sum_server_in + pdu_loss_sum + ups_loss_sum + secondary.power_w;
    report.ledger.push_back(row);

    sum_it_w += sum_server_in;
    sum_compute_w += servers_w;

    const double energy_mwh = row.total_w * dt / kJoulesPerMwh;
    isp_energy_mwh[timeutil::floor_to(tick.t, timeutil::kIspSeconds)] += energy_mwh;
    hour_energy_mwh[timeutil::floor_to(tick.t, timeutil::kHourSeconds)] += energy_mwh;

    if (config.scheduler_enabled) {
      double demand = 0.0, oc = 0.0;
      for (const auto& h : hosts) {
        demand += h.cumulative_demand_mhzs;
        oc += h.cumulative_overcommit_mhzs;
      }
      const double oc_pct = demand > 0.0 ? 100.0 * oc / demand : 0.0;
      damp(sched_state, config.scheduler, oc_pct);
      active_governor = config.scheduler.ladder[sched_state.rung];
    }
  }

  for (const auto& h : hosts) {
    report.totals.demand_mhzs += h.cumulative_demand_mhzs;
    report.totals.granted_mhzs += h.cumulative_granted_mhzs;
    report.totals.overcommit_mhzs += h.cumulative_overcommit_mhzs;
  }
  report.totals.overcommit_pct =
      report.totals.demand_mhzs > 0.0
          ? 100.0 * report.totals.overcommit_mhzs / report.totals.demand_mhzs
          : 0.0;
  report.totals.mean_usage = usage_samples > 0 ? sum_usage / usage_samples : 0.0;
  for (const auto& row : report.ledger) {
    report.totals.energy_kwh += row.total_w * dt / 3.6e6;
    report.totals.it_energy_kwh += (row.servers_w + row.psu_loss_w) * dt / 3.6e6;
  }

  const double ticks = static_cast<double>(report.ledger.size());
  if (sum_it_w > 0.0 && sum_compute_w > 0.0) {
    report.metrics = compute_metrics(config.topology.pue, report.totals.mean_usage,
                                     sum_it_w / ticks, sum_compute_w / ticks);
  }

  decompose_loads(config, report);
  report.decisions = sched_state.log;

  if (config.market_enabled) {
    // Perfect day-ahead load forecast: the schedule for each civil day is
    // derived from that day's actual hourly facility energy.
    std::map<std::int64_t, std::vector<double>> day_hours;
    for (const auto& [hour, mwh] : hour_energy_mwh)
      day_hours[timeutil::floor_to(hour, timeutil::kDaySeconds)].push_back(mwh);
    std::map<std::int64_t, double> day_qs;
    for (const auto& [day, hours] : day_hours)
      day_qs[day] = schedule_quantity(hours, config.procurement);

    for (const auto& [isp, delivered] : isp_energy_mwh) {
      IspDispatch d;
      d.isp_start = isp;
      d.scheduled_mwh = day_qs.at(timeutil::floor_to(isp, timeutil::kDaySeconds)) / 4.0;
      d.delivered_mwh = delivered;
      report.dispatch.push_back(d);
    }
    report.settlement = settle(book, config.price_system, report.dispatch);
    report.has_settlement = true;

    double total_mwh = 0.0;
    for (const auto& [isp, mwh] : isp_energy_mwh) total_mwh += mwh;
    for (const auto& tariff : config.tariffs)
      report.ondemand_costs_eur[tariff.label] = ondemand_cost(total_mwh, tariff);
  }
  return report;
}

void write_report(const RunReport& report, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);

  {
    std::ofstream out(out_dir / "ledger.csv");
    out << "t,servers_w,psu_loss_w,pdu_loss_w,ups_loss_w,secondary_w,total_w\n";
    for (const auto& r : report.ledger) {
      out << r.t << ',' << fmt(r.servers_w) << ',' << fmt(r.psu_loss_w) << ','
          << fmt(r.pdu_loss_w) << ',' << fmt(r.ups_loss_w) << ',' << fmt(r.secondary_w) << ','
          << fmt(r.total_w) << '\n';
    }
  }
  {
    std::ofstream out(out_dir / "loads.csv");
    out << "t,it_w,base_w,peak_w\n";
    for (std::size_t i = 0; i < report.ledger.size(); ++i) {
      const auto& r = report.ledger[i];
      out << r.t << ',' << fmt(r.servers_w + r.psu_loss_w) << ',' << fmt(report.base_load_w)
          << ',' << fmt(report.peak_w[i]) << '\n';
    }
  }
  if (report.has_settlement) {
    std::ofstream out(out_dir / "settlement.csv");
    out << "isp_start,scheduled_mwh,delivered_mwh,shortage_mwh,surplus_mwh,cost_eur\n";
    for (const auto& l : report.settlement.lines) {
      out << timeutil::format_utc(l.isp_start) << ',' << fmt(l.scheduled_mwh) << ','
          << fmt(l.delivered_mwh) << ',' << fmt(l.shortage_mwh) << ',' << fmt(l.surplus_mwh)
          << ',' << fmt(l.cost_eur) << '\n';
    }
  }
  {
    std::ofstream out(out_dir / "decisions.csv");
    out << "isp_start,forecast_eur_mwh,spot_eur_mwh,branch,rung_before,rung_after,oc_delta_pct\n";
    for (const auto& d : report.decisions) {
      out << timeutil::format_utc(d.isp_start) << ',' << fmt(d.forecast_eur_mwh) << ','
          << fmt(d.spot_eur_mwh) << ',' << to_string(d.branch) << ',' << d.rung_before << ','
          << d.rung_after << ',' << fmt(d.oc_delta_pct) << '\n';
    }
  }

  nlohmann::json j;
  j["hosts"] = report.n_hosts;
  j["memory_units_per_host"] = report.memory_units_per_host;
  j["interval_s"] = report.interval_s;
  j["ticks"] = report.ledger.size();
  j["vm_cap_violations"] = report.vm_cap_violations;
  j["pstate_clamps"] = report.pstate_clamps;
  j["secondary_clamps"] = report.secondary_clamps;
  j["totals"] = {{"energy_kwh", report.totals.energy_kwh},
                 {"it_energy_kwh", report.totals.it_energy_kwh},
                 {"demand_mhzs", report.totals.demand_mhzs},
                 {"granted_mhzs", report.totals.granted_mhzs},
                 {"overcommit_mhzs", report.totals.overcommit_mhzs},
                 {"overcommit_pct", report.totals.overcommit_pct},
                 {"mean_usage", report.totals.mean_usage}};
  j["metrics"] = {{"pue", report.metrics.pue},
                  {"utilization", report.metrics.utilization},
                  {"cpe", report.metrics.cpe},
                  {"itue", report.metrics.itue},
                  {"tue", report.metrics.tue}};
  j["base_load_w"] = report.base_load_w;
  if (report.has_settlement) {
    j["settlement"] = {{"day_ahead_eur", report.settlement.day_ahead_eur},
                       {"imbalance_eur", report.settlement.imbalance_eur},
                       {"total_eur", report.settlement.total_eur}};
    j["ondemand_costs_eur"] = report.ondemand_costs_eur;
  }
  std::ofstream out(out_dir / "summary.json");
  out << j.dump(2) << '\n';
}

std::vector<DampingSweepRow> sweep_damping(const ScenarioConfig& config,
                                           const std::vector<double>& factors) {
  std::vector<DampingSweepRow> rows;
  rows.reserve(factors.size());
  for (double f : factors) {
    DampingSweepRow row;
    row.factor = f;
    try {
      ScenarioConfig c = config;
      c.scheduler_enabled = true;
      c.scheduler.damping_factor = f;
      const RunReport r = run(c);
      row.energy_kwh = r.totals.energy_kwh;
      row.overcommit_pct = r.totals.overcommit_pct;
    } catch (const std::exception& e) {
      row.failed = true;
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ProcurementSweepRow> sweep_procurement(const ScenarioConfig& config,
                                                   const std::vector<double>& quantiles,
                                                   const std::vector<double>& scalars) {
  ScenarioConfig base = config;
  if (!base.market_enabled) throw ConfigError("procurement sweep needs market price data");
  const RunReport report = run(base);

  PriceBook book;
  ingest_spot(base.spot_path, book);
  ingest_imbalance(base.imbalance_path, book);

  // Rebuild per-day hourly energies from the dispatch (4 ISPs per hour).
  std::map<std::int64_t, double> hour_energy;
  for (const auto& d : report.dispatch)
    hour_energy[timeutil::floor_to(d.isp_start, timeutil::kHourSeconds)] += d.delivered_mwh;
  std::map<std::int64_t, std::vector<double>> day_hours;
  for (const auto& [hour, mwh] : hour_energy)
    day_hours[timeutil::floor_to(hour, timeutil::kDaySeconds)].push_back(mwh);

  std::vector<ProcurementSweepRow> rows;
  for (double q : quantiles) {
    for (double s : scalars) {
      ProcurementStrategy strat;
      strat.kind = ProcurementKind::QuantileScalar;
      strat.q = q;
      strat.s = s;
      std::map<std::int64_t, double> day_qs;
      for (const auto& [day, hours] : day_hours)
        day_qs[day] = schedule_quantity(hours, strat);

      std::vector<IspDispatch> dispatch = report.dispatch;
      for (auto& d : dispatch)
        d.scheduled_mwh = day_qs.at(timeutil::floor_to(d.isp_start, timeutil::kDaySeconds)) / 4.0;

      const auto settlement = settle(book, base.price_system, dispatch);
      rows.push_back({q, s, settlement.day_ahead_eur, settlement.imbalance_eur,
                      settlement.total_eur});
    }
  }
  return rows;
}

std::vector<AaSweepRow> aa_eval(const PriceBook& book, const std::vector<double>& sigmas,
                                int n_seeds, std::uint64_t base_seed, AaMode mode) {
  if (n_seeds < 1) throw DomainError("aa_eval needs at least one seed");
  std::vector<double> actual, spot;
  for (const auto& [isp, price] : book.imbalance) {
    actual.push_back(price.shortage_eur_mwh);
    spot.push_back(book.spot_for(isp));
  }
  if (actual.empty()) throw DataError("price book has no imbalance prices");

  std::vector<AaSweepRow> rows;
  for (std::size_t si = 0; si < sigmas.size(); ++si) {
    double sum = 0.0;
    for (int seed = 0; seed < n_seeds; ++seed) {
      const auto noisy = synth_forecast(
          actual, sigmas[si],
          sub_seed(base_seed, si * static_cast<std::uint64_t>(n_seeds) + seed));
      sum += agreement_accuracy(actual, noisy, spot, mode);
    }
    rows.push_back({sigmas[si], sum / n_seeds});
  }
  return rows;
}

} // namespace dcsim
