#include "dcsim/csv.hpp"
#include "dcsim/engine.hpp"
#include "dcsim/errors.hpp"
#include "dcsim/timeutil.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

/// Parses "start:stop:step" (inclusive endpoints, within rounding).
std::vector<double> parse_range(const std::string& spec) {
  double a, b, c;
  if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &a, &b, &c) != 3 || c <= 0.0)
    throw dcsim::ConfigError("bad range '" + spec + "' (expected start:stop:step)");
  std::vector<double> out;
  for (double x = a; x <= b + 1e-9 * c; x += c) out.push_back(x);
  return out;
}

std::size_t column(const dcsim::csv::Table& t, const std::string& name) {
  for (std::size_t i = 0; i < t.header.size(); ++i)
    if (t.header[i] == name) return i;
  throw dcsim::DataError("missing column '" + name + "'");
}

void cmd_simulate(const std::string& config_path, const std::string& out_dir) {
  auto cfg = dcsim::ScenarioConfig::from_config(dcsim::Config::load(config_path));
  auto report = dcsim::run(cfg);
  dcsim::write_report(report, out_dir);
  std::cout << "hosts=" << report.n_hosts << " ticks=" << report.ledger.size()
            << " energy_kwh=" << fmt(report.totals.energy_kwh)
            << " overcommit_pct=" << fmt(report.totals.overcommit_pct) << '\n';
}

void cmd_sweep_damping(const std::string& config_path, const std::string& factors,
                       const std::string& out_dir) {
  auto cfg = dcsim::ScenarioConfig::from_config(dcsim::Config::load(config_path));
  auto rows = dcsim::sweep_damping(cfg, parse_range(factors));
  std::filesystem::create_directories(out_dir);
  std::ofstream out(std::filesystem::path(out_dir) / "damping.csv");
  out << "factor,energy_kwh,overcommit_pct,status\n";
  for (const auto& r : rows) {
    out << fmt(r.factor) << ',' << fmt(r.energy_kwh) << ',' << fmt(r.overcommit_pct) << ','
        << (r.failed ? "error" : "ok") << '\n';
    if (r.failed) std::cerr << "factor " << r.factor << " failed: " << r.error << '\n';
  }
  try {
    auto spot = dcsim::sweet_spot(rows);
    std::ofstream js(std::filesystem::path(out_dir) / "sweet_spot.json");
    nlohmann::json j{{"factor", spot.factor},
                     {"intersected", spot.intersected},
                     {"degenerate", spot.degenerate}};
    js << j.dump(2) << '\n';
    std::cout << "sweet_spot=" << fmt(spot.factor)
              << (spot.intersected ? "" : " (no intersection; closest approach)") << '\n';
  } catch (const dcsim::DomainError& e) {
    std::cerr << "sweet spot skipped: " << e.what() << '\n';
  }
}

void cmd_sweep_procurement(const std::string& config_path, const std::string& q_range,
                           const std::string& s_range, const std::string& out_dir) {
  auto cfg = dcsim::ScenarioConfig::from_config(dcsim::Config::load(config_path));
  auto rows = dcsim::sweep_procurement(cfg, parse_range(q_range), parse_range(s_range));
  std::filesystem::create_directories(out_dir);
  std::ofstream out(std::filesystem::path(out_dir) / "procurement.csv");
  out << "q,s,day_ahead_eur,imbalance_eur,total_eur\n";
  for (const auto& r : rows)
    out << fmt(r.q) << ',' << fmt(r.s) << ',' << fmt(r.day_ahead_eur) << ','
        << fmt(r.imbalance_eur) << ',' << fmt(r.total_eur) << '\n';
  std::cout << rows.size() << " schedules settled\n";
}

void cmd_aa_eval(const std::string& spot_csv, const std::string& imbalance_csv,
                 const std::string& sigma_range, int seeds, std::uint64_t seed,
                 const std::string& aa_mode, const std::string& out_dir) {
  dcsim::PriceBook book;
  dcsim::ingest_spot(spot_csv, book);
  dcsim::ingest_imbalance(imbalance_csv, book);
  const auto mode = aa_mode == "conjunction" ? dcsim::AaMode::Conjunction : dcsim::AaMode::Literal;
  auto rows = dcsim::aa_eval(book, parse_range(sigma_range), seeds, seed, mode);
  std::filesystem::create_directories(out_dir);
  std::ofstream out(std::filesystem::path(out_dir) / "aa.csv");
  out << "sigma,mean_aa\n";
  for (const auto& r : rows) out << fmt(r.sigma) << ',' << fmt(r.mean_aa) << '\n';
  std::cout << rows.size() << " sigma levels evaluated\n";
}

void cmd_settle(const std::string& spot_csv, const std::string& imbalance_csv,
                const std::string& dispatch_csv, const std::string& system) {
  dcsim::PriceBook book;
  dcsim::ingest_spot(spot_csv, book);
  dcsim::ingest_imbalance(imbalance_csv, book);

  auto t = dcsim::csv::read_file(dispatch_csv);
  const auto c_isp = column(t, "isp_start");
  const auto c_sched = column(t, "scheduled_mwh");
  const auto c_del = column(t, "delivered_mwh");
  std::vector<dcsim::IspDispatch> dispatch;
  for (const auto& row : t.rows) {
    dcsim::IspDispatch d;
    d.isp_start = dcsim::timeutil::parse_iso8601(row[c_isp]);
    d.scheduled_mwh = dcsim::csv::to_double(row[c_sched], dispatch_csv);
    d.delivered_mwh = dcsim::csv::to_double(row[c_del], dispatch_csv);
    dispatch.push_back(d);
  }

  const auto sys = system == "one" ? dcsim::PriceSystem::OnePrice : dcsim::PriceSystem::TwoPrice;
  auto result = dcsim::settle(book, sys, dispatch);
  std::cout << "day_ahead_eur=" << fmt(result.day_ahead_eur)
            << " imbalance_eur=" << fmt(result.imbalance_eur)
            << " total_eur=" << fmt(result.total_eur) << '\n';
}

void cmd_plot_data(const std::string& report_dir, const std::string& figure) {
  namespace fs = std::filesystem;
  const fs::path dir(report_dir);
  std::cout << "x,series,value\n";
  if (figure == "loads") {
    auto t = dcsim::csv::read_file(dir / "loads.csv");
    const auto ct = column(t, "t"), ci = column(t, "it_w"), cb = column(t, "base_w"),
               cp = column(t, "peak_w");
    for (const auto& row : t.rows) {
      std::cout << row[ct] << ",it_w," << row[ci] << '\n'
                << row[ct] << ",base_w," << row[cb] << '\n'
                << row[ct] << ",peak_w," << row[cp] << '\n';
    }
  } else if (figure == "costs") {
    std::ifstream in(dir / "summary.json");
    if (!in) throw dcsim::DataError("no summary.json in " + report_dir);
    nlohmann::json j;
    in >> j;
    if (!j.contains("settlement"))
      throw dcsim::DataError("report has no settlement (market disabled?)");
    for (const auto& key : {"day_ahead_eur", "imbalance_eur", "total_eur"})
      std::cout << key << ",settlement," << j["settlement"][key].dump() << '\n';
    if (j.contains("ondemand_costs_eur"))
      for (const auto& [label, v] : j["ondemand_costs_eur"].items())
        std::cout << label << ",ondemand," << v.dump() << '\n';
  } else if (figure == "damping") {
    auto t = dcsim::csv::read_file(dir / "damping.csv");
    const auto cf = column(t, "factor"), ce = column(t, "energy_kwh"),
               co = column(t, "overcommit_pct");
    for (const auto& row : t.rows) {
      std::cout << row[cf] << ",energy_kwh," << row[ce] << '\n'
                << row[cf] << ",overcommit_pct," << row[co] << '\n';
    }
  } else if (figure == "aa") {
    auto t = dcsim::csv::read_file(dir / "aa.csv");
    const auto cs = column(t, "sigma"), ca = column(t, "mean_aa");
    for (const auto& row : t.rows)
      std::cout << row[cs] << ",mean_aa," << row[ca] << '\n';
  } else {
    throw dcsim::ConfigError("unknown figure '" + figure + "'");
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Datacenter power-system and energy-market co-simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out";
  std::string factors = "0:110:2", q_range = "0:1:0.1", s_range = "0.97:1.30:0.03";
  std::string sigma_range = "0:1200:50", spot_csv, imbalance_csv, dispatch_csv;
  std::string system = "two", figure, report_dir, aa_mode = "literal";
  int seeds = 30;
  std::uint64_t seed = 0;

  auto* simulate = app.add_subcommand("simulate", "Run one scenario and write its report");
  simulate->add_option("--config", config_path, "Scenario config file")->required();
  simulate->add_option("--out", out_dir, "Report directory");

  auto* sweep_d = app.add_subcommand("sweep-damping", "Full run per damping factor");
  sweep_d->add_option("--config", config_path)->required();
  sweep_d->add_option("--factors", factors, "start:stop:step");
  sweep_d->add_option("--out", out_dir);

  auto* sweep_p = app.add_subcommand("sweep-procurement", "Settle a grid of (q, s) schedules");
  sweep_p->add_option("--config", config_path)->required();
  sweep_p->add_option("--q", q_range, "quantile start:stop:step");
  sweep_p->add_option("--s", s_range, "scalar start:stop:step");
  sweep_p->add_option("--out", out_dir);

  auto* aa = app.add_subcommand("aa-eval", "Agreement accuracy of synthetic predictors");
  aa->add_option("--spot", spot_csv)->required();
  aa->add_option("--imbalance", imbalance_csv)->required();
  aa->add_option("--sigma", sigma_range, "start:stop:step");
  aa->add_option("--seeds", seeds, "noise streams per sigma");
  aa->add_option("--seed", seed, "base seed");
  aa->add_option("--aa-mode", aa_mode)->check(CLI::IsMember({"literal", "conjunction"}));
  aa->add_option("--out", out_dir);

  auto* settle = app.add_subcommand("settle", "Settle a dispatch file against price data");
  settle->add_option("--spot", spot_csv)->required();
  settle->add_option("--imbalance", imbalance_csv)->required();
  settle->add_option("--dispatch", dispatch_csv, "CSV with isp_start,scheduled_mwh,delivered_mwh")
      ->required();
  settle->add_option("--system", system)->check(CLI::IsMember({"one", "two"}));

  auto* plot = app.add_subcommand("plot-data", "Emit tidy long-format CSV for plotting");
  plot->add_option("--report", report_dir)->required();
  plot->add_option("--figure", figure)->required()
      ->check(CLI::IsMember({"loads", "costs", "damping", "aa"}));

  try {
    app.parse(argc, argv);
    if (*simulate) cmd_simulate(config_path, out_dir);
    if (*sweep_d) cmd_sweep_damping(config_path, factors, out_dir);
    if (*sweep_p) cmd_sweep_procurement(config_path, q_range, s_range, out_dir);
    if (*aa) cmd_aa_eval(spot_csv, imbalance_csv, sigma_range, seeds, seed, aa_mode, out_dir);
    if (*settle) cmd_settle(spot_csv, imbalance_csv, dispatch_csv, system);
    if (*plot) cmd_plot_data(report_dir, figure);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  } catch (const dcsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const dcsim::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}
