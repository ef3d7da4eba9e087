// Acceptance gate: one pass/fail line per criterion, nonzero exit when
// anything fails. Tolerances are pinned in each check.
#include "dcsim/config.hpp"
#include "dcsim/engine.hpp"
#include "dcsim/errors.hpp"
#include "dcsim/forecast.hpp"
#include "dcsim/machine.hpp"
#include "dcsim/market.hpp"
#include "dcsim/power_chain.hpp"
#include "dcsim/power_models.hpp"
#include "dcsim/scheduler.hpp"
#include "dcsim/timeutil.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace dcsim;

namespace {

const std::filesystem::path kScenario =
    std::filesystem::path(DCSIM_SCENARIO_DIR) / "demo" / "scenario.conf";

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Failure(what);
}

std::string num(double v) {
  std::ostringstream out;
  out.precision(12);
  out << v;
  return out.str();
}

// ---------------------------------------------------------------- 1. CPE

void check_cpe() {
  const auto a = compute_metrics(2.0, 0.2, 1.0, 1.0);
  require(std::fabs(a.cpe - 0.10) <= 1e-12, "CPE(2.0, 0.2) = " + num(a.cpe) + ", want 0.10");
  const auto b = compute_metrics(1.6, 0.8, 1.0, 1.0);
  require(std::fabs(b.cpe - 0.50) <= 1e-12, "CPE(1.6, 0.8) = " + num(b.cpe) + ", want 0.50");
}

// ------------------------------------------------- 2. PSU efficiency table

void check_psu_table() {
  // First-match-wins on the ordered segments: <=10 -> 90, <=20 -> 94,
  // <=50 -> 96, <=100 -> 91 (the last segment also covers overload).
  PsuSpec psu; // rated 870 W, titanium defaults
  const double eps = 1e-9;
  const std::pair<double, double> cases[] = {
      {0.0, 90.0},        {10.0, 90.0}, {10.0 + eps, 94.0}, {20.0, 94.0},
      {20.0 + eps, 96.0}, {50.0, 96.0}, {50.0 + eps, 91.0}, {99.9, 91.0},
  };
  for (const auto& [load_pct, want] : cases) {
    const auto r = psu_step(psu, psu.rated_output_w * load_pct / 100.0, 1.0);
    require(r.efficiency_pct == want, "load " + num(load_pct) + "% -> eta_e " +
                                          num(r.efficiency_pct) + ", want " + num(want));
  }
}

// --------------------------------------- 3. secondary-power PUE identity

void check_secondary_identity() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> pue_d(1.5, 2.5);
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  std::uniform_int_distribution<int> hosts_d(1, 12);
  int checked = 0;
  for (int trial = 0; checked < 1000; ++trial) {
    require(trial < 20000, "could not draw 1000 unclamped cases");
    SupportUnitSpec pdu{SupportKind::Pdu, 0.005 + 0.02 * frac(rng), 0.002 + 0.003 * frac(rng),
                        2000.0 + 8000.0 * frac(rng)};
    if (pdu.nameplate_loss < pdu.tare_loss) std::swap(pdu.nameplate_loss, pdu.tare_loss);
    SupportUnitSpec ups{SupportKind::Ups, 0.01 + 0.04 * frac(rng), 0.002 + 0.008 * frac(rng),
                        5000.0 + 20000.0 * frac(rng)};
    if (ups.nameplate_loss < ups.tare_loss) std::swap(ups.nameplate_loss, ups.tare_loss);

    const int n = hosts_d(rng);
    double sum_server = 0.0;
    for (int h = 0; h < n; ++h) sum_server += 100.0 + 700.0 * frac(rng);
    const double pue = pue_d(rng);

    const double pdu_l = pdu_loss(pdu, sum_server);
    const double ups_l = ups_loss(ups, sum_server + pdu_l);
    const auto sec = secondary_power(pue, sum_server, pdu_l, ups_l);
    if (sec.clamped) continue; // identity only claimed without the clamp

    const double total = sum_server + pdu_l + ups_l + sec.power_w;
    const double want = pue * sum_server;
    require(std::fabs(total - want) <= 1e-9 * std::fabs(want),
            "P_total " + num(total) + " != PUE*sum " + num(want));
    ++checked;
  }
}

// ------------------------------------------------- 4. max-min fair oracle

std::vector<double> maxmin_oracle(double capacity, std::vector<double> demands) {
  // Naive progressive filling in epsilon steps of the fair share.
  std::vector<double> alloc(demands.size(), 0.0);
  double left = capacity;
  while (left > 1e-12) {
    std::vector<std::size_t> open;
    for (std::size_t i = 0; i < demands.size(); ++i)
      if (alloc[i] < demands[i] - 1e-12) open.push_back(i);
    if (open.empty()) break;
    double grow = left / static_cast<double>(open.size());
    for (auto i : open) grow = std::min(grow, demands[i] - alloc[i]);
    for (auto i : open) {
      alloc[i] += grow;
      left -= grow;
    }
  }
  return alloc;
}

void check_maxmin() {
  // maxmin_share is permutation-symmetric, so enumerating non-decreasing
  // demand multisets covers every instance up to reordering; random
  // permutations below guard the symmetry itself.
  long instances = 0;
  std::function<void(std::vector<int>&, int)> walk = [&](std::vector<int>& demands, int lo) {
    if (!demands.empty()) {
      std::vector<double> d(demands.begin(), demands.end());
      for (int cap = 0; cap <= 30; ++cap) {
        const auto got = maxmin_share(cap, d);
        const auto want = maxmin_oracle(cap, d);
        for (std::size_t i = 0; i < d.size(); ++i)
          require(std::fabs(got[i] - want[i]) <= 1e-9,
                  "cap " + num(cap) + " demand[" + std::to_string(i) + "]=" + num(d[i]) +
                      ": got " + num(got[i]) + ", oracle " + num(want[i]));
        ++instances;
      }
    }
    if (demands.size() == 6) return;
    for (int v = lo; v <= 10; ++v) {
      demands.push_back(v);
      walk(demands, v);
      demands.pop_back();
    }
  };
  std::vector<int> demands;
  walk(demands, 0);
  require(instances > 300000, "enumeration too small: " + std::to_string(instances));

  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> d(1 + rng() % 6);
    for (auto& v : d) v = static_cast<double>(rng() % 11);
    const double cap = static_cast<double>(rng() % 31);
    auto base = maxmin_share(cap, d);
    std::vector<std::size_t> perm(d.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> pd(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) pd[i] = d[perm[i]];
    auto permuted = maxmin_share(cap, pd);
    for (std::size_t i = 0; i < d.size(); ++i)
      require(std::fabs(permuted[i] - base[perm[i]]) <= 1e-9,
              "allocation is not permutation-equivariant");
  }
}

// --------------------------------------------- 5. power-model bound chain

void check_model_bounds() {
  PowerModelSpec sq, li, sr;
  sq.kind = PowerModelKind::Square;
  li.kind = PowerModelKind::Linear;
  sr.kind = PowerModelKind::Sqrt;
  for (auto* m : {&sq, &li, &sr}) {
    m->p_idle_w = 100.0;
    m->p_max_w = 250.0;
  }
  for (int i = 0; i <= 10000; ++i) {
    const double u = i / 10000.0;
    const double a = eval_power(sq, u), b = eval_power(li, u), c = eval_power(sr, u);
    require(a <= b + 1e-12 && b <= c + 1e-12,
            "ordering broken at u=" + num(u) + ": " + num(a) + ", " + num(b) + ", " + num(c));
  }
  const std::vector<PowerKnot> table = {{0.0, 90.0}, {0.2, 120.0}, {0.55, 170.0}, {1.0, 260.0}};
  for (const auto& [u, p] : table)
    require(interpolate_power(table, u) == p, "knot u=" + num(u) + " not reproduced exactly");
}

// ----------------------------------------------------- 6. AA vs sigma

// Regularized incomplete beta via the standard continued fraction,
// needed for the Spearman t-test p-value.
double betacf(double a, double b, double x) {
  const int kMaxIter = 300;
  const double eps = 3e-14, fpmin = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0, d = 1.0 - qab * x / qap;
  if (std::fabs(d) < fpmin) d = fpmin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) break;
  }
  return h;
}

double reg_inc_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                    a * std::log(x) + b * std::log(1.0 - x);
  if (x < (a + 1.0) / (a + b + 2.0)) return std::exp(ln) * betacf(a, b, x) / a;
  return 1.0 - std::exp(ln) * betacf(b, a, 1.0 - x) / b;
}

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

// One-sided p-value for H1: rho < 0, via the t approximation.
double spearman_p_negative(double rho, std::size_t n) {
  if (rho <= -1.0) return 0.0;
  if (rho >= 1.0) return 1.0;
  const double df = static_cast<double>(n - 2);
  const double t = rho * std::sqrt(df / (1.0 - rho * rho));
  const double p_two = reg_inc_beta(df / 2.0, 0.5, df / (df + t * t));
  return t < 0.0 ? p_two / 2.0 : 1.0 - p_two / 2.0;
}

void check_aa() {
  // 5000-ISP synthetic price history scaled like real imbalance prices
  // (hundreds to about a thousand EUR/MWh), so the sigma range [0, 1200]
  // keeps pushing prices across the sign and spot thresholds instead of
  // blowing far past both at once.
  const std::size_t n_isp = 5000;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> pb(n_isp), ps(n_isp);
  for (std::size_t i = 0; i < n_isp; ++i) {
    ps[i] = 400.0 + 800.0 * u(rng);
    const double pick = u(rng);
    if (pick < 0.5)
      pb[i] = ps[i] * u(rng); // between zero and the spot price
    else if (pick < 0.8)
      pb[i] = ps[i] + 1500.0 + 1500.0 * u(rng); // far above both thresholds
    else
      pb[i] = -(1500.0 + 1500.0 * u(rng)); // far below both thresholds
  }

  const auto perfect = synth_forecast(pb, 0.0, 1);
  require(agreement_accuracy(pb, perfect, ps) == 1.0, "AA at sigma 0 is not exactly 1.0");

  std::vector<double> sigmas, means;
  for (int s = 0; s <= 1200; s += 100) sigmas.push_back(s);
  for (double sigma : sigmas) {
    double sum = 0.0;
    for (int seed = 0; seed < 30; ++seed) {
      const auto pf = synth_forecast(pb, sigma, sub_seed(4242, static_cast<std::uint64_t>(
                                                                   sigma * 100 + seed)));
      sum += agreement_accuracy(pb, pf, ps);
    }
    means.push_back(sum / 30.0);
  }
  const double rho = spearman(sigmas, means);
  const double p = spearman_p_negative(rho, sigmas.size());
  require(rho <= 0.0, "Spearman rho = " + num(rho) + " > 0");
  require(p < 0.01, "Spearman p = " + num(p) + " >= 0.01");
}

// ------------------------------------------------ 7. settlement properties

void check_settlement() {
  constexpr std::int64_t kT0 = 1614556800; // 2021-03-01T00:00:00Z
  std::mt19937_64 rng(31337);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int hours = 1 + static_cast<int>(rng() % 6);
    PriceBook book, book_eq;
    std::vector<IspDispatch> base;
    bool has_surplus_premium = false;
    for (int h = 0; h < hours; ++h) {
      const std::int64_t hour = kT0 + h * 3600;
      const double spot = 10.0 + 90.0 * u(rng);
      book.spot[hour] = spot;
      book_eq.spot[hour] = spot;
      for (int k = 0; k < 4; ++k) {
        const std::int64_t isp = hour + k * 900;
        ImbalancePrice p;
        p.shortage_eur_mwh = spot + 120.0 * (u(rng) - 0.3);
        p.surplus_eur_mwh = spot + 40.0 * u(rng) + 1.0; // strictly above spot
        book.imbalance[isp] = p;
        book_eq.imbalance[isp] = {p.shortage_eur_mwh, spot, 0}; // pB+ == pS
        const double delivered = 2.0 * u(rng);
        base.push_back({isp, delivered + u(rng), delivered}); // surplus everywhere
        has_surplus_premium = true;
      }
    }
    auto over = base;
    const double extra = 0.25 + u(rng);
    for (auto& d : over) d.scheduled_mwh += extra;

    // Two-price: over-scheduling is cost-neutral (buy and refund at spot).
    const auto two_base = settle(book, PriceSystem::TwoPrice, base);
    const auto two_over = settle(book, PriceSystem::TwoPrice, over);
    const double scale = std::max(1.0, std::fabs(two_base.total_eur));
    require(std::fabs(two_base.total_eur - two_over.total_eur) <= 1e-9 * scale,
            "two-price over-scheduling changed the total by " +
                num(two_over.total_eur - two_base.total_eur));

    // One-price with pB+ > pS on surplus ISPs: over-scheduling strictly pays.
    const auto one_base = settle(book, PriceSystem::OnePrice, base);
    const auto one_over = settle(book, PriceSystem::OnePrice, over);
    require(has_surplus_premium && one_over.total_eur < one_base.total_eur - 1e-12,
            "one-price over-scheduling did not strictly reduce the total");

    // pB+ == pS everywhere: the two systems coincide.
    const auto sys_one = settle(book_eq, PriceSystem::OnePrice, over);
    const auto sys_two = settle(book_eq, PriceSystem::TwoPrice, over);
    require(std::fabs(sys_one.total_eur - sys_two.total_eur) <= 1e-9 * scale,
            "one-price != two-price despite pB+ == pS");
  }
}

// ------------------------------------------ 8. governor ordering, end to end

ScenarioConfig demo_config() {
  return ScenarioConfig::from_config(Config::load(kScenario));
}

void check_governor_ordering() {
  auto cfg = demo_config();
  cfg.scheduler_enabled = false;
  std::map<Governor, RunTotals> totals;
  for (auto g : {Governor::Performance, Governor::Ondemand, Governor::Conservative,
                 Governor::Powersave}) {
    cfg.governor = g;
    totals[g] = run(cfg).totals;
  }
  const double e_perf = totals[Governor::Performance].energy_kwh;
  const double e_od = totals[Governor::Ondemand].energy_kwh;
  const double e_cons = totals[Governor::Conservative].energy_kwh;
  const double e_save = totals[Governor::Powersave].energy_kwh;
  require(e_save < e_perf, "energy(powersave) >= energy(performance)");
  require(e_save < e_od && e_od < e_perf,
          "ondemand energy not strictly between powersave and performance");
  require(e_save < e_cons && e_cons < e_perf,
          "conservative energy not strictly between powersave and performance");
  require(totals[Governor::Performance].overcommit_pct <
              totals[Governor::Powersave].overcommit_pct,
          "oc(performance) >= oc(powersave)");
}

// --------------------------------------------------- 9. damping endpoints

void check_damping_endpoints() {
  auto cfg = demo_config();
  cfg.scheduler_enabled = true;
  const auto rows = sweep_damping(cfg, {0.0, 110.0});
  require(rows.size() == 2 && !rows[0].failed && !rows[1].failed, "sweep run failed");
  require(rows[0].overcommit_pct <= rows[1].overcommit_pct,
          "oc(df=0) = " + num(rows[0].overcommit_pct) + " > oc(df=110) = " +
              num(rows[1].overcommit_pct));
  require(rows[0].energy_kwh >= rows[1].energy_kwh,
          "energy(df=0) = " + num(rows[0].energy_kwh) + " < energy(df=110) = " +
              num(rows[1].energy_kwh));
}

// -------------------------------------------------------- 10. determinism

void check_determinism() {
  auto cfg = demo_config();
  cfg.scheduler_enabled = true; // exercise the stochastic forecast path too
  const auto base = std::filesystem::temp_directory_path() / "dcsim_acceptance";
  const auto d1 = base / "run1", d2 = base / "run2";
  std::filesystem::remove_all(base);
  write_report(run(cfg), d1);
  write_report(run(cfg), d2);
  for (const auto& entry : std::filesystem::directory_iterator(d1)) {
    const auto name = entry.path().filename();
    std::ifstream a(entry.path(), std::ios::binary), b(d2 / name, std::ios::binary);
    std::ostringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    require(sa.str() == sb.str() && !sa.str().empty(),
            "report file " + name.string() + " differs between identical runs");
  }
  std::filesystem::remove_all(base);
}

// ------------------------------------------------------- 11. sizing oracle

void check_sizing() {
  std::mt19937_64 rng(555);
  for (int trial = 0; trial < 10000; ++trial) {
    const double psi_d = static_cast<double>(rng() % 5000000);
    const double psi_f = static_cast<double>(1000 + rng() % 3000);
    const int c = static_cast<int>(1 + rng() % 128);

    // Brute force the double ceiling: the core demand is the smallest
    // whole-core multiple of psi_f covering psi_d; the fleet is the
    // smallest N with N*c cores covering it.
    long cores = 0;
    while (static_cast<double>(cores) * psi_f < psi_d) ++cores;
    long n = 0;
    while (n * static_cast<long>(c) < cores) ++n;
    const long got = size_fleet(psi_d, psi_f, c);
    require(got == n, "size_fleet(" + num(psi_d) + ", " + num(psi_f) + ", " +
                          std::to_string(c) + ") = " + std::to_string(got) + ", oracle " +
                          std::to_string(n));

    const long long psi_m = static_cast<long long>(rng() % 10000000);
    const long long hosts = std::max(1l, n);
    const long long unit = static_cast<long long>(64 + rng() % 4096);
    // Integer ceil-division oracle, independent of the floating-point path.
    const long long per_host = (psi_m + hosts - 1) / hosts;
    const long long units = (per_host + unit - 1) / unit;
    require(size_memory(static_cast<double>(psi_m), static_cast<long>(hosts),
                        static_cast<double>(unit)) == units,
            "size_memory oracle mismatch");
  }
}

// ------------------------------------------------- 12. sweet-spot fixture

void check_sweet_spot() {
  std::vector<DampingSweepRow> rows;
  for (int i = 0; i <= 11; ++i) {
    const double x = 10.0 * i;
    rows.push_back({x, 1.0 - x / 110.0, x / 110.0, false, ""});
  }
  const auto spot = sweet_spot(rows);
  require(spot.intersected, "crossing-lines fixture did not intersect");
  require(std::fabs(spot.factor - 55.0) <= 0.5,
          "sweet spot " + num(spot.factor) + " outside 55 +/- 0.5");
}

struct Criterion {
  const char* name;
  void (*fn)();
};

} // namespace

int main() {
  const Criterion criteria[] = {
      {"01 CPE quotes (PUE 2.0/U 0.2 -> 0.10; PUE 1.6/U 0.8 -> 0.50)", check_cpe},
      {"02 PSU efficiency branches at boundary loads", check_psu_table},
      {"03 secondary-power PUE identity on 1000 random chains", check_secondary_identity},
      {"04 max-min allocations vs progressive-filling oracle", check_maxmin},
      {"05 square <= linear <= sqrt on a 10^4 grid; knots exact", check_model_bounds},
      {"06 agreement accuracy: sigma 0 perfect; non-increasing in sigma", check_aa},
      {"07 settlement neutrality/arbitrage/equivalence, 1000 cases", check_settlement},
      {"08 governor energy and over-commission ordering, end to end", check_governor_ordering},
      {"09 damping endpoints df=0 vs df=110", check_damping_endpoints},
      {"10 byte-identical reports for identical config and seed", check_determinism},
      {"11 fleet/memory sizing vs smallest-N oracle, 10^4 triples", check_sizing},
      {"12 sweet spot of crossing lines at 55 +/- 0.5", check_sweet_spot},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.fn();
      const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
      std::cout << "PASS  " << c.name << "  (" << ms << " ms)\n";
    } catch (const std::exception& e) {
      ++failures;
      std::cout << "FAIL  " << c.name << "  -- " << e.what() << '\n';
    }
  }
  if (failures) std::cout << failures << " criterion(s) failed\n";
  return failures == 0 ? 0 : 1;
}
