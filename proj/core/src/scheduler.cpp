#include "dcsim/scheduler.hpp"

#include "dcsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace dcsim {

void SchedulerConfig::validate() const {
  if (damping_factor < 0.0) throw ConfigError("damping factor must be >= 0");
  if (ladder.empty()) throw ConfigError("scheduler ladder is empty");
  std::set<Governor> seen(ladder.begin(), ladder.end());
  if (seen.size() != ladder.size()) throw ConfigError("scheduler ladder entries must be unique");
  if (default_rung >= ladder.size()) throw ConfigError("default rung outside ladder");
}

std::string to_string(DecisionBranch b) {
  switch (b) {
    case DecisionBranch::Profitable: return "profitable";
    case DecisionBranch::AboveSpot: return "above_spot";
    case DecisionBranch::Hold: return "hold";
    case DecisionBranch::Damped: return "damped";
  }
  return "?";
}

Governor decide(double forecast_eur_mwh, double spot_eur_mwh, SchedulerState& state,
                const SchedulerConfig& config, std::int64_t isp_start) {
  DecisionLogEntry e;
  e.isp_start = isp_start;
  e.forecast_eur_mwh = forecast_eur_mwh;
  e.spot_eur_mwh = spot_eur_mwh;
  e.rung_before = state.rung;

  if (forecast_eur_mwh < 0.0) {
    state.rung = 0;
    e.branch = DecisionBranch::Profitable;
  } else if (forecast_eur_mwh > spot_eur_mwh) {
    state.rung = std::min(state.rung + 1, config.ladder.size() - 1);
    e.branch = DecisionBranch::AboveSpot;
  } else {
    state.rung = config.default_rung;
    e.branch = DecisionBranch::Hold;
  }
  e.rung_after = state.rung;
  state.log.push_back(e);
  return config.ladder[state.rung];
}

bool damp(SchedulerState& state, const SchedulerConfig& config, double oc_now_pct) {
  const double delta = std::max(0.0, oc_now_pct - state.oc_reference_pct);
  if (!(delta > config.damping_factor)) return false;

  DecisionLogEntry e;
  e.branch = DecisionBranch::Damped;
  e.rung_before = state.rung;
  if (state.rung > 0) --state.rung;
  state.oc_reference_pct = oc_now_pct;
  e.rung_after = state.rung;
  e.oc_delta_pct = delta;
  state.log.push_back(e);
  return true;
}

std::array<double, 4> fit_cubic(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 4)
    throw DomainError("cubic fit needs at least 4 matching points");

  // Normal equations for a degree-3 polynomial, solved by Gaussian
  // elimination with partial pivoting (a 4x4 system).
  double s[7] = {0};
  double b[4] = {0};
  for (std::size_t i = 0; i < x.size(); ++i) {
    double p = 1.0;
    for (int k = 0; k <= 6; ++k) {
      s[k] += p;
      p *= x[i];
    }
    double q = 1.0;
    for (int k = 0; k < 4; ++k) {
      b[k] += q * y[i];
      q *= x[i];
    }
  }
  double A[4][5];
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) A[r][c] = s[r + c];
    A[r][4] = b[r];
  }
  for (int col = 0; col < 4; ++col) {
    int piv = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::fabs(A[r][col]) > std::fabs(A[piv][col])) piv = r;
    if (std::fabs(A[piv][col]) < 1e-30) throw DomainError("singular system in cubic fit");
    for (int c = 0; c < 5; ++c) std::swap(A[col][c], A[piv][c]);
    for (int r = 0; r < 4; ++r) {
      if (r == col) continue;
      const double f = A[r][col] / A[col][col];
      for (int c = col; c < 5; ++c) A[r][c] -= f * A[col][c];
    }
  }
  return {A[0][4] / A[0][0], A[1][4] / A[1][1], A[2][4] / A[2][2], A[3][4] / A[3][3]};
}

namespace {

double eval_poly(const std::array<double, 4>& c, double x) {
  return ((c[3] * x + c[2]) * x + c[1]) * x + c[0];
}

void minmax_normalize(std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  const double span = *hi - *lo;
  if (span == 0.0) {
    std::fill(v.begin(), v.end(), 0.0);
    return;
  }
  for (double& e : v) e = (e - *lo) / span;
}

} // namespace

SweetSpotResult sweet_spot(const std::vector<DampingSweepRow>& rows) {
  std::vector<double> x, energy, oc;
  for (const auto& r : rows) {
    if (r.failed) continue;
    x.push_back(r.factor);
    energy.push_back(r.energy_kwh);
    oc.push_back(r.overcommit_pct);
  }
  if (x.size() < 5) throw DomainError("sweet spot needs at least 5 successful sweep rows");

  minmax_normalize(energy);
  minmax_normalize(oc);
  const auto ce = fit_cubic(x, energy);
  const auto co = fit_cubic(x, oc);
  const std::array<double, 4> diff = {ce[0] - co[0], ce[1] - co[1], ce[2] - co[2],
                                      ce[3] - co[3]};

  const double lo = *std::min_element(x.begin(), x.end());
  const double hi = *std::max_element(x.begin(), x.end());

  SweetSpotResult out;
  const double span = hi - lo;
  const int kSamples = 4096;
  double max_abs = 0.0;
  for (int i = 0; i <= kSamples; ++i)
    max_abs = std::max(max_abs, std::fabs(eval_poly(diff, lo + span * i / kSamples)));
  if (max_abs < 1e-9) {
    out.factor = lo;
    out.degenerate = true;
    out.intersected = true;
    return out;
  }

  double prev = eval_poly(diff, lo);
  double best_abs = std::fabs(prev);
  double best_x = lo;
  for (int i = 1; i <= kSamples; ++i) {
    const double xc = lo + span * i / kSamples;
    const double cur = eval_poly(diff, xc);
    if (prev == 0.0 || (prev < 0.0) != (cur < 0.0)) {
      // Bracketed root; bisect it down.
      double a = lo + span * (i - 1) / kSamples, fa = prev;
      double bdry = xc;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (a + bdry);
        const double fm = eval_poly(diff, mid);
        if (fa == 0.0) break;
        if ((fa < 0.0) == (fm < 0.0)) {
          a = mid;
          fa = fm;
        } else {
          bdry = mid;
        }
      }
      out.factor = 0.5 * (a + bdry);
      out.intersected = true;
      return out;
    }
    if (std::fabs(cur) < best_abs) {
      best_abs = std::fabs(cur);
      best_x = xc;
    }
    prev = cur;
  }
  out.factor = best_x;
  out.intersected = false;
  return out;
}

} // namespace dcsim
