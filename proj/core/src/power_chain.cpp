#include "dcsim/power_chain.hpp"

#include "dcsim/errors.hpp"

#include <algorithm>
#include <cmath>

namespace dcsim {

std::vector<PsuCurveSegment> titanium_efficiency_curve() {
  // First-match-wins resolves the published table's overlapping boundary
  // at 50% (50% maps to 96%); the last segment extends past 100% load.
  return {{10.0, 90.0}, {20.0, 94.0}, {50.0, 96.0}, {100.0, 91.0}};
}

void PsuSpec::validate() const {
  if (rated_output_w <= 0.0) throw ConfigError("PSU rated output must be > 0");
  if (efficiency_curve.empty()) throw ConfigError("PSU efficiency curve is empty");
  double prev = -1.0;
  for (const auto& seg : efficiency_curve) {
    if (seg.load_upper_bound_pct <= prev)
      throw ConfigError("PSU efficiency curve bounds must strictly increase");
    if (seg.efficiency_pct <= 0.0 || seg.efficiency_pct > 100.0)
      throw ConfigError("PSU efficiency must lie in (0, 100]");
    prev = seg.load_upper_bound_pct;
  }
}

PsuStepResult psu_step(const PsuSpec& spec, double server_power_w, double dt_s) {
  if (server_power_w < 0.0) throw DomainError("server power must be >= 0");
  if (dt_s <= 0.0) throw DomainError("PSU step interval must be > 0");

  PsuStepResult out;
  out.load_pct = 100.0 * server_power_w / spec.rated_output_w;
  out.overloaded = server_power_w > spec.rated_output_w;

  out.efficiency_pct = spec.efficiency_curve.back().efficiency_pct;
  for (const auto& seg : spec.efficiency_curve) {
    if (out.load_pct <= seg.load_upper_bound_pct) {
      out.efficiency_pct = seg.efficiency_pct;
      break;
    }
  }
  out.loss_w = server_power_w * 100.0 / out.efficiency_pct - server_power_w;
  out.energy_loss_j = out.loss_w * dt_s;
  return out;
}

void SupportUnitSpec::validate() const {
  if (!(0.0 <= tare_loss && tare_loss <= nameplate_loss && nameplate_loss < 1.0))
    throw ConfigError("support unit requires 0 <= lambda <= pi < 1");
  if (rated_power_w <= 0.0) throw ConfigError("support unit rated power must be > 0");
}

double pdu_loss(const SupportUnitSpec& spec, double sum_server_in_w, bool literal) {
  spec.validate();
  if (sum_server_in_w < 0.0) throw DomainError("PDU inlet sum must be >= 0");
  const double beta = spec.nameplate_loss - spec.tare_loss;
  const double tare = spec.tare_loss * spec.rated_power_w;
  if (literal) return tare + beta * sum_server_in_w * sum_server_in_w;
  const double per_unit = sum_server_in_w / spec.rated_power_w;
  return tare + beta * per_unit * per_unit * spec.rated_power_w;
}

double ups_loss(const SupportUnitSpec& spec, double sum_pdu_in_w) {
  spec.validate();
  if (sum_pdu_in_w < 0.0) throw DomainError("UPS inlet sum must be >= 0");
  const double alpha = spec.nameplate_loss - spec.tare_loss;
  return spec.tare_loss * spec.rated_power_w + alpha * sum_pdu_in_w;
}

SecondaryResult secondary_power(double pue, double sum_server_w, double sum_pdu_loss_w,
                                double sum_ups_loss_w) {
  if (pue < 1.0) throw ConfigError("PUE must be >= 1");
  SecondaryResult out;
  // Secondary support is the facility draw above the IT load, minus the
  // PDU/UPS losses modeled explicitly; the facility total
  // (servers + PDU + UPS + secondary) then equals PUE * servers whenever
  // the clamp stays off.
  const double raw = (pue - 1.0) * sum_server_w - (sum_pdu_loss_w + sum_ups_loss_w);
  if (raw < 0.0) {
    out.power_w = 0.0;
    out.clamped = true;
  } else {
    out.power_w = raw;
  }
  return out;
}

std::vector<double> maxmin_share(double capacity_w, const std::vector<double>& demands_w) {
  if (capacity_w < 0.0) throw DomainError("capacity must be >= 0");
  std::vector<double> alloc(demands_w.size(), 0.0);
  for (double d : demands_w)
    if (d < 0.0) throw DomainError("demands must be >= 0");

  // Water filling over demand order: consumers cheaper than the running
  // fair share get their full demand, the remainder splits evenly.
  std::vector<std::size_t> order(demands_w.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return demands_w[a] < demands_w[b]; });

  double remaining = capacity_w;
  std::size_t left = order.size();
  for (std::size_t k = 0; k < order.size(); ++k, --left) {
    const std::size_t i = order[k];
    const double share = remaining / static_cast<double>(left);
    const double grant = std::min(demands_w[i], share);
    alloc[i] = grant;
    remaining -= grant;
  }
  return alloc;
}

void PowerTopology::validate() const {
  if (hosts_per_pdu < 1 || pdus_per_ups < 1 || ups_count < 1)
    throw ConfigError("topology counts must be >= 1");
  if (pue < 1.0) throw ConfigError("PUE must be >= 1");
  psu.validate();
  pdu.validate();
  ups.validate();
}

} // namespace dcsim
