#ifndef DCSIM_POWER_CHAIN_HPP
#define DCSIM_POWER_CHAIN_HPP

#include <utility>
#include <vector>

namespace dcsim {

/// One PSU efficiency segment: efficiency applies while the load
/// percentage is at or below `load_upper_bound_pct` (first match wins).
struct PsuCurveSegment {
  double load_upper_bound_pct = 0.0;
  double efficiency_pct = 0.0;
};

/// 80 Plus Titanium mapping; the last segment also covers overload.
std::vector<PsuCurveSegment> titanium_efficiency_curve();

struct PsuSpec {
  double rated_output_w = 870.0;
  std::vector<PsuCurveSegment> efficiency_curve = titanium_efficiency_curve();

  void validate() const;
};

struct PsuStepResult {
  double load_pct = 0.0;       // eta_l
  double efficiency_pct = 0.0; // eta_e
  double loss_w = 0.0;
  double energy_loss_j = 0.0;
  bool overloaded = false; // server draw exceeded the rated output
};

/// Maps the server draw to a load percentage and efficiency segment,
/// then books the conversion loss over dt.
PsuStepResult psu_step(const PsuSpec& spec, double server_power_w, double dt_s);

enum class SupportKind { Ups, Pdu };

/// Two-coefficient loss model for UPS and PDU tiers: a constant tare
/// loss plus a load-dependent term (proportional for UPS, square-law
/// for PDU).
struct SupportUnitSpec {
  SupportKind kind = SupportKind::Pdu;
  double nameplate_loss = 0.0; // pi, fraction of rated at rated load
  double tare_loss = 0.0;      // lambda, fraction of rated
  double rated_power_w = 0.0;

  void validate() const;
};

/// PDU loss. The square-law term is normalized per unit of rated power
/// by default; `literal` reproduces the raw watts-squared form.
double pdu_loss(const SupportUnitSpec& spec, double sum_server_in_w, bool literal = false);

/// UPS loss: tare + proportional term on the summed PDU inlet power.
double ups_loss(const SupportUnitSpec& spec, double sum_pdu_in_w);

struct SecondaryResult {
  double power_w = 0.0;
  bool clamped = false; // raw value was negative (PUE too small for the modeled losses)
};

/// Secondary-support power: the facility draw above the IT load with the
/// modeled support losses carved out, (PUE - 1) * sum(server) - (PDU +
/// UPS losses), clamped at zero so PUE sweeps stay runnable. Adding the
/// tiers back gives a facility total of exactly PUE * sum(server).
SecondaryResult secondary_power(double pue, double sum_server_w, double sum_pdu_loss_w,
                                double sum_ups_loss_w);

/// Progressive-filling max-min fair allocation of `capacity_w` over the
/// given demands. Total allocation is min(capacity, total demand); no
/// consumer receives more than it asked for.
std::vector<double> maxmin_share(double capacity_w, const std::vector<double>& demands_w);

struct PowerTopology {
  long hosts_per_pdu = 1;
  long pdus_per_ups = 1;
  long ups_count = 1;
  double pue = 1.0;
  PsuSpec psu;
  SupportUnitSpec pdu;
  SupportUnitSpec ups;

  void validate() const;
};

} // namespace dcsim

#endif
